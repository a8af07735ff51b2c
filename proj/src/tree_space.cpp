#include "laakso_lab/tree_space.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "laakso_lab/error.hpp"

namespace laakso_lab {

namespace {

void check_increasing(const std::vector<int>& elements) {
  int previous = 0;
  for (int e : elements) {
    if (e <= previous) {
      throw DomainError("tree node elements must be positive and strictly increasing");
    }
    previous = e;
  }
}

}  // namespace

TreeNode::TreeNode(std::initializer_list<int> elements) : elements_(elements) {
  check_increasing(elements_);
}

TreeNode::TreeNode(std::vector<int> elements) : elements_(std::move(elements)) {
  check_increasing(elements_);
}

int TreeNode::last_offset() const {
  if (elements_.empty()) throw DomainError("root has no fraternal index");
  const int previous = elements_.size() > 1 ? elements_[elements_.size() - 2] : 0;
  return elements_.back() - previous;
}

TreeNode TreeNode::with_child(int offset) const {
  if (offset < 1) throw DomainError("child offset must be positive");
  if (max_element() > std::numeric_limits<int>::max() - offset) {
    throw CapacityError("tree element overflow");
  }
  TreeNode child = *this;
  child.elements_.push_back(max_element() + offset);
  return child;
}

bool TreeNode::is_prefix_of(const TreeNode& other) const noexcept {
  return elements_.size() <= other.elements_.size() &&
         std::equal(elements_.begin(), elements_.end(), other.elements_.begin());
}

std::string TreeNode::to_string() const {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (i) out << ',';
    out << elements_[i];
  }
  out << '}';
  return out.str();
}

std::size_t TreeNodeHash::operator()(const TreeNode& node) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (int e : node.elements()) {
    h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

std::optional<TreeNode> tree_parent(const TreeNode& node) {
  if (node.is_root()) return std::nullopt;
  std::vector<int> elements = node.elements();
  elements.pop_back();
  return TreeNode(std::move(elements));
}

TreeNode tree_lcp(const TreeNode& a, const TreeNode& b) {
  const auto& x = a.elements();
  const auto& y = b.elements();
  const auto mismatch = std::mismatch(x.begin(), x.end(), y.begin(), y.end());
  return TreeNode(std::vector<int>(x.begin(), mismatch.first));
}

int tree_distance(const TreeNode& a, const TreeNode& b) {
  const auto& x = a.elements();
  const auto& y = b.elements();
  const auto common = std::mismatch(x.begin(), x.end(), y.begin(), y.end()).first - x.begin();
  return a.level() + b.level() - 2 * static_cast<int>(common);
}

std::size_t max_vertices_from_env(std::size_t fallback) {
  if (const char* raw = std::getenv("LAAKSO_LAB_MAX_VERTICES")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(raw, &end, 10);
    if (end != raw && *end == '\0' && value > 0) return static_cast<std::size_t>(value);
  }
  return fallback;
}

TreeSpace::TreeSpace(int branching, int depth)
    : TreeSpace(branching, depth, max_vertices_from_env(kDefaultMaxVertices)) {}

TreeSpace::TreeSpace(int branching, int depth, std::size_t max_vertices)
    : branching_(branching), depth_(depth) {
  if (branching < 1) throw DomainError("tree branching must be positive");
  if (depth < 0) throw DomainError("tree depth must be non-negative");
  const std::size_t count = count_vertices(branching, depth);
  if (count > max_vertices) {
    throw CapacityError("T_{" + std::to_string(branching) + "," + std::to_string(depth) +
                        "} has more than " + std::to_string(max_vertices) + " vertices");
  }
  vertices_.reserve(count);
  // Preorder with children in increasing offset order is lexicographic order.
  std::vector<TreeNode> stack{TreeNode{}};
  while (!stack.empty()) {
    TreeNode node = std::move(stack.back());
    stack.pop_back();
    if (node.level() < depth_) {
      for (int k = branching_; k >= 1; --k) stack.push_back(node.with_child(k));
    }
    vertices_.push_back(std::move(node));
  }
  index_.reserve(vertices_.size());
  for (std::size_t i = 0; i < vertices_.size(); ++i) index_.emplace(vertices_[i], i);
}

std::size_t TreeSpace::count_vertices(int branching, int depth) {
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::size_t total = 0;
  std::size_t layer = 1;
  for (int k = 0; k <= depth; ++k) {
    if (total > kMax - layer) return kMax;
    total += layer;
    if (k < depth) {
      if (layer > kMax / static_cast<std::size_t>(branching)) return kMax;
      layer *= static_cast<std::size_t>(branching);
    }
  }
  return total;
}

std::optional<std::size_t> TreeSpace::index_of(const TreeNode& node) const {
  const auto it = index_.find(node);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool TreeSpace::contains(const TreeNode& node) const noexcept {
  if (node.level() > depth_) return false;
  int previous = 0;
  for (int e : node.elements()) {
    if (e - previous < 1 || e - previous > branching_) return false;
    previous = e;
  }
  return true;
}

std::vector<TreeNode> TreeSpace::children(const TreeNode& node) const {
  std::vector<TreeNode> out;
  if (node.level() >= depth_) return out;
  out.reserve(static_cast<std::size_t>(branching_));
  for (int k = 1; k <= branching_; ++k) out.push_back(node.with_child(k));
  return out;
}

std::vector<TreeNode> tree_children(const TreeNode& node, const TreeSpace& space) {
  return space.children(node);
}

std::string TreeSpace::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& v : vertices_) {
    out.push_back({{"elements", v.elements()}, {"level", v.level()}});
  }
  return out.dump();
}

}  // namespace laakso_lab
