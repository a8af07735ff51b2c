#pragma once

// Truncated countably-branching tree T_{b,d}.
//
// A node is a strictly increasing list of positive integers; the root is the
// empty list. The children of J are J + {max(J) + k} for k = 1..b, so every
// node above depth d has exactly b children and the k-th child carries
// fraternal index k. The metric is the shortest-path metric of the tree.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace laakso_lab {

class TreeNode {
 public:
  TreeNode() = default;
  TreeNode(std::initializer_list<int> elements);
  explicit TreeNode(std::vector<int> elements);

  const std::vector<int>& elements() const noexcept { return elements_; }
  int level() const noexcept { return static_cast<int>(elements_.size()); }
  bool is_root() const noexcept { return elements_.empty(); }
  // 0 for the root.
  int max_element() const noexcept { return elements_.empty() ? 0 : elements_.back(); }
  int min_element() const noexcept { return elements_.empty() ? 0 : elements_.front(); }

  // Offset of the last element over its predecessor; this is the fraternal
  // index of the node among its siblings. Undefined for the root.
  int last_offset() const;

  TreeNode with_child(int offset) const;
  bool is_prefix_of(const TreeNode& other) const noexcept;

  std::string to_string() const;

  friend auto operator<=>(const TreeNode&, const TreeNode&) = default;
  friend bool operator==(const TreeNode&, const TreeNode&) = default;

 private:
  std::vector<int> elements_;
};

struct TreeNodeHash {
  std::size_t operator()(const TreeNode& node) const noexcept;
};

std::optional<TreeNode> tree_parent(const TreeNode& node);
TreeNode tree_lcp(const TreeNode& a, const TreeNode& b);
int tree_distance(const TreeNode& a, const TreeNode& b);

class TreeSpace {
 public:
  // Default cap on the number of enumerated vertices.
  static constexpr std::size_t kDefaultMaxVertices = std::size_t{1} << 20;

  // Throws CapacityError when the vertex count exceeds max_vertices
  // (LAAKSO_LAB_MAX_VERTICES overrides the default).
  TreeSpace(int branching, int depth);
  TreeSpace(int branching, int depth, std::size_t max_vertices);

  int branching() const noexcept { return branching_; }
  int depth() const noexcept { return depth_; }

  // Sum_{k=0..d} b^k, saturating at SIZE_MAX.
  static std::size_t count_vertices(int branching, int depth);

  // Vertices in lexicographic order of their element lists.
  std::span<const TreeNode> vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  const TreeNode& vertex(std::size_t index) const { return vertices_.at(index); }
  std::optional<std::size_t> index_of(const TreeNode& node) const;

  bool contains(const TreeNode& node) const noexcept;
  std::vector<TreeNode> children(const TreeNode& node) const;

  // Array of {"elements": [...], "level": k}, lexicographic order.
  std::string to_json() const;

 private:
  int branching_;
  int depth_;
  std::vector<TreeNode> vertices_;
  std::unordered_map<TreeNode, std::size_t, TreeNodeHash> index_;
};

// Children of J in T_{b,d}; empty once level(J) == depth.
std::vector<TreeNode> tree_children(const TreeNode& node, const TreeSpace& space);

// Max vertex count honoring LAAKSO_LAB_MAX_VERTICES, or `fallback`.
std::size_t max_vertices_from_env(std::size_t fallback);

}  // namespace laakso_lab
