#include "laakso_lab/laakso_graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "laakso_lab/error.hpp"
#include "laakso_lab/tree_space.hpp"

namespace laakso_lab {

std::string VertexId::label() const {
  std::ostringstream out;
  out << level << ':';
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out << '.';
    out << word[i];
  }
  return out.str();
}

VertexId VertexId::parse(const std::string& label) {
  const auto colon = label.find(':');
  if (colon == std::string::npos || colon == 0) throw ParseError("vertex label needs 'level:word': " + label);
  VertexId v;
  try {
    std::size_t used = 0;
    v.level = std::stoi(label.substr(0, colon), &used);
    if (used != colon) throw ParseError("bad vertex level in " + label);
    std::string rest = label.substr(colon + 1);
    std::size_t start = 0;
    while (start < rest.size()) {
      auto dot = rest.find('.', start);
      if (dot == std::string::npos) dot = rest.size();
      const std::string token = rest.substr(start, dot - start);
      v.word.push_back(std::stoi(token, &used));
      if (used != token.size()) throw ParseError("bad vertex word in " + label);
      start = dot + 1;
    }
  } catch (const std::logic_error&) {
    throw ParseError("bad vertex label: " + label);
  }
  return v;
}

LaaksoLimits LaaksoLimits::from_env() {
  LaaksoLimits limits;
  const std::size_t sentinel = std::numeric_limits<std::size_t>::max();
  if (const std::size_t cap = max_vertices_from_env(sentinel); cap != sentinel) limits.max_vertices = cap;
  return limits;
}

std::int64_t pow3(int exponent) {
  std::int64_t value = 1;
  for (int i = 0; i < exponent; ++i) value *= 3;
  return value;
}

std::size_t laakso_vertex_count(int scale, int branching) {
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  const auto b = static_cast<std::size_t>(branching);
  std::size_t v = b + 3;
  for (int k = 1; k < scale; ++k) {
    if (v - 2 > (kMax - (b + 3)) / (2 * b + 1)) return kMax;
    v = (2 * b + 1) * (v - 2) + (b + 3);
  }
  return v;
}

namespace {

struct RawGraph {
  std::vector<VertexId> vertices;
  std::vector<std::pair<VertexId, VertexId>> edges;
};

// One step of the recursive construction: glue 2b+1 copies of `inner`
// (diameter `d`) onto the G_1 skeleton.
RawGraph substitute(const RawGraph& inner, int d, int b) {
  const VertexId root{0, {}};
  const VertexId v1{d, {}};
  const VertexId sink{3 * d, {}};
  auto w = [&](int k) { return VertexId{2 * d, {k}}; };

  RawGraph out;
  out.vertices.push_back(root);
  out.vertices.push_back(v1);
  for (int k = 1; k <= b; ++k) out.vertices.push_back(w(k));
  out.vertices.push_back(sink);

  // copy of `inner` on the skeleton edge top -> bottom at level offset
  // `offset`; `branch` is 0 for the root edge, else the index k.
  auto place = [&](const VertexId& top, const VertexId& bottom, int offset, int branch) {
    auto map = [&](const VertexId& local) {
      if (local.level == 0) return top;
      if (local.level == d) return bottom;
      VertexId global{offset + local.level, {}};
      if (branch > 0) global.word.push_back(branch);
      global.word.insert(global.word.end(), local.word.begin(), local.word.end());
      return global;
    };
    for (const auto& v : inner.vertices) {
      if (v.level != 0 && v.level != d) out.vertices.push_back(map(v));
    }
    for (const auto& [a, c] : inner.edges) out.edges.emplace_back(map(a), map(c));
  };

  place(root, v1, 0, 0);
  for (int k = 1; k <= b; ++k) place(v1, w(k), d, k);
  for (int k = 1; k <= b; ++k) place(w(k), sink, 2 * d, k);
  return out;
}

enum class Skel { kRoot, kV1, kW, kSink };

struct SkelNode {
  Skel kind;
  int branch = 0;  // only for kW
  friend bool operator==(const SkelNode&, const SkelNode&) = default;
};

int skel_level(const SkelNode& s) {
  switch (s.kind) {
    case Skel::kRoot: return 0;
    case Skel::kV1: return 1;
    case Skel::kW: return 2;
    case Skel::kSink: return 3;
  }
  return 0;
}

// Distances in the G_1 skeleton with unit edges.
int skel_distance(const SkelNode& a, const SkelNode& c) {
  if (a == c) return 0;
  if (a.kind == Skel::kW && c.kind == Skel::kW) return 2;
  return std::abs(skel_level(a) - skel_level(c));
}

// Position of a vertex relative to the top-level skeleton of a copy.
struct Part {
  bool on_skeleton = false;
  SkelNode node{Skel::kRoot};
  int edge = 0;    // 0: root->v1, 1: v1->w_k, 2: w_k->sink
  int branch = 0;  // k for edges 1 and 2
  int local_level = 0;
  std::size_t next_pos = 0;  // word position for the sub-copy
};

Part decompose(int level, const std::vector<int>& word, std::size_t pos, int sub_diameter) {
  Part p;
  const int top = level / sub_diameter;
  const int rest = level % sub_diameter;
  auto branch_at = [&](std::size_t i) {
    if (i >= word.size()) throw UnknownVertexError("vertex address is too short");
    return word[i];
  };
  if (rest == 0) {
    p.on_skeleton = true;
    switch (top) {
      case 0: p.node = {Skel::kRoot}; break;
      case 1: p.node = {Skel::kV1}; break;
      case 2: p.node = {Skel::kW, branch_at(pos)}; break;
      default: p.node = {Skel::kSink}; break;
    }
    return p;
  }
  p.edge = top;
  p.local_level = rest;
  if (top == 0) {
    p.next_pos = pos;
  } else {
    p.branch = branch_at(pos);
    p.next_pos = pos + 1;
  }
  return p;
}

struct Portal {
  SkelNode node;
  int cost;
};

std::vector<Portal> portals(const Part& p, int sub_diameter) {
  if (p.on_skeleton) return {{p.node, 0}};
  SkelNode top;
  SkelNode bottom;
  switch (p.edge) {
    case 0: top = {Skel::kRoot}; bottom = {Skel::kV1}; break;
    case 1: top = {Skel::kV1}; bottom = {Skel::kW, p.branch}; break;
    default: top = {Skel::kW, p.branch}; bottom = {Skel::kSink}; break;
  }
  return {{top, p.local_level}, {bottom, sub_diameter - p.local_level}};
}

}  // namespace

LaaksoGraph build_laakso(int scale, int branching, const LaaksoLimits& limits) {
  if (scale < 1) throw DomainError("Laakso scale must be at least 1");
  if (branching < 2) throw DomainError("Laakso branching must be at least 2");
  if (limits.max_vertices) {
    if (laakso_vertex_count(scale, branching) > *limits.max_vertices) {
      throw CapacityError("G_" + std::to_string(scale) + " with b=" + std::to_string(branching) +
                          " exceeds the vertex cap of " + std::to_string(*limits.max_vertices));
    }
  } else if (scale > limits.max_scale || branching > limits.max_branching) {
    throw CapacityError("G_n bounds exceeded: n <= " + std::to_string(limits.max_scale) +
                        ", b <= " + std::to_string(limits.max_branching));
  }

  RawGraph raw{{{0, {}}, {1, {}}}, {{{0, {}}, {1, {}}}}};  // G_0: a single edge
  int d = 1;
  for (int m = 1; m <= scale; ++m) {
    raw = substitute(raw, d, branching);
    d *= 3;
  }

  LaaksoGraph g;
  g.scale_ = scale;
  g.branching_ = branching;
  g.diameter_ = d;
  g.vertices_ = std::move(raw.vertices);
  std::sort(g.vertices_.begin(), g.vertices_.end());
  for (std::size_t i = 0; i < g.vertices_.size(); ++i) g.index_.emplace(g.vertices_[i], i);
  g.adjacency_.assign(g.vertices_.size(), {});
  for (const auto& [a, c] : raw.edges) {
    const std::size_t i = g.index_.at(a);
    const std::size_t j = g.index_.at(c);
    g.adjacency_[i].push_back(j);
    g.adjacency_[j].push_back(i);
  }
  g.children_.assign(g.vertices_.size(), {});
  for (std::size_t i = 0; i < g.vertices_.size(); ++i) {
    auto& adj = g.adjacency_[i];
    std::sort(adj.begin(), adj.end());
    for (std::size_t j : adj) {
      if (g.vertices_[j].level == g.vertices_[i].level + 1) g.children_[i].push_back(j);
    }
    // index order is (level, word) order, which is fraternal order
  }
  return g;
}

std::size_t LaaksoGraph::edge_count() const noexcept {
  std::size_t twice = 0;
  for (const auto& adj : adjacency_) twice += adj.size();
  return twice / 2;
}

std::optional<std::size_t> LaaksoGraph::index_of(const VertexId& v) const {
  const auto it = index_.find(v);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t LaaksoGraph::require(const VertexId& v) const {
  const auto index = index_of(v);
  if (!index) throw UnknownVertexError("vertex " + v.label() + " is not in G_" + std::to_string(scale_));
  return *index;
}

int LaaksoGraph::level(const VertexId& v) const { return vertices_[require(v)].level; }

bool LaaksoGraph::is_branching(const VertexId& v) const { return children_[require(v)].size() > 1; }

std::vector<VertexId> LaaksoGraph::children(const VertexId& v) const {
  std::vector<VertexId> out;
  for (std::size_t j : children_[require(v)]) out.push_back(vertices_[j]);
  return out;
}

int LaaksoGraph::fraternal_index(const VertexId& parent, const VertexId& child) const {
  const auto& kids = children_[require(parent)];
  const std::size_t c = require(child);
  const auto it = std::find(kids.begin(), kids.end(), c);
  if (it == kids.end()) {
    throw RelationError(child.label() + " is not an immediate descendant of " + parent.label());
  }
  return static_cast<int>(it - kids.begin()) + 1;
}

bool LaaksoGraph::is_ancestor(const VertexId& u, const VertexId& v) const {
  return u.level <= v.level && distance(u, v) == v.level - u.level;
}

int LaaksoGraph::distance(std::size_t u, std::size_t v) const { return distance(vertices_.at(u), vertices_.at(v)); }

int LaaksoGraph::distance(const VertexId& u, const VertexId& v) const {
  require(u);
  require(v);
  int lu = u.level;
  int lv = v.level;
  std::size_t pu = 0;
  std::size_t pv = 0;
  // Sub-copies are only entered through their two terminals, and any detour
  // leaving a copy costs at least its diameter twice, so two vertices in the
  // same copy are at their intrinsic distance.
  for (int m = scale_; m >= 1; --m) {
    const int sub = static_cast<int>(pow3(m - 1));
    const Part a = decompose(lu, u.word, pu, sub);
    const Part b = decompose(lv, v.word, pv, sub);
    if (!a.on_skeleton && !b.on_skeleton && a.edge == b.edge && a.branch == b.branch) {
      lu = a.local_level;
      lv = b.local_level;
      pu = a.next_pos;
      pv = b.next_pos;
      continue;
    }
    int best = std::numeric_limits<int>::max();
    for (const Portal& x : portals(a, sub)) {
      for (const Portal& y : portals(b, sub)) {
        best = std::min(best, x.cost + sub * skel_distance(x.node, y.node) + y.cost);
      }
    }
    return best;
  }
  return 0;  // scale 0 copies are single edges; equal addresses end here
}

std::vector<int> LaaksoGraph::bfs_from(std::size_t source) const {
  std::vector<int> dist(vertices_.size(), -1);
  std::deque<std::size_t> queue{source};
  dist.at(source) = 0;
  while (!queue.empty()) {
    const std::size_t x = queue.front();
    queue.pop_front();
    for (std::size_t y : adjacency_[x]) {
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
    }
  }
  return dist;
}

int LaaksoGraph::distance_oracle(const VertexId& u, const VertexId& v) const {
  return bfs_from(require(u))[require(v)];
}

std::vector<VertexId> LaaksoGraph::downward_path(const VertexId& from, const VertexId& to) const {
  if (!is_ancestor(from, to)) {
    throw RelationError(from.label() + " is not an ancestor of " + to.label());
  }
  std::vector<VertexId> path{from};
  std::size_t current = require(from);
  while (vertices_[current].level < to.level) {
    bool advanced = false;
    for (std::size_t c : children_[current]) {
      if (is_ancestor(vertices_[c], to)) {
        current = c;
        advanced = true;
        break;
      }
    }
    if (!advanced) throw RelationError("no descending step towards " + to.label());
    path.push_back(vertices_[current]);
  }
  return path;
}

std::string LaaksoGraph::to_dot() const {
  std::ostringstream out;
  out << "graph G" << scale_ << "_b" << branching_ << " {\n";
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    out << "  n" << i << " [label=\"" << vertices_[i].label() << "\"];\n";
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    for (std::size_t j : adjacency_[i]) {
      if (i < j) out << "  n" << i << " -- n" << j << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

std::string LaaksoGraph::to_json() const {
  nlohmann::json vertices = nlohmann::json::array();
  for (const auto& v : vertices_) vertices.push_back({{"id", v.label()}, {"level", v.level}});
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    for (std::size_t j : adjacency_[i]) {
      if (i < j) edges.push_back({vertices_[i].label(), vertices_[j].label()});
    }
  }
  nlohmann::json out{{"n", scale_}, {"b", branching_}, {"vertices", vertices}, {"edges", edges}};
  return out.dump();
}

}  // namespace laakso_lab
