#pragma once

// Truncated Laakso-variant graphs G_n with finite branching b.
//
// G_1: root -> v1 -> {w_1, ..., w_b} -> sink (diameter 3).
// G_{n+1}: take the G_1 skeleton and replace each of its 2b+1 edges by a copy
// of G_n, gluing the copy's root to the parent endpoint and its sink to the
// child endpoint. Edge lengths stay 1, so diam(G_n) = 3^n.
//
// Addressing. A vertex is (level, word). Reading the level in base 3 from the
// coarsest scale down, each scale either fixes the vertex as a skeleton vertex
// of the current copy or descends into one of the 2b+1 edge copies. A branch
// index 1..b is appended to the word whenever the choice is not forced: inside
// a v1 -> w_k copy, inside a w_k -> sink copy, or at w_k itself. Every vertex
// has exactly one address, and the first 3^n generations of G_{n+1} carry the
// same addresses as G_n.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace laakso_lab {

struct VertexId {
  int level = 0;
  std::vector<int> word;

  std::string label() const;  // "level:k1.k2..."
  static VertexId parse(const std::string& label);

  friend auto operator<=>(const VertexId&, const VertexId&) = default;
  friend bool operator==(const VertexId&, const VertexId&) = default;
};

struct LaaksoLimits {
  int max_scale = 4;
  int max_branching = 8;
  // When set (LAAKSO_LAB_MAX_VERTICES), replaces the scale/branching caps with
  // a cap on the vertex count.
  std::optional<std::size_t> max_vertices;

  static LaaksoLimits from_env();
};

// V_1 = b + 3, V_{k+1} = (2b + 1)(V_k - 2) + (b + 3).
std::size_t laakso_vertex_count(int scale, int branching);
std::int64_t pow3(int exponent);

class LaaksoGraph {
 public:
  int scale() const noexcept { return scale_; }
  int branching() const noexcept { return branching_; }
  int diameter() const noexcept { return diameter_; }

  std::size_t size() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept;
  // Sorted by (level, word).
  std::span<const VertexId> vertices() const noexcept { return vertices_; }
  const VertexId& vertex(std::size_t index) const { return vertices_.at(index); }
  std::optional<std::size_t> index_of(const VertexId& v) const;
  bool contains(const VertexId& v) const { return index_of(v).has_value(); }

  const VertexId& root() const { return vertices_.front(); }
  const VertexId& sink() const { return vertices_.back(); }

  // Unit-edge adjacency by index; neighbor lists are sorted.
  std::span<const std::size_t> neighbors(std::size_t index) const { return adjacency_.at(index); }
  // Immediate descendants in fraternal order.
  std::span<const std::size_t> children_of(std::size_t index) const { return children_.at(index); }

  int level(const VertexId& v) const;
  bool is_branching(const VertexId& v) const;
  std::vector<VertexId> children(const VertexId& v) const;
  // 1-based position of `child` among the immediate descendants of `parent`.
  // Throws RelationError when `child` is not an immediate descendant.
  int fraternal_index(const VertexId& parent, const VertexId& child) const;

  bool is_ancestor(const VertexId& u, const VertexId& v) const;
  // Series-parallel recursion on the addresses; O(scale) per query.
  int distance(const VertexId& u, const VertexId& v) const;
  int distance(std::size_t u, std::size_t v) const;
  // Unit-weight BFS on the explicit adjacency.
  int distance_oracle(const VertexId& u, const VertexId& v) const;
  std::vector<int> bfs_from(std::size_t source) const;

  // Deterministic geodesic from `from` down to `to`, taking the lowest
  // fraternal index at every branching vertex.
  std::vector<VertexId> downward_path(const VertexId& from, const VertexId& to) const;

  std::string to_dot() const;
  std::string to_json() const;

 private:
  friend LaaksoGraph build_laakso(int scale, int branching, const LaaksoLimits& limits);

  std::size_t require(const VertexId& v) const;

  int scale_ = 0;
  int branching_ = 0;
  int diameter_ = 0;
  std::vector<VertexId> vertices_;
  std::map<VertexId, std::size_t> index_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<std::vector<std::size_t>> children_;
};

// Throws CapacityError when (scale, branching) exceed `limits`, DomainError
// when scale < 1 or branching < 2.
LaaksoGraph build_laakso(int scale, int branching, const LaaksoLimits& limits = LaaksoLimits::from_env());

}  // namespace laakso_lab
