#pragma once

// Independent reference constructions used only by the tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <queue>
#include <utility>
#include <vector>

#include "laakso_lab/quotient_analysis.hpp"
#include "laakso_lab/tree_space.hpp"

namespace oracle {

using Adjacency = std::vector<std::vector<std::size_t>>;

inline std::vector<int> bfs(const Adjacency& adj, std::size_t source) {
  std::vector<int> dist(adj.size(), -1);
  std::queue<std::size_t> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const auto x = q.front();
    q.pop();
    for (auto y : adj[x]) {
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        q.push(y);
      }
    }
  }
  return dist;
}

// Plain edge-substitution build with integer vertex ids: 0 is the root and
// 1 the sink. Edges are directed downward.
struct PlainGraph {
  std::size_t vertices = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  Adjacency adjacency() const {
    Adjacency adj(vertices);
    for (auto [a, b] : edges) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    return adj;
  }
};

inline PlainGraph plain_laakso(int n, int b) {
  PlainGraph g{2, {{0, 1}}};
  for (int step = 0; step < n; ++step) {
    // skeleton: 0 root, 1 sink, 2 v1, 3.. w_k
    PlainGraph next{static_cast<std::size_t>(3 + b), {}};
    auto glue = [&](std::size_t top, std::size_t bottom) {
      std::vector<std::size_t> map(g.vertices);
      map[0] = top;
      map[1] = bottom;
      for (std::size_t v = 2; v < g.vertices; ++v) map[v] = next.vertices++;
      for (auto [a, c] : g.edges) next.edges.emplace_back(map[a], map[c]);
    };
    glue(0, 2);
    for (int k = 0; k < b; ++k) glue(2, static_cast<std::size_t>(3 + k));
    for (int k = 0; k < b; ++k) glue(static_cast<std::size_t>(3 + k), 1);
    g = std::move(next);
  }
  return g;
}

// Tree T_{b,d} built breadth-first from offsets, independent of TreeSpace.
struct PlainTree {
  std::vector<std::vector<int>> nodes;
  Adjacency adj;
};

inline PlainTree plain_tree(int b, int d) {
  PlainTree t;
  t.nodes.push_back({});
  t.adj.emplace_back();
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    if (static_cast<int>(t.nodes[i].size()) == d) continue;
    const int base = t.nodes[i].empty() ? 0 : t.nodes[i].back();
    for (int k = 1; k <= b; ++k) {
      auto child = t.nodes[i];
      child.push_back(base + k);
      t.nodes.push_back(child);
      t.adj.emplace_back();
      t.adj[i].push_back(t.nodes.size() - 1);
      t.adj.back().push_back(i);
    }
  }
  return t;
}

inline laakso_lab::FiniteMetricSpace path_space(std::size_t n, bool ordered = true) {
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::abs(double(i) - double(j));
  }
  laakso_lab::FiniteMetricSpace s(n, d);
  if (ordered) {
    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) order.emplace_back(i, j);
    }
    s.set_order(order);
  }
  return s;
}

inline laakso_lab::MetricMapTable floor_map(std::size_t n, std::size_t k) {
  std::vector<std::size_t> assign;
  for (std::size_t i = 0; i < n; ++i) assign.push_back(i / k);
  return laakso_lab::MetricMapTable(path_space(n), path_space((n - 1) / k + 1), assign);
}

// The ATD predicate evaluated straight from its quantifiers: for each related
// pair and each test radius R >= delta, d(f(s), nu) < cR must imply a
// preimage of nu within R of s. Radii are the realized source distances at
// or above delta, delta itself, and points just below each of them.
inline bool atd_predicate(const laakso_lab::MetricMapTable& m, double c, double delta) {
  const auto& S = m.source();
  const auto& T = m.target();
  std::vector<double> radii{delta};
  for (double x : S.realized_distances()) {
    if (x >= delta) radii.push_back(x);
    if (x - 1e-7 >= delta) radii.push_back(x - 1e-7);
  }
  for (std::size_t s = 0; s < S.size(); ++s) {
    for (std::size_t nu = 0; nu < T.size(); ++nu) {
      if (!T.before(m(s), nu)) continue;
      const double D = T(m(s), nu);
      for (double R : radii) {
        if (!(D < c * R)) continue;
        bool found = false;
        for (std::size_t x : m.fiber(nu)) found = found || S(s, x) <= R;
        if (!found) return false;
      }
    }
  }
  return true;
}

}  // namespace oracle
