#include "laakso_lab/tree_to_laakso.hpp"

#include <algorithm>
#include <random>
#include <set>

#include <json.hpp>

#include "laakso_lab/error.hpp"

namespace laakso_lab {

using nlohmann::json;

PhiMap::PhiMap(LaaksoGraph target, std::optional<PhiFault> fault)
    : target_(std::move(target)), fault_(std::move(fault)) {}

std::size_t PhiMap::phi_index(const TreeNode& node) const {
  if (node.level() > depth()) {
    throw DomainError("tree node " + node.to_string() + " is deeper than 3^n = " + std::to_string(depth()));
  }
  std::size_t current = 0;  // root
  std::vector<int> prefix;
  int previous = 0;
  for (int e : node.elements()) {
    int offset = e - previous;
    if (offset < 1 || offset > branching()) {
      throw DomainError("tree node " + node.to_string() + " is not in T_{" + std::to_string(branching()) + "," +
                        std::to_string(depth()) + "}");
    }
    const auto kids = target_.children_of(current);
    if (kids.size() == 1) {
      current = kids[0];
    } else {
      if (fault_ && fault_->node.elements() == prefix && kids.size() >= 2 && offset <= 2) offset = 3 - offset;
      current = kids[static_cast<std::size_t>(offset - 1)];
    }
    prefix.push_back(e);
    previous = e;
  }
  return current;
}

VertexId PhiMap::phi(const TreeNode& node) const { return target_.vertex(phi_index(node)); }

std::vector<std::size_t> PhiMap::phi_table(const TreeSpace& source) const {
  if (source.depth() > depth() || source.branching() > branching()) {
    throw DomainError("source tree does not fit inside the domain of phi");
  }
  std::vector<std::size_t> out;
  out.reserve(source.size());
  for (const auto& node : source.vertices()) out.push_back(phi_index(node));
  return out;
}

TreeNode PhiMap::lift(const TreeNode& from, const VertexId& to) const {
  const VertexId start = phi(from);
  const auto path = target_.downward_path(start, to);
  TreeNode out = from;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const VertexId& parent = path[i - 1];
    const int offset = target_.is_branching(parent) ? target_.fraternal_index(parent, path[i]) : 1;
    out = out.with_child(offset);
  }
  return out;
}

namespace {

// Strict descendants of `index`, sorted.
std::vector<std::size_t> descendants(const LaaksoGraph& g, std::size_t index) {
  std::set<std::size_t> seen;
  std::vector<std::size_t> stack{index};
  while (!stack.empty()) {
    const std::size_t x = stack.back();
    stack.pop_back();
    for (std::size_t c : g.children_of(x)) {
      if (seen.insert(c).second) stack.push_back(c);
    }
  }
  return {seen.begin(), seen.end()};
}

std::vector<std::size_t> descendants_at_depth(const LaaksoGraph& g, std::size_t index, int depth) {
  std::vector<std::size_t> layer{index};
  for (int step = 0; step < depth; ++step) {
    std::set<std::size_t> next;
    for (std::size_t x : layer) next.insert(g.children_of(x).begin(), g.children_of(x).end());
    layer.assign(next.begin(), next.end());
  }
  return layer;
}

class DistanceCache {
 public:
  explicit DistanceCache(const LaaksoGraph& g) : g_(g) {
    constexpr std::size_t kMatrixLimit = 4096;
    if (g.size() <= kMatrixLimit) {
      matrix_.resize(g.size() * g.size());
      for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) matrix_[i * g.size() + j] = g.distance(i, j);
      }
    }
  }
  int operator()(std::size_t i, std::size_t j) const {
    return matrix_.empty() ? g_.distance(i, j) : matrix_[i * g_.size() + j];
  }

 private:
  const LaaksoGraph& g_;
  std::vector<int> matrix_;
};

class Collector {
 public:
  Collector(Lemma24Report& report, std::size_t limit) : report_(report), limit_(limit) {}
  void add(PhiCounterexample cx) {
    if (count_[cx.check]++ < limit_) report_.counterexamples.push_back(std::move(cx));
  }

 private:
  Lemma24Report& report_;
  std::size_t limit_;
  std::map<std::string, std::size_t> count_;
};

std::string describe_lift(const PhiMap& phi, const TreeNode& from, const VertexId& to, const TreeNode& lifted,
                          int target_gap) {
  return "lift " + lifted.to_string() + " has phi = " + phi.phi(lifted).label() + ", tree distance " +
         std::to_string(tree_distance(from, lifted)) + ", graph distance " + std::to_string(target_gap) + " to " +
         to.label();
}

// Empty string when the lift is exact, else a description of the failure.
std::string lift_failure(const PhiMap& phi, const TreeNode& from, const VertexId& to) {
  try {
    const int gap = phi.target().distance(phi.phi(from), to);
    const TreeNode lifted = phi.lift(from, to);
    if (!from.is_prefix_of(lifted) || tree_distance(from, lifted) != gap || phi.phi(lifted) != to) {
      return describe_lift(phi, from, to, lifted, gap);
    }
    return {};
  } catch (const Error& e) {
    return e.what();
  }
}

}  // namespace

Lemma24Report verify_lemma_2_4(const PhiMap& phi, const PhiVerifyOptions& options) {
  const LaaksoGraph& g = phi.target();
  const TreeSpace source(phi.branching(), phi.depth());
  const auto image = phi.phi_table(source);
  const DistanceCache dm(g);

  Lemma24Report report;
  Collector collect(report, options.max_counterexamples);
  report.tree_vertices = source.size();
  report.target_vertices = g.size();
  using Coverage = PhiVerifyOptions::Coverage;
  report.exhaustive = options.coverage == Coverage::kExhaustive ||
                      (options.coverage == Coverage::kAuto && source.size() <= options.exhaustive_limit);
  std::mt19937_64 rng(options.seed);

  // (1) surjective, level preserving
  std::vector<std::vector<std::size_t>> fibers(g.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    fibers[image[i]].push_back(i);
    if (g.vertex(image[i]).level != source.vertex(i).level()) {
      report.levels_preserved = false;
      collect.add({"level", source.vertex(i), std::nullopt, g.vertex(image[i]), "phi changes the level"});
    }
  }
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (fibers[v].empty()) {
      report.surjective = false;
      collect.add({"surjective", TreeNode{}, std::nullopt, g.vertex(v), "vertex has no preimage"});
    }
  }

  // (2) 1-Lipschitz
  auto check_pair = [&](std::size_t i, std::size_t j) {
    const TreeNode& a = source.vertex(i);
    const TreeNode& b = source.vertex(j);
    const bool comparable = a.is_prefix_of(b) || b.is_prefix_of(a);
    ++(comparable ? report.comparable_pairs : report.incomparable_pairs);
    const int dt = tree_distance(a, b);
    const int d = dm(image[i], image[j]);
    if (d > dt) {
      report.lipschitz = false;
      collect.add({"lipschitz", a, b, std::nullopt,
                   "graph distance " + std::to_string(d) + " exceeds tree distance " + std::to_string(dt)});
    }
  };
  if (report.exhaustive) {
    for (std::size_t i = 0; i < source.size(); ++i) {
      for (std::size_t j = i + 1; j < source.size(); ++j) check_pair(i, j);
    }
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, source.size() - 1);
    for (std::size_t i = 0; i < source.size(); ++i) {
      for (std::size_t s = 0; s < options.samples; ++s) {
        const std::size_t j = pick(rng);
        if (j != i) check_pair(i, j);
      }
    }
  }

  // (3) exact lifting from every (sampled) preimage
  std::vector<std::size_t> chosen;
  for (std::size_t mu = 0; mu < g.size(); ++mu) {
    const auto below = descendants(g, mu);
    if (below.empty()) continue;
    report.target_comparable_pairs += below.size();
    chosen = fibers[mu];
    if (!report.exhaustive && chosen.size() > options.samples) {
      std::vector<std::size_t> sample;
      std::sample(fibers[mu].begin(), fibers[mu].end(), std::back_inserter(sample), options.samples, rng);
      chosen = std::move(sample);
    }
    for (std::size_t nu : below) {
      for (std::size_t i : chosen) {
        ++report.lifts_checked;
        const std::string failure = lift_failure(phi, source.vertex(i), g.vertex(nu));
        if (!failure.empty()) {
          report.atd_colipschitz = false;
          collect.add({"lift", source.vertex(i), std::nullopt, g.vertex(nu), failure});
        }
      }
    }
  }
  return report;
}

std::string counterexample_to_json(const PhiCounterexample& cx) {
  json out{{"check", cx.check}, {"source", cx.source.elements()}, {"detail", cx.detail}};
  if (cx.other) out["other"] = cx.other->elements();
  if (cx.target) out["target"] = cx.target->label();
  return out.dump();
}

PhiCounterexample counterexample_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    PhiCounterexample cx;
    cx.check = j.at("check").get<std::string>();
    cx.source = TreeNode(j.value("source", std::vector<int>{}));
    if (j.contains("other")) cx.other = TreeNode(j.at("other").get<std::vector<int>>());
    if (j.contains("target")) cx.target = VertexId::parse(j.at("target").get<std::string>());
    cx.detail = j.value("detail", "");
    return cx;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad counterexample: ") + e.what());
  } catch (const DomainError& e) {
    throw ParseError(std::string("bad counterexample: ") + e.what());
  }
}

bool replay_counterexample(const PhiMap& phi, const PhiCounterexample& cx) {
  const LaaksoGraph& g = phi.target();
  if (cx.check == "level") return phi.phi(cx.source).level == cx.source.level();
  if (cx.check == "lipschitz") {
    if (!cx.other) throw ParseError("lipschitz counterexample needs 'other'");
    return g.distance(phi.phi(cx.source), phi.phi(*cx.other)) <= tree_distance(cx.source, *cx.other);
  }
  if (cx.check == "lift") {
    if (!cx.target) throw ParseError("lift counterexample needs 'target'");
    return lift_failure(phi, cx.source, *cx.target).empty();
  }
  if (cx.check == "surjective") {
    if (!cx.target) throw ParseError("surjective counterexample needs 'target'");
    const TreeSpace source(phi.branching(), phi.depth());
    const std::size_t v = g.index_of(*cx.target).value_or(g.size());
    const auto image = phi.phi_table(source);
    return std::find(image.begin(), image.end(), v) != image.end();
  }
  throw ParseError("unknown check '" + cx.check + "'");
}

std::string lemma_2_4_report_to_json(const Lemma24Report& r) {
  json cxs = json::array();
  for (const auto& cx : r.counterexamples) cxs.push_back(json::parse(counterexample_to_json(cx)));
  json out{{"schema", 1},
           {"passed", r.passed()},
           {"surjective", r.surjective},
           {"levels_preserved", r.levels_preserved},
           {"lipschitz", r.lipschitz},
           {"atd_colipschitz", r.atd_colipschitz},
           {"exhaustive", r.exhaustive},
           {"tree_vertices", r.tree_vertices},
           {"target_vertices", r.target_vertices},
           {"comparable_pairs", r.comparable_pairs},
           {"incomparable_pairs", r.incomparable_pairs},
           {"target_comparable_pairs", r.target_comparable_pairs},
           {"lifts_checked", r.lifts_checked},
           {"counterexamples", cxs}};
  return out.dump();
}

MetricMapTable phi_map_table(const PhiMap& phi, const TreeSpace& source) {
  const LaaksoGraph& g = phi.target();
  const auto image = phi.phi_table(source);
  const std::size_t n = source.size();
  std::vector<double> ds(n * n);
  std::vector<std::pair<std::size_t, std::size_t>> source_order;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      ds[i * n + j] = tree_distance(source.vertex(i), source.vertex(j));
      if (i != j && source.vertex(i).is_prefix_of(source.vertex(j))) source_order.emplace_back(i, j);
    }
  }
  const std::size_t v = g.size();
  std::vector<double> dt(v * v);
  std::vector<std::pair<std::size_t, std::size_t>> target_order;
  for (std::size_t i = 0; i < v; ++i) {
    for (std::size_t j = 0; j < v; ++j) dt[i * v + j] = g.distance(i, j);
    for (std::size_t j : descendants(g, i)) target_order.emplace_back(i, j);
  }
  FiniteMetricSpace s(n, std::move(ds));
  FiniteMetricSpace t(v, std::move(dt));
  s.set_order(source_order);
  t.set_order(target_order);
  return MetricMapTable(std::move(s), std::move(t), image);
}

std::optional<PhiForkWitness> fork_search_phi(const PhiMap& phi, double eps, double r_min, std::size_t max_arms,
                                              double c_inf) {
  const LaaksoGraph& g = phi.target();
  const std::size_t arm_cap = std::min<std::size_t>(max_arms, static_cast<std::size_t>(phi.branching()));
  const std::size_t min_arms = std::min<std::size_t>(2, arm_cap);
  if (arm_cap == 0 || !(c_inf > 0)) return std::nullopt;

  for (int r = 1; 2 * r <= g.diameter(); r *= 3) {
    if (r < r_min) continue;
    for (std::size_t mu0 = 0; mu0 < g.size(); ++mu0) {
      const int level = g.vertex(mu0).level;
      if (level % r != 0 || level + 2 * r > g.diameter()) continue;
      for (std::size_t mu1 : descendants_at_depth(g, mu0, r)) {
        std::vector<std::size_t> arms;
        for (std::size_t mu2 : descendants_at_depth(g, mu1, r)) {
          if (arms.size() == arm_cap) break;
          if (std::all_of(arms.begin(), arms.end(), [&](std::size_t a) { return g.distance(a, mu2) == 2 * r; })) {
            arms.push_back(mu2);
          }
        }
        if (arms.size() < min_arms) continue;

        PhiForkWitness w;
        w.r = r;
        w.eps = eps;
        w.c_inf = c_inf;
        w.mu0 = g.vertex(mu0);
        w.mu1 = g.vertex(mu1);
        w.sigma0 = phi.lift(TreeNode{}, w.mu0);
        w.sigma1 = phi.lift(w.sigma0, w.mu1);
        for (std::size_t a : arms) {
          w.mu2.push_back(g.vertex(a));
          w.sigma2.push_back(phi.lift(w.sigma1, g.vertex(a)));
        }
        if (check_fork(phi, w).ok()) return w;
      }
    }
  }
  return std::nullopt;
}

ForkCheck check_fork(const PhiMap& phi, const PhiForkWitness& w) {
  const LaaksoGraph& g = phi.target();
  ForkCheck out = check_fork(
      w, [](const TreeNode& a, const TreeNode& b) { return static_cast<double>(tree_distance(a, b)); },
      [&](const VertexId& a, const VertexId& b) { return static_cast<double>(g.distance(a, b)); });
  bool consistent = phi.phi(w.sigma0) == w.mu0 && phi.phi(w.sigma1) == w.mu1 && w.sigma2.size() == w.mu2.size();
  for (std::size_t k = 0; consistent && k < w.sigma2.size(); ++k) consistent = phi.phi(w.sigma2[k]) == w.mu2[k];
  out.target_shape = out.target_shape && consistent;
  return out;
}

std::string phi_fork_witness_to_json(const PhiForkWitness& w) {
  json mu2 = json::array();
  json sigma2 = json::array();
  for (const auto& m : w.mu2) mu2.push_back(m.label());
  for (const auto& s : w.sigma2) sigma2.push_back(s.elements());
  json out{{"schema", 1},
           {"r", w.r},
           {"eps", w.eps},
           {"c_inf", w.c_inf},
           {"mu0", w.mu0.label()},
           {"mu1", w.mu1.label()},
           {"mu2", mu2},
           {"sigma0", w.sigma0.elements()},
           {"sigma1", w.sigma1.elements()},
           {"sigma2", sigma2}};
  return out.dump();
}

}  // namespace laakso_lab
