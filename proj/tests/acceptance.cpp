// Acceptance checks. Prints one line per criterion; with an argument N, runs
// only criterion N. Exit status is 0 iff every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "laakso_lab/cli.hpp"
#include "laakso_lab/james_model.hpp"
#include "laakso_lab/laakso_graph.hpp"
#include "laakso_lab/moduli.hpp"
#include "laakso_lab/quotient_analysis.hpp"
#include "laakso_lab/tree_to_laakso.hpp"
#include "oracles.hpp"

using namespace laakso_lab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) note << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void laakso_structure(Outcome& o) {
  const auto start = std::chrono::steady_clock::now();
  std::size_t mismatches = 0;
  std::string first;
  for (int n = 1; n <= 3; ++n) {
    for (int b = 2; b <= 3; ++b) {
      const auto g = build_laakso(n, b);
      std::size_t want = b + 3;
      for (int k = 1; k < n; ++k) want = (2 * b + 1) * (want - 2) + (b + 3);
      o.require(g.size() == want, "vertex count n=" + std::to_string(n) + " b=" + std::to_string(b));
      o.require(g.diameter() == pow3(n) && g.distance(g.root(), g.sink()) == pow3(n), "diameter");
      for (const auto& v : g.vertices()) {
        const bool law = v.level % 3 == 1 && v.level < pow3(n);
        if (g.is_branching(v) != law) {
          if (mismatches++ == 0) {
            first = "n=" + std::to_string(n) + " b=" + std::to_string(b) + " level " + std::to_string(v.level) +
                    (g.is_branching(v) ? " branches" : " does not branch");
          }
        }
      }
    }
  }
  o.require(mismatches == 0, "mod-3 branching law: " + std::to_string(mismatches) + " vertices disagree, e.g. " + first);
  const double t = seconds_since(start);
  o.require(t < 5, "runtime");
  o.note << "runtime " << t << " s";
}

void distance_correctness(Outcome& o) {
  const auto start = std::chrono::steady_clock::now();
  std::size_t pairs = 0;
  for (auto [n, b] : std::vector<std::pair<int, int>>{{1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 2}}) {
    const auto g = build_laakso(n, b);
    const auto plain = oracle::plain_laakso(n, b);
    o.require(plain.vertices == g.size() && plain.edges.size() == g.edge_count(), "independent build size");
    for (std::size_t u = 0; u < g.size(); ++u) {
      const auto bfs = g.bfs_from(u);
      for (std::size_t v = 0; v < g.size(); ++v) {
        o.require(g.distance(u, v) == bfs[v], "pair " + g.vertex(u).label() + " " + g.vertex(v).label());
        ++pairs;
      }
    }
  }
  const double t = seconds_since(start);
  o.require(t < 60, "runtime");
  o.note << pairs << " pairs, runtime " << t << " s";
}

void lemma_suite(Outcome& o) {
  const PhiMap phi(build_laakso(2, 2));
  PhiVerifyOptions opts;
  opts.coverage = PhiVerifyOptions::Coverage::kExhaustive;
  const auto r = verify_lemma_2_4(phi, opts);
  o.require(r.exhaustive, "exhaustive coverage");
  o.require(r.levels_preserved, "levels");
  o.require(r.lipschitz, "1-Lipschitz");
  o.require(r.atd_colipschitz, "lift exactness");
  o.require(r.surjective, "surjective");
  o.note << r.tree_vertices << " tree vertices, " << r.lifts_checked << " lifts";
}

void atd_constants(Outcome& o) {
  const auto m = phi_map_table(PhiMap(build_laakso(2, 2)), TreeSpace(2, 9));
  const auto realized = m.source().realized_distances();
  std::size_t finite = 0;
  for (double delta : realized) {
    const double c = atd_colipschitz(m, delta);
    if (std::isinf(c)) continue;  // no pair is farther than delta
    ++finite;
    o.require(c == 1.0, "phi c_atd at delta " + std::to_string(delta));
  }
  o.require(finite > 0, "phi has finite constants");
  const auto floor3 = oracle::floor_map(10, 3);
  o.require(atd_colipschitz(floor3, 0) == 1.0 / 3.0, "floor-by-3 c_atd(0)");
  o.require(atd_colipschitz(floor3, 1e-9) == 1.0 / 3.0, "floor-by-3 c_atd(0+)");

  std::vector<MetricMapTable> maps;
  maps.push_back(m);
  maps.push_back(phi_map_table(PhiMap(build_laakso(1, 3)), TreeSpace(3, 3)));
  maps.push_back(floor3);
  maps.push_back(oracle::floor_map(8, 2));
  maps.push_back(phi_map_table(PhiMap(build_laakso(1, 2)), TreeSpace(2, 3)));
  std::size_t cells = 0;
  for (const auto& map : maps) {
    const double top = map.source().realized_distances().back();
    for (int i = 0; i < 10; ++i) {
      const double delta = top * i / 9.0;
      const double c_opt = atd_colipschitz(map, delta);
      for (int k = 0; k < 10; ++k) {
        const double c = 0.1 + 0.2 * k;
        const bool fast = check_atd_colip(map, c, delta);
        o.require(fast == (c <= c_opt) && fast == oracle::atd_predicate(map, c, delta), "grid cell");
        ++cells;
      }
    }
  }
  o.note << finite << " realized deltas, " << cells << " grid cells";
}

void fork_argument(Outcome& o) {
  const PhiMap phi(build_laakso(1, 2));
  const auto w = fork_search_phi(phi, 0, 1);
  o.require(w.has_value(), "phi fork witness");
  if (w) {
    const auto c = check_fork(phi, *w);
    o.require(c.ok(), "phi fork inequalities");
    o.require(c.max_arm == w->r && c.min_spread == w->r, "phi arms r, spread 2r");
  }
  const auto m = phi_map_table(phi, TreeSpace(2, 3));
  const auto g = fork_search(m, 0, 1);
  o.require(g.has_value(), "generic fork witness");
  if (g) {
    const auto c = check_fork(m, *g);
    o.require(c.ok(), "generic fork inequalities");
    o.require(c.max_arm == g->r && c.min_spread == g->r, "generic arms r, spread 2r");
  }
  o.require(beta_bound_from_fork(0.0) == 0.0, "beta bound at 0");
  o.require(beta_bound_from_fork(Rational(0)) == Rational(0), "exact beta bound at 0");
  o.require(beta_bound_from_fork(Rational(1, 80)) == Rational(1), "exact beta bound at 1/80");
  if (w) o.note << "r = " << w->r;
}

void james_suite(Outcome& o) {
  const auto start = std::chrono::steady_clock::now();
  const Rational theta(3, 4);
  const auto lemma = verify_lemma_3_1(theta, 12, 6);
  const auto uniform = verify_eq_james(12, 6);
  const auto atd = verify_atd_bilipschitz(12, 6, theta);
  for (const auto* r : {&lemma, &uniform, &atd}) {
    for (const auto& c : r->checks) o.require(c.violations == 0 && c.checked > 0, c.name);
  }
  const double t = seconds_since(start);
  o.require(t < 30, "runtime");
  o.note << lemma.subsets << " subsets, runtime " << t << " s";
}

void moduli_suite(Outcome& o) {
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    o.require(check_beta_leq_auc(LpModel(p), lemma42_grid(50)).passed, "beta <= auc(2t)");
    for (auto kind : {ModulusKind::kAuc, ModulusKind::kBeta}) {
      const auto fit = power_type_fit(tabulate(kind, LpModel(p), 1e-3, 1e-1, 20, true));
      o.require(std::abs(fit.p - p) <= 0.05 * p, "power fit " + to_string(kind));
    }
  }
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_auc = 0, worst_beta = 0;
  for (int i = 0; i < 100; ++i) {
    const LpModel m(1.1 + 4.0 * unit(rng));
    const double t = 1e-3 + (1 - 1e-3) * unit(rng);
    worst_auc = std::max(worst_auc, std::abs(auc_model(m, t) - auc_oracle(m, t)));
    const double tb = m.beta_t_max() * t;
    worst_beta = std::max(worst_beta, std::abs(beta_model(m, tb) - beta_oracle(m, tb)));
  }
  o.require(worst_auc <= 1e-9, "auc oracle");
  o.require(worst_beta <= 1e-6, "beta oracle");
  double previous = INFINITY;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double ratio = std::abs(composed_power_type(3, eps) - 3) / eps;
    o.require(ratio <= previous && ratio < 10, "composed power type");
    previous = ratio;
  }
  o.note << "oracle gaps " << worst_auc << " / " << worst_beta;
}

void determinism(Outcome& o) {
  const auto a = cli::verify_all({});
  const auto b = cli::verify_all({});
  o.require(a.passed, "verify all passes");
  o.require(a.json == b.json, "byte-identical reports");
  o.note << a.json.size() << " bytes";
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"laakso structure", laakso_structure}, {"distance correctness", distance_correctness},
      {"lift lemma suite", lemma_suite},      {"ATD constants", atd_constants},
      {"fork argument", fork_argument},       {"James suite", james_suite},
      {"moduli", moduli_suite},               {"determinism", determinism},
  };
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::cerr << "usage: acceptance [1-" << criteria.size() << "]\n";
    return 2;
  }
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " " << criteria[i].first << " ("
              << o.note.str() << ")\n";
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
