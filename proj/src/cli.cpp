#include "laakso_lab/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <queue>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "laakso_lab/error.hpp"
#include "laakso_lab/james_model.hpp"
#include "laakso_lab/laakso_graph.hpp"
#include "laakso_lab/moduli.hpp"
#include "laakso_lab/quotient_analysis.hpp"
#include "laakso_lab/tree_to_laakso.hpp"

namespace laakso_lab::cli {

using nlohmann::json;

namespace {

struct IoError : Error {
  using Error::Error;
};

json finite_or_inf(double x) { return std::isinf(x) ? json("inf") : json(x); }

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

std::string replay_command(int n, int b, const std::optional<TreeNode>& fault, const PhiCounterexample& cx) {
  std::string cmd = "laakso-lab verify phi --n " + std::to_string(n) + " --b " + std::to_string(b);
  if (fault) cmd += " --fault " + shell_quote(fault->to_string());
  return cmd + " --replay " + shell_quote(counterexample_to_json(cx));
}

std::string replay_command(int n, int b, const std::optional<PhiFault>& fault, const PhiCounterexample& cx) {
  return replay_command(n, b, fault ? std::optional<TreeNode>(fault->node) : std::nullopt, cx);
}

std::vector<std::string> violated(const Lemma24Report& r) {
  std::vector<std::string> out;
  if (!r.surjective) out.emplace_back("surjective");
  if (!r.levels_preserved) out.emplace_back("level");
  if (!r.lipschitz) out.emplace_back("lipschitz");
  if (!r.atd_colipschitz) out.emplace_back("lift");
  return out;
}

// Adds the violated invariants, the first counterexample and its replay
// command to a failing phi report.
json phi_report(const PhiMap& phi, const Lemma24Report& r) {
  json j = json::parse(lemma_2_4_report_to_json(r));
  j["n"] = phi.target().scale();
  j["b"] = phi.branching();
  j["violated"] = violated(r);
  if (!r.counterexamples.empty()) {
    j["counterexample"] = json::parse(counterexample_to_json(r.counterexamples.front()));
    j["replay"] = replay_command(phi.target().scale(), phi.branching(), phi.fault(), r.counterexamples.front());
  }
  return j;
}

json fork_check_json(const ForkCheck& c) {
  return json{{"ok", c.ok()},         {"target_shape", c.target_shape}, {"arm01", c.arm01},
              {"arms12", c.arms12},   {"spread", c.spread},             {"max_arm", c.max_arm},
              {"min_spread", finite_or_inf(c.min_spread)}};
}

// ---- verify all suites ----

struct Suite {
  explicit Suite(std::string n) : name(std::move(n)) {}
  std::string name;
  bool passed = true;
  json details = json::object();
  json failure;  // set when !passed
};

bool last_nonzero_ternary_digit_is_one(int level) {
  if (level == 0) return false;
  while (level % 3 == 0) level /= 3;
  return level % 3 == 1;
}

Suite suite_laakso_structure() {
  Suite s("laakso_structure");
  json graphs = json::array();
  for (int n = 1; n <= 3; ++n) {
    for (int b = 2; b <= 3; ++b) {
      const auto g = build_laakso(n, b);
      const auto levels = g.bfs_from(0);
      bool levels_ok = true, branching_ok = true;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const VertexId& v = g.vertex(i);
        levels_ok = levels_ok && levels[i] == v.level;
        const auto kids = g.children_of(i).size();
        const bool expect = v.level < g.diameter() && last_nonzero_ternary_digit_is_one(v.level);
        branching_ok = branching_ok && g.is_branching(v) == expect && (kids == 1 || kids == std::size_t(b) ||
                                                                      v.level == g.diameter());
      }
      const bool ok = g.size() == laakso_vertex_count(n, b) && g.diameter() == pow3(n) &&
                      g.edge_count() == static_cast<std::size_t>(std::pow(2 * b + 1, n)) && levels_ok && branching_ok;
      graphs.push_back({{"n", n}, {"b", b}, {"vertices", g.size()}, {"edges", g.edge_count()}, {"ok", ok}});
      if (!ok && s.passed) s.failure = {{"n", n}, {"b", b}, {"levels_ok", levels_ok}, {"branching_ok", branching_ok}};
      s.passed = s.passed && ok;
    }
  }
  s.details["graphs"] = graphs;
  return s;
}

Suite suite_laakso_distance() {
  Suite s("laakso_distance");
  std::size_t pairs = 0;
  for (auto [n, b] : std::vector<std::pair<int, int>>{{1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 2}}) {
    const auto g = build_laakso(n, b);
    for (std::size_t i = 0; i < g.size() && s.passed; ++i) {
      const auto bfs = g.bfs_from(i);
      for (std::size_t j = 0; j < g.size(); ++j) {
        ++pairs;
        if (g.distance(i, j) != bfs[j]) {
          s.passed = false;
          s.failure = {{"n", n},
                       {"b", b},
                       {"u", g.vertex(i).label()},
                       {"v", g.vertex(j).label()},
                       {"analytic", g.distance(i, j)},
                       {"bfs", bfs[j]}};
          break;
        }
      }
    }
  }
  s.details["pairs"] = pairs;
  return s;
}

Suite suite_tree_metric() {
  Suite s("tree_metric");
  const TreeSpace t(2, 5);
  std::vector<std::vector<std::size_t>> adj(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (auto p = tree_parent(t.vertex(i))) {
      const std::size_t j = *t.index_of(*p);
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < t.size() && s.passed; ++i) {
    std::vector<int> dist(t.size(), -1);
    std::queue<std::size_t> q;
    dist[i] = 0;
    q.push(i);
    while (!q.empty()) {
      const std::size_t x = q.front();
      q.pop();
      for (std::size_t y : adj[x]) {
        if (dist[y] < 0) {
          dist[y] = dist[x] + 1;
          q.push(y);
        }
      }
    }
    for (std::size_t j = 0; j < t.size(); ++j) {
      ++pairs;
      if (tree_distance(t.vertex(i), t.vertex(j)) != dist[j]) {
        s.passed = false;
        s.failure = {{"J", t.vertex(i).elements()}, {"K", t.vertex(j).elements()}, {"bfs", dist[j]}};
        break;
      }
    }
  }
  s.details["vertices"] = t.size();
  s.details["pairs"] = pairs;
  return s;
}

Suite suite_phi(const VerifyAllOptions& options) {
  Suite s("phi");
  std::optional<PhiFault> fault;
  if (options.fault) fault = PhiFault{*options.fault};
  const PhiMap phi(build_laakso(2, 2), fault);
  PhiVerifyOptions vo;
  vo.seed = options.seed;
  const auto report = verify_lemma_2_4(phi, vo);
  json j = phi_report(phi, report);
  s.passed = report.passed();
  s.details = {{"tree_vertices", report.tree_vertices},
               {"target_vertices", report.target_vertices},
               {"comparable_pairs", report.comparable_pairs},
               {"incomparable_pairs", report.incomparable_pairs},
               {"lifts_checked", report.lifts_checked},
               {"exhaustive", report.exhaustive}};
  if (!s.passed) {
    s.failure = {{"violated", j["violated"]}};
    if (j.contains("counterexample")) {
      s.failure["counterexample"] = j["counterexample"];
      s.failure["replay"] = j["replay"];
    }
  }
  return s;
}

MetricMapTable floor_by_three_path() {
  auto path = [](std::size_t n) {
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::abs(double(i) - double(j));
    }
    FiniteMetricSpace space(n, d);
    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) order.emplace_back(i, j);
    }
    space.set_order(order);
    return space;
  };
  std::vector<std::size_t> assign;
  for (std::size_t i = 0; i < 10; ++i) assign.push_back(i / 3);
  return MetricMapTable(path(10), path(4), assign);
}

Suite suite_atd() {
  Suite s("atd_constants");
  const PhiMap phi(build_laakso(2, 2));
  const TreeSpace source(2, 9);
  const auto table = phi_map_table(phi, source);
  bool phi_ok = true;
  double last_finite = -1;
  for (double delta : table.source().realized_distances()) {
    const double c = atd_colipschitz(table, delta);
    if (std::isinf(c)) continue;
    last_finite = delta;
    phi_ok = phi_ok && c == 1.0;
  }
  phi_ok = phi_ok && last_finite >= 0 && atd_colipschitz_limit(table) == 1.0 && check_atd_colip(table, 1.0, 0);
  const auto path = floor_by_three_path();
  const double c_path = atd_colipschitz(path, 0);
  const bool path_ok = c_path == 1.0 / 3.0 && check_atd_colip(path, 1.0 / 3.0, 0) &&
                       !check_atd_colip(path, 1.0 / 3.0 + 1e-9, 0);
  s.passed = phi_ok && path_ok;
  s.details = {{"phi_c_atd", phi_ok ? json(1) : json("mismatch")},
               {"phi_last_finite_delta", last_finite},
               {"floor_by_three_c_atd", c_path}};
  if (!s.passed) s.failure = {{"phi_ok", phi_ok}, {"path_ok", path_ok}};
  return s;
}

Suite suite_fork() {
  Suite s("fork");
  const PhiMap phi(build_laakso(1, 2));
  const auto w = fork_search_phi(phi, 0, 1);
  bool fork_ok = false;
  if (w) {
    const auto check = check_fork(phi, *w);
    fork_ok = check.ok() && check.max_arm == w->r && check.min_spread == w->r;
    s.details["witness"] = json::parse(phi_fork_witness_to_json(*w));
    s.details["check"] = fork_check_json(check);
  }
  const bool beta_ok =
      beta_bound_from_fork(0.0) == 0.0 && beta_bound_from_fork(Rational(1, 80)) == Rational(1);
  s.details["beta_bound_at_0"] = beta_bound_from_fork(0.0);
  s.details["beta_bound_at_1_80"] = to_string(beta_bound_from_fork(Rational(1, 80)));
  s.passed = fork_ok && beta_ok;
  if (!s.passed) s.failure = {{"witness_found", w.has_value()}, {"fork_ok", fork_ok}, {"beta_ok", beta_ok}};
  return s;
}

Suite suite_james() {
  Suite s("james");
  const Rational theta(3, 4);
  std::vector<JamesReport> reports{verify_lemma_3_1(theta, 12, 6), verify_eq_james(12, 6),
                                   verify_atd_bilipschitz(12, 6, theta), verify_biorthogonality(12, theta)};
  const char* names[] = {"lemma", "uniform_constant", "atd_exact", "biorthogonal"};
  for (std::size_t i = 0; i < reports.size(); ++i) {
    json j = json::parse(james_report_to_json(reports[i]));
    j.erase("schema");
    s.details[names[i]] = j;
    if (!reports[i].passed() && s.passed) s.failure = {{"report", names[i]}};
    s.passed = s.passed && reports[i].passed();
  }
  return s;
}

Suite suite_moduli(std::uint64_t seed) {
  Suite s("moduli");
  json lemma = json::array();
  bool lemma_ok = true;
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    const auto r = check_beta_leq_auc(LpModel(p), lemma42_grid(50));
    lemma_ok = lemma_ok && r.passed;
    lemma.push_back({{"p", p}, {"passed", r.passed}, {"min_margin", r.min_margin}});
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double auc_err = 0, beta_err = 0;
  for (int i = 0; i < 100; ++i) {
    const LpModel m(1.2 + 3.8 * unit(rng));
    const double t_auc = 1e-3 + (1 - 1e-3) * unit(rng);
    const double t_beta = m.beta_t_max() * (1e-3 + (1 - 1e-3) * unit(rng));
    auc_err = std::max(auc_err, std::abs(auc_model(m, t_auc) - auc_oracle(m, t_auc)));
    beta_err = std::max(beta_err, std::abs(beta_model(m, t_beta) - beta_oracle(m, t_beta)));
  }
  const bool oracle_ok = auc_err <= 1e-9 && beta_err <= 1e-6;

  json fits = json::array();
  bool fit_ok = true;
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    for (ModulusKind kind : {ModulusKind::kAuc, ModulusKind::kBeta}) {
      const auto fit = power_type_fit(tabulate(kind, LpModel(p), 1e-3, 1e-1, 20, true));
      const bool ok = std::abs(fit.p - p) <= 0.05 * p;
      fit_ok = fit_ok && ok;
      fits.push_back({{"p", p}, {"kind", to_string(kind)}, {"fitted", fit.p}, {"ok", ok}});
    }
  }

  bool composed_ok = true;
  json composed = json::array();
  for (double p : {2.0, 3.0}) {
    double previous = kInfinity;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
      const double ratio = std::abs(composed_power_type(p, eps) - p) / eps;
      composed_ok = composed_ok && ratio <= previous + 1e-9;
      previous = ratio;
      composed.push_back({{"p", p}, {"eps", eps}, {"ratio", ratio}});
    }
  }
  composed_ok = composed_ok && composed_power_type(2, 0) == 2;

  s.passed = lemma_ok && oracle_ok && fit_ok && composed_ok;
  s.details = {{"lemma42", lemma},      {"auc_oracle_max_error", auc_err}, {"beta_oracle_max_error", beta_err},
               {"power_fits", fits},    {"composed", composed}};
  if (!s.passed) {
    s.failure = {{"lemma_ok", lemma_ok}, {"oracle_ok", oracle_ok}, {"fit_ok", fit_ok}, {"composed_ok", composed_ok}};
  }
  return s;
}

// ---- subcommand helpers ----

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << text;
  if (text.empty() || text.back() != '\n') file << '\n';
  if (!file) throw IoError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ParseError("not a number: '" + item + "'");
    }
  }
  return out;
}

std::string with_schema(const std::string& text) {
  json j = json::parse(text);
  if (j.is_array()) j = json{{"vertices", j}};
  j["schema"] = 1;
  return j.dump();
}

}  // namespace

TreeNode parse_tree_node(const std::string& text) {
  std::string body = text;
  if (!body.empty() && body.front() == '{') {
    if (body.back() != '}') throw ParseError("unbalanced braces in '" + text + "'");
    body = body.substr(1, body.size() - 2);
  }
  std::vector<int> elements;
  for (double x : parse_list(body)) {
    if (x != std::floor(x)) throw ParseError("tree node elements must be integers: '" + text + "'");
    elements.push_back(static_cast<int>(x));
  }
  try {
    return TreeNode(elements);
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
}

VerifyAllResult verify_all(const VerifyAllOptions& options) {
  using Clock = std::chrono::steady_clock;
  std::vector<std::function<Suite()>> suites{
      suite_laakso_structure, suite_laakso_distance, suite_tree_metric,
      [&] { return suite_phi(options); }, suite_atd, suite_fork, suite_james,
      [&] { return suite_moduli(options.seed); }};
  VerifyAllResult result;
  json list = json::array();
  json failures = json::array();
  for (auto& run_suite : suites) {
    const auto start = Clock::now();
    Suite s = run_suite();
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    json j{{"name", s.name}, {"passed", s.passed}, {"details", s.details}};
    if (options.timings) j["seconds"] = seconds;
    if (!s.passed) failures.push_back({{"suite", s.name}, {"report", s.failure}});
    result.passed = result.passed && s.passed;
    list.push_back(j);
  }
  json out{{"schema", 1}, {"seed", options.seed}, {"passed", result.passed}, {"suites", list}};
  if (options.fault) out["fault"] = options.fault->elements();
  if (!failures.empty()) out["failures"] = failures;
  result.json = out.dump(2);
  return result;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Truncated Laakso graphs, tree quotients and asymptotic moduli", "laakso-lab"};
  app.require_subcommand(1);
  std::string out_path;
  app.add_option("-o,--out", out_path, "Write output to this file instead of stdout");

  std::function<int()> action;

  // generate
  auto* gen = app.add_subcommand("generate", "Emit a truncated tree, a graph or the phi map table");
  gen->require_subcommand(1);
  int tree_b = 2, tree_d = 3;
  auto* gen_tree = gen->add_subcommand("tree", "Truncated tree T_{b,d} as JSON");
  gen_tree->add_option("--b", tree_b, "Branching")->check(CLI::Range(1, 64));
  gen_tree->add_option("--d", tree_d, "Depth")->check(CLI::Range(0, 64));
  gen_tree->callback([&] {
    action = [&] {
      const TreeSpace t(tree_b, tree_d);
      json j{{"schema", 1}, {"b", tree_b}, {"d", tree_d}, {"vertices", json::parse(t.to_json())}};
      emit(j.dump(), out_path, out);
      return kExitOk;
    };
  });

  int g_n = 1, g_b = 2;
  std::string g_format = "json";
  auto* gen_laakso = gen->add_subcommand("laakso", "Laakso graph G_n as JSON or DOT");
  gen_laakso->add_option("--n", g_n, "Scale")->check(CLI::PositiveNumber);
  gen_laakso->add_option("--b", g_b, "Branching")->check(CLI::Range(2, 1 << 20));
  gen_laakso->add_option("--format", g_format, "json or dot")->check(CLI::IsMember({"json", "dot"}));
  gen_laakso->callback([&] {
    action = [&] {
      const auto g = build_laakso(g_n, g_b);
      emit(g_format == "dot" ? g.to_dot() : with_schema(g.to_json()), out_path, out);
      return kExitOk;
    };
  });

  int pm_n = 1, pm_b = 2;
  auto* gen_phi = gen->add_subcommand("phimap", "phi : T_{b,3^n} -> G_n as a map table");
  gen_phi->add_option("--n", pm_n, "Scale")->check(CLI::PositiveNumber);
  gen_phi->add_option("--b", pm_b, "Branching")->check(CLI::Range(2, 1 << 20));
  gen_phi->callback([&] {
    action = [&] {
      const PhiMap phi(build_laakso(pm_n, pm_b));
      const TreeSpace source(pm_b, phi.depth());
      emit(map_table_to_json(phi_map_table(phi, source)), out_path, out);
      return kExitOk;
    };
  });

  // verify
  auto* ver = app.add_subcommand("verify", "Run verification suites");
  ver->require_subcommand(1);
  int vp_n = 2, vp_b = 2;
  std::uint64_t vp_seed = 0;
  std::size_t vp_samples = 256, vp_max_cx = 16;
  std::string vp_fault, vp_replay;
  auto* ver_phi = ver->add_subcommand("phi", "Level preservation, 1-Lipschitz and exact lifting of phi");
  ver_phi->add_option("--n", vp_n, "Scale")->check(CLI::PositiveNumber);
  ver_phi->add_option("--b", vp_b, "Branching")->check(CLI::Range(2, 1 << 20));
  ver_phi->add_option("--seed", vp_seed, "Sampling seed");
  auto* vp_sampled = ver_phi->add_option("--samples", vp_samples, "Sample this many pairs and preimages per vertex");
  auto* vp_exhaustive = ver_phi->add_flag("--exhaustive", "Check every pair and every preimage");
  vp_exhaustive->excludes(vp_sampled);
  ver_phi->add_option("--max-counterexamples", vp_max_cx, "Per invariant");
  ver_phi->add_option("--fault", vp_fault, "Swap the images of children 1 and 2 of this tree node");
  ver_phi->add_option("--replay", vp_replay, "Re-evaluate one counterexample (JSON)");
  ver_phi->callback([&] {
    action = [&] {
      std::optional<PhiFault> fault;
      if (!vp_fault.empty()) fault = PhiFault{parse_tree_node(vp_fault)};
      const PhiMap phi(build_laakso(vp_n, vp_b), fault);
      if (!vp_replay.empty()) {
        const auto cx = counterexample_from_json(vp_replay);
        const bool holds = replay_counterexample(phi, cx);
        json j{{"schema", 1}, {"check", cx.check}, {"holds", holds},
               {"counterexample", json::parse(counterexample_to_json(cx))}};
        emit(j.dump(), out_path, out);
        return holds ? kExitOk : kExitCheckFailed;
      }
      PhiVerifyOptions vo;
      vo.seed = vp_seed;
      vo.samples = vp_samples;
      vo.max_counterexamples = vp_max_cx;
      if (vp_sampled->count() > 0) vo.coverage = PhiVerifyOptions::Coverage::kSampled;
      if (vp_exhaustive->count() > 0) vo.coverage = PhiVerifyOptions::Coverage::kExhaustive;
      const auto report = verify_lemma_2_4(phi, vo);
      emit(phi_report(phi, report).dump(), out_path, out);
      return report.passed() ? kExitOk : kExitCheckFailed;
    };
  });

  std::string vj_theta = "3/4";
  int vj_indices = 12, vj_maxsize = 6;
  auto* ver_james = ver->add_subcommand("james", "Exact checks on James staircase vectors");
  ver_james->add_option("--theta", vj_theta, "Rational in (0,1)");
  ver_james->add_option("--indices", vj_indices, "Index bound")->check(CLI::Range(0, 20));
  ver_james->add_option("--maxsize", vj_maxsize, "Subset size bound")->check(CLI::Range(0, 20));
  ver_james->callback([&] {
    action = [&] {
      const Rational theta = parse_rational(vj_theta);
      std::vector<std::pair<std::string, JamesReport>> reports{
          {"lemma", verify_lemma_3_1(theta, vj_indices, vj_maxsize)},
          {"uniform_constant", verify_eq_james(vj_indices, vj_maxsize)},
          {"atd_exact", verify_atd_bilipschitz(vj_indices, vj_maxsize, theta)},
          {"biorthogonal", verify_biorthogonality(vj_indices, theta)}};
      bool passed = true;
      json j{{"schema", 1}, {"theta", to_string(theta)}, {"indices", vj_indices}, {"maxsize", vj_maxsize}};
      for (const auto& [name, r] : reports) {
        json item = json::parse(james_report_to_json(r));
        item.erase("schema");
        j[name] = item;
        passed = passed && r.passed();
      }
      j["passed"] = passed;
      emit(j.dump(), out_path, out);
      return passed ? kExitOk : kExitCheckFailed;
    };
  });

  VerifyAllOptions va;
  std::string va_fault;
  bool va_inject = false;
  auto* ver_all = ver->add_subcommand("all", "Every suite with default parameters");
  ver_all->add_option("--seed", va.seed, "Seed for all sampling");
  ver_all->add_flag("--inject-fault", va_inject, "Swap two children of phi below {1}");
  ver_all->add_option("--fault", va_fault, "Inject the phi fault at this tree node");
  ver_all->add_flag("--timings", va.timings, "Include wall-clock times (output is then not reproducible)");
  ver_all->callback([&] {
    action = [&] {
      if (!va_fault.empty()) va.fault = parse_tree_node(va_fault);
      else if (va_inject) va.fault = TreeNode{1};
      const auto result = verify_all(va);
      emit(result.json, out_path, out);
      return result.passed ? kExitOk : kExitCheckFailed;
    };
  });

  // analyze map
  auto* ana = app.add_subcommand("analyze", "Analyze a finite map");
  ana->require_subcommand(1);
  std::string am_input, am_deltas, am_radii;
  auto* ana_map = ana->add_subcommand("map", "Lipschitz profile and quotient moduli of a map table");
  ana_map->add_option("--input", am_input, "Map table JSON ('-' for stdin)")->required();
  ana_map->add_option("--delta-grid,--deltas", am_deltas, "Comma-separated scales (default: realized source distances)");
  ana_map->add_option("--radii", am_radii, "Comma-separated radii for omega/Omega (default: realized)");
  ana_map->callback([&] {
    action = [&] {
      std::string text;
      if (am_input == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        text = buffer.str();
      } else {
        text = read_file(am_input);
      }
      const auto m = map_table_from_json(text);
      const auto realized = m.source().realized_distances();
      const auto deltas = am_deltas.empty() ? realized : parse_list(am_deltas);
      const auto radii = am_radii.empty() ? std::vector<double>(realized.begin() + 1, realized.end())
                                          : parse_list(am_radii);
      json j = json::parse(coarse_profile_to_json(coarse_profile(m, deltas)));
      json moduli = json::array();
      for (double r : radii) {
        const auto q = quotient_moduli(m, r);
        moduli.push_back({{"r", r}, {"omega", finite_or_inf(q.omega)}, {"Omega", finite_or_inf(q.Omega)}});
      }
      j["moduli"] = moduli;
      j["surjective"] = m.surjective();
      if (m.target().has_order()) j["c_atd_limit"] = finite_or_inf(atd_colipschitz_limit(m));
      emit(j.dump(), out_path, out);
      return kExitOk;
    };
  });

  // fork
  std::string fk_input;
  int fk_n = 1, fk_b = 2;
  double fk_eps = 0, fk_rmin = 1;
  std::size_t fk_arms = 2;
  std::optional<double> fk_cinf;
  bool fk_separation = false;
  auto* fork = app.add_subcommand("fork", "Search for an approximate fork and its preimages");
  fork->add_option("--input", fk_input, "Map table JSON; without it, phi : T_{b,3^n} -> G_n is used");
  fork->add_option("--n", fk_n, "Scale of G_n")->check(CLI::PositiveNumber);
  fork->add_option("--b", fk_b, "Branching")->check(CLI::Range(2, 1 << 20));
  fork->add_option("--eps", fk_eps, "Fork slack")->check(CLI::Range(0.0, 1.0));
  fork->add_option("--rmin", fk_rmin, "Smallest admissible r");
  fork->add_option("--arms", fk_arms, "Number of arms mu_2k")->check(CLI::PositiveNumber);
  fork->add_option("--c-inf", fk_cinf, "ATD co-Lipschitz constant to use");
  fork->add_flag("--separation", fk_separation, "Also check the sibling separation bound on the arms (phi only)");
  fork->callback([&] {
    action = [&] {
      json j{{"schema", 1}, {"eps", fk_eps}, {"beta_bound", beta_bound_from_fork(fk_eps)}};
      bool ok = false;
      if (!fk_input.empty()) {
        const auto m = map_table_from_json(read_file(fk_input));
        ForkOptions fo;
        fo.max_arms = fk_arms;
        fo.c_inf = fk_cinf;
        if (const auto w = fork_search(m, fk_eps, fk_rmin, fo)) {
          const auto check = check_fork(m, *w);
          j["witness"] = json::parse(fork_witness_to_json(*w));
          j["check"] = fork_check_json(check);
          ok = check.ok();
        }
      } else {
        const PhiMap phi(build_laakso(fk_n, fk_b));
        if (const auto w = fork_search_phi(phi, fk_eps, fk_rmin, fk_arms, fk_cinf.value_or(1.0))) {
          const auto check = check_fork(phi, *w);
          j["witness"] = json::parse(phi_fork_witness_to_json(*w));
          j["check"] = fork_check_json(check);
          ok = check.ok();
          if (fk_separation) {
            int N = 2;
            for (double r = w->r; r >= 3; r /= 3) ++N;
            const auto sep = sibling_separation_bound(w->sigma2, N);
            json sj = json::parse(sibling_separation_to_json(sep));
            sj.erase("schema");
            sj["N"] = N;
            j["separation"] = sj;
            ok = ok && sep.passed();
          }
        }
      }
      if (!j.contains("witness")) j["detail"] = "no fork witness found";
      j["passed"] = ok;
      emit(j.dump(), out_path, out);
      return ok ? kExitOk : kExitCheckFailed;
    };
  });

  // moduli
  double md_p = 2, md_tmin = 0.01, md_tmax = 0.5;
  std::size_t md_points = 50;
  std::string md_kind = "beta";
  bool md_log = false;
  auto* mod = app.add_subcommand("moduli", "Tabulate model moduli of l_p as CSV");
  mod->add_option("--p", md_p, "Exponent p > 1");
  mod->add_option("--kind", md_kind, "auc, aus or beta")->check(CLI::IsMember({"auc", "aus", "beta"}));
  mod->add_option("--tmin", md_tmin, "Smallest t");
  mod->add_option("--tmax", md_tmax, "Largest t");
  mod->add_option("--points", md_points, "Number of samples")->check(CLI::PositiveNumber);
  mod->add_flag("--log", md_log, "Geometric spacing");
  mod->callback([&] {
    if (action) return;  // set by check-lemma42
    action = [&] {
      const auto table = tabulate(parse_modulus_kind(md_kind), LpModel(md_p), md_tmin, md_tmax, md_points, md_log);
      emit(modulus_table_to_csv(table), out_path, out);
      return kExitOk;
    };
  });
  double ml_p = 2;
  std::size_t ml_points = 50;
  std::string ml_sign = "plus";
  auto* lemma = mod->add_subcommand("check-lemma42", "beta(t) <= auc(2t) on a grid in (0, 1/2]");
  lemma->add_option("--p", ml_p, "Exponent p > 1");
  lemma->add_option("--points", ml_points, "Grid size")->check(CLI::PositiveNumber);
  lemma->add_option("--sign", ml_sign, "plus or minus form of the beta modulus")
      ->check(CLI::IsMember({"plus", "minus"}));
  lemma->callback([&] {
    action = [&] {
      const auto sign = ml_sign == "plus" ? BetaSign::kPlus : BetaSign::kMinus;
      const auto r = check_beta_leq_auc(LpModel(ml_p), lemma42_grid(ml_points), sign);
      emit(lemma42_report_to_json(r), out_path, out);
      return r.passed ? kExitOk : kExitCheckFailed;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    return action ? action() : kExitUsage;
  } catch (const Error& e) {
    err << "laakso-lab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "laakso-lab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "laakso-lab: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace laakso_lab::cli
