#include "laakso_lab/james_model.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <set>

#include <json.hpp>

#include "laakso_lab/error.hpp"

namespace laakso_lab {

using nlohmann::json;

Rational StaircaseVector::coordinate(std::size_t i) const {
  if (i == 0 || i > coords.size()) return Rational(0);
  return coords[i - 1];
}

StaircaseVector v_of(const TreeNode& J, const Rational& theta) {
  StaircaseVector v;
  v.theta = theta;
  const auto& e = J.elements();
  if (e.empty()) return v;
  v.coords.resize(static_cast<std::size_t>(e.back()));
  for (std::size_t i = 1; i <= v.coords.size(); ++i) {
    const auto count = e.end() - std::lower_bound(e.begin(), e.end(), static_cast<int>(i));
    v.coords[i - 1] = theta * Rational(count);
  }
  return v;
}

Rational sup_norm(const StaircaseVector& v) {
  Rational best(0);
  for (const auto& c : v.coords) best = std::max(best, abs(c));
  return best;
}

StaircaseVector operator-(const StaircaseVector& a, const StaircaseVector& b) {
  StaircaseVector out;
  out.theta = a.theta;
  out.coords.resize(std::max(a.coords.size(), b.coords.size()));
  for (std::size_t i = 1; i <= out.coords.size(); ++i) out.coords[i - 1] = a.coordinate(i) - b.coordinate(i);
  return out;
}

namespace {

// max_i |#{n in J : n >= i} - #{n in K : n >= i}|; the count difference only
// changes at elements, so it suffices to look there.
long count_gap(const std::vector<int>& a, const std::vector<int>& b) {
  long best = 0;
  auto at = [](const std::vector<int>& v, int x) {
    return static_cast<long>(v.end() - std::lower_bound(v.begin(), v.end(), x));
  };
  for (int x : a) best = std::max(best, std::labs(at(a, x) - at(b, x)));
  for (int x : b) best = std::max(best, std::labs(at(a, x) - at(b, x)));
  return best;
}

bool ordered_before(const TreeNode& J, const TreeNode& K) {
  return J.is_root() || K.is_root() || J.max_element() < K.min_element();
}

class Tracker {
 public:
  explicit Tracker(std::string name) { check_.name = std::move(name); }

  void observe(const Rational& norm, long size, bool ok, const std::function<std::string()>& describe) {
    ++check_.checked;
    if (size > 0) {
      const Rational ratio = norm / Rational(size);
      if (!check_.min_ratio || ratio < *check_.min_ratio) check_.min_ratio = ratio;
      if (!check_.max_ratio || ratio > *check_.max_ratio) check_.max_ratio = ratio;
    }
    if (!ok) {
      if (check_.violations++ == 0) check_.first_violation = describe();
      check_.passed = false;
    }
  }
  void count_only(bool ok, const std::function<std::string()>& describe) {
    ++check_.checked;
    if (!ok) {
      if (check_.violations++ == 0) check_.first_violation = describe();
      check_.passed = false;
    }
  }
  JamesCheck take() { return std::move(check_); }

 private:
  JamesCheck check_;
};

std::string pair_text(const TreeNode& J, const TreeNode& K, const Rational& norm) {
  return "J=" + J.to_string() + " J'=" + K.to_string() + " norm=" + to_string(norm);
}

void require_theta(const Rational& theta) {
  if (theta <= Rational(0) || theta >= Rational(1)) throw DomainError("theta must lie in (0, 1)");
}

// Shared by the lemma check and the uniform-constant check: lower * size <=
// norm <= upper * size on single vectors and on ordered pairs.
JamesReport staircase_bounds(const Rational& theta, int index_bound, int size_bound, const Rational& single_lower,
                             const Rational& pair_lower, bool with_injectivity) {
  JamesReport report;
  report.theta = theta;
  report.index_bound = index_bound;
  report.size_bound = size_bound;
  const auto family = increasing_subsets(index_bound, size_bound);
  report.subsets = family.size();

  if (with_injectivity) {
    Tracker inj("injective");
    std::set<std::vector<Rational>> seen;
    for (const auto& J : family) {
      const auto v = v_of(J, theta);
      inj.count_only(seen.insert(v.coords).second, [&] { return "v_J repeats at J=" + J.to_string(); });
    }
    report.checks.push_back(inj.take());
  }

  Tracker single("norm_bounds");
  for (const auto& J : family) {
    const long k = J.level();
    const Rational norm = theta * Rational(count_gap(J.elements(), {}));
    const bool ok = single_lower * Rational(k) <= norm && norm <= Rational(k);
    single.observe(norm, k, ok, [&] { return "J=" + J.to_string() + " norm=" + to_string(norm); });
  }
  report.checks.push_back(single.take());

  Tracker pair("difference_bounds");
  for (const auto& J : family) {
    for (const auto& K : family) {
      if (!ordered_before(J, K)) continue;
      const long size = J.level() + K.level();
      const Rational norm = theta * Rational(count_gap(J.elements(), K.elements()));
      const bool ok = pair_lower * Rational(size) <= norm && norm <= Rational(size);
      pair.observe(norm, size, ok, [&] { return pair_text(J, K, norm); });
    }
  }
  report.checks.push_back(pair.take());
  return report;
}

json rational_or_null(const std::optional<Rational>& r) { return r ? json(to_string(*r)) : json(nullptr); }

}  // namespace

Rational difference_norm(const TreeNode& J, const TreeNode& K, const Rational& theta) {
  return abs(theta) * Rational(count_gap(J.elements(), K.elements()));
}

std::vector<TreeNode> increasing_subsets(int index_bound, int size_bound) {
  std::vector<TreeNode> out;
  std::vector<int> current;
  std::function<void(int)> visit = [&](int next) {
    out.emplace_back(current);
    if (static_cast<int>(current.size()) == size_bound) return;
    for (int x = next; x <= index_bound; ++x) {
      current.push_back(x);
      visit(x + 1);
      current.pop_back();
    }
  };
  visit(1);
  return out;
}

bool JamesReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const JamesCheck& c) { return c.passed; });
}

JamesReport verify_lemma_3_1(const Rational& theta, int index_bound, int size_bound) {
  require_theta(theta);
  return staircase_bounds(theta, index_bound, size_bound, theta, theta / Rational(3), true);
}

JamesReport verify_eq_james(int index_bound, int size_bound) {
  const Rational quarter(1, 4);
  return staircase_bounds(Rational(3, 4), index_bound, size_bound, quarter, quarter, false);
}

JamesReport verify_atd_bilipschitz(int index_bound, int size_bound, const Rational& theta) {
  require_theta(theta);
  JamesReport report;
  report.theta = theta;
  report.index_bound = index_bound;
  report.size_bound = size_bound;
  const auto family = increasing_subsets(index_bound, size_bound);
  report.subsets = family.size();
  Tracker atd("atd_exact");
  for (const auto& K : family) {
    const auto& e = K.elements();
    for (std::size_t len = 0; len <= e.size(); ++len) {
      const TreeNode J(std::vector<int>(e.begin(), e.begin() + static_cast<long>(len)));
      const long gap = K.level() - J.level();
      const Rational norm = difference_norm(K, J, theta);
      atd.observe(norm, gap, norm == theta * Rational(gap), [&] { return pair_text(J, K, norm); });
    }
  }
  report.checks.push_back(atd.take());
  return report;
}

JamesReport verify_biorthogonality(int index_bound, const Rational& theta) {
  JamesReport report;
  report.theta = theta;
  report.index_bound = index_bound;
  report.size_bound = 1;
  report.subsets = static_cast<std::size_t>(std::max(index_bound, 0));
  Tracker bio("biorthogonal");
  for (int k = 1; k <= index_bound; ++k) {
    const auto u = v_of(TreeNode{k}, theta);
    for (int n = 1; n <= index_bound; ++n) {
      const Rational value = u.coordinate(static_cast<std::size_t>(n));
      const Rational expected = n <= k ? theta : Rational(0);
      bio.count_only(value == expected, [&] {
        return "u*_" + std::to_string(n) + "(u_" + std::to_string(k) + ") = " + to_string(value);
      });
    }
  }
  report.checks.push_back(bio.take());
  return report;
}

std::string james_report_to_json(const JamesReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    json item{{"name", c.name},
              {"passed", c.passed},
              {"checked", c.checked},
              {"violations", c.violations},
              {"min_ratio", rational_or_null(c.min_ratio)},
              {"max_ratio", rational_or_null(c.max_ratio)}};
    if (!c.passed) item["first_violation"] = c.first_violation;
    checks.push_back(item);
  }
  json out{{"schema", 1},
           {"passed", report.passed()},
           {"theta", to_string(report.theta)},
           {"indices", report.index_bound},
           {"maxsize", report.size_bound},
           {"subsets", report.subsets},
           {"checks", checks}};
  return out.dump();
}

SiblingSeparation sibling_separation_bound(const std::vector<TreeNode>& witness, int N) {
  if (N < 2) throw DomainError("N must be at least 2");
  if (N > 40) throw DomainError("N too large");
  SiblingSeparation out;
  out.scale = 1;
  for (int i = 2; i < N; ++i) out.scale *= 3;
  out.bound = Rational(out.scale, 2);
  if (witness.empty()) return out;

  out.common = witness.front();
  for (const auto& w : witness) out.common = tree_lcp(out.common, w);
  const std::size_t cut = out.common.elements().size();
  for (const auto& w : witness) {
    out.tails.emplace_back(std::vector<int>(w.elements().begin() + static_cast<long>(cut), w.elements().end()));
    if (out.tails.back().level() < out.scale) out.cardinality_ok = false;
  }

  for (std::size_t i = 0; i < out.tails.size(); ++i) {
    const auto& tail = out.tails[i];
    if (tail.is_root()) continue;
    if (out.ordered.empty() || out.tails[out.ordered.back()].max_element() < tail.min_element()) {
      out.ordered.push_back(i);
    }
  }
  const std::size_t nonempty = static_cast<std::size_t>(
      std::count_if(out.tails.begin(), out.tails.end(), [](const TreeNode& t) { return !t.is_root(); }));
  out.precondition_ok = out.ordered.size() == out.tails.size() && nonempty == out.tails.size();

  const Rational theta(3, 4);
  for (std::size_t a = 0; a < out.ordered.size(); ++a) {
    for (std::size_t b = a + 1; b < out.ordered.size(); ++b) {
      const Rational norm = difference_norm(witness[out.ordered[a]], witness[out.ordered[b]], theta);
      if (!out.min_norm || norm < *out.min_norm) out.min_norm = norm;
      if (norm < out.bound) out.separation_ok = false;
    }
  }
  return out;
}

std::string sibling_separation_to_json(const SiblingSeparation& s) {
  json tails = json::array();
  for (const auto& t : s.tails) tails.push_back(t.elements());
  json out{{"schema", 1},
           {"passed", s.passed()},
           {"common", s.common.elements()},
           {"tails", tails},
           {"precondition_ok", s.precondition_ok},
           {"ordered", s.ordered},
           {"scale", s.scale},
           {"cardinality_ok", s.cardinality_ok},
           {"separation_ok", s.separation_ok},
           {"min_norm", rational_or_null(s.min_norm)},
           {"bound", to_string(s.bound)}};
  return out.dump();
}

}  // namespace laakso_lab
