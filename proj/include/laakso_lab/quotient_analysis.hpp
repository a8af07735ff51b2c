#pragma once

// Lipschitz-type analysis of maps between finite metric spaces.
//
// Everything here is brute force over finite tables. The ancestor-to-
// descendant (ATD) co-Lipschitz constant at scale delta is computed as
//
//   c_atd(delta) = min { D / rho : sigma, nu with lambda(sigma) < nu, rho > delta }
//
// where D = d_T(lambda(sigma), nu) and rho is the distance from sigma to the
// fiber lambda^{-1}(nu). This is the supremum of admissible constants c in
// "for all R >= delta, d_T(lambda(sigma), nu) < cR implies some preimage of nu
// within R of sigma". `check_atd_colip` evaluates that predicate directly and
// is kept as an independent cross-check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "laakso_lab/rational.hpp"

namespace laakso_lab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class FiniteMetricSpace {
 public:
  FiniteMetricSpace() = default;
  // `dist` is row-major n*n. Throws DomainError unless the diagonal is zero
  // and the table is symmetric and non-negative.
  FiniteMetricSpace(std::size_t n, std::vector<double> dist);

  static FiniteMetricSpace from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return dist_[i * n_ + j]; }

  // Strict ancestor relation; `before(i, j)` reads "i is an ancestor of j".
  void set_order(const std::vector<std::pair<std::size_t, std::size_t>>& pairs);
  bool has_order() const noexcept { return !order_.empty(); }
  bool before(std::size_t i, std::size_t j) const noexcept { return !order_.empty() && order_[i * n_ + j]; }
  std::vector<std::pair<std::size_t, std::size_t>> order_pairs() const;

  // O(n^3); returns the first violating triple, if any.
  std::optional<std::array<std::size_t, 3>> triangle_violation(double tolerance = 1e-12) const;

  std::vector<double> realized_distances() const;  // sorted, distinct, includes 0

 private:
  std::size_t n_ = 0;
  std::vector<double> dist_;
  std::vector<std::uint8_t> order_;
};

class MetricMapTable {
 public:
  MetricMapTable(FiniteMetricSpace source, FiniteMetricSpace target, std::vector<std::size_t> assign);

  const FiniteMetricSpace& source() const noexcept { return source_; }
  const FiniteMetricSpace& target() const noexcept { return target_; }
  FiniteMetricSpace& source() noexcept { return source_; }
  FiniteMetricSpace& target() noexcept { return target_; }
  std::size_t operator()(std::size_t x) const { return assign_.at(x); }
  const std::vector<std::size_t>& assignment() const noexcept { return assign_; }

  bool surjective() const noexcept { return surjective_; }
  const std::vector<std::size_t>& fiber(std::size_t y) const { return fibers_.at(y); }

  // Distance from source point x to the fiber over y (+inf if empty).
  double distance_to_fiber(std::size_t x, std::size_t y) const;

 private:
  FiniteMetricSpace source_;
  FiniteMetricSpace target_;
  std::vector<std::size_t> assign_;
  std::vector<std::vector<std::size_t>> fibers_;
  bool surjective_ = false;
};

// {"source": {"n", "dist"}, "target": {...}, "assign": [...],
//  "source_order": [[i, j]...], "target_order": [[i, j]...]}
// Loading validates the triangle inequality on both spaces.
MetricMapTable map_table_from_json(const std::string& text);
std::string map_table_to_json(const MetricMapTable& table);

double lipschitz_constant(const MetricMapTable& m);

struct QuotientModuli {
  double omega = 0;
  double Omega = 0;
};

// Closed balls. Omega(r) is the largest image distance over source pairs at
// distance <= r; omega(r) is the largest realized target distance s such that
// every ball B(f(x), s) is covered by f(B(x, r)).
QuotientModuli quotient_moduli(const MetricMapTable& m, double r);

// L(delta): max ratio over pairs with d_S >= delta (0 when there are none).
double coarse_lipschitz(const MetricMapTable& m, double delta);
// Unrestricted coarse co-Lipschitz constant c(delta); +inf when unconstrained.
double coarse_colipschitz(const MetricMapTable& m, double delta);
// Requires a target order; +inf when unconstrained.
double atd_colipschitz(const MetricMapTable& m, double delta);
// The largest finite value of c_atd over all delta (+inf if none is finite).
double atd_colipschitz_limit(const MetricMapTable& m);

struct CoarseProfile {
  double lip = 0;
  std::vector<double> deltas;
  std::vector<double> L;
  std::vector<double> c;
  std::optional<std::vector<double>> c_atd;
  std::optional<double> c_atd_inf;  // max over the tabulated deltas
};

CoarseProfile coarse_profile(const MetricMapTable& m, const std::vector<double>& deltas);
std::string coarse_profile_to_json(const CoarseProfile& profile);

// Direct evaluation of the ATD co-Lipschitz condition with constant c at
// scale delta, scanning R over the realized fiber distances.
bool check_atd_colip(const MetricMapTable& m, double c, double delta);

template <class Source, class Target>
struct BasicForkWitness {
  double r = 0;
  Target mu0{};
  Target mu1{};
  std::vector<Target> mu2;
  Source sigma0{};
  Source sigma1{};
  std::vector<Source> sigma2;
  double eps = 0;
  double c_inf = 1;
};

using ForkWitness = BasicForkWitness<std::size_t, std::size_t>;

struct ForkCheck {
  bool target_shape = false;  // d(mu0,mu1) = d(mu1,mu2k) = d(mu0,mu2k)/2 = r
  bool arm01 = false;         // d(s0,s1) <= (1+3eps) r / c
  bool arms12 = false;        // d(s1,s2k) <= (1+3eps) r / c
  bool spread = false;        // d(s0,s2k)/2 > (1-80eps) r / c   (>= when eps = 0)
  double max_arm = 0;
  double min_spread = kInfinity;
  bool ok() const noexcept { return target_shape && arm01 && arms12 && spread; }
};

inline double fork_arm_bound(double eps, double r, double c_inf) { return (1 + 3 * eps) * r / c_inf; }
inline double fork_spread_bound(double eps, double r, double c_inf) { return (1 - 80 * eps) * r / c_inf; }

// With eps = 0 the arms already force d(s0,s2k) <= 2r/c, so the spread
// inequality is taken in its closed form there.
inline bool fork_spread_holds(double half_spread, double eps, double r, double c_inf) {
  const double bound = fork_spread_bound(eps, r, c_inf);
  return eps == 0 ? half_spread >= bound : half_spread > bound;
}

template <class Source, class Target, class SourceDist, class TargetDist>
ForkCheck check_fork(const BasicForkWitness<Source, Target>& w, SourceDist&& ds, TargetDist&& dt) {
  ForkCheck out;
  out.target_shape = !w.mu2.empty() && w.mu2.size() == w.sigma2.size() && dt(w.mu0, w.mu1) == w.r;
  for (const auto& m : w.mu2) {
    out.target_shape = out.target_shape && dt(w.mu1, m) == w.r && dt(w.mu0, m) == 2 * w.r;
  }
  const double arm = fork_arm_bound(w.eps, w.r, w.c_inf);
  const double d01 = ds(w.sigma0, w.sigma1);
  out.arm01 = d01 <= arm;
  out.max_arm = d01;
  out.arms12 = true;
  out.spread = !w.sigma2.empty();
  for (const auto& s : w.sigma2) {
    const double d12 = ds(w.sigma1, s);
    const double half = ds(w.sigma0, s) / 2;
    out.max_arm = std::max(out.max_arm, d12);
    out.min_spread = std::min(out.min_spread, half);
    out.arms12 = out.arms12 && d12 <= arm;
    out.spread = out.spread && fork_spread_holds(half, w.eps, w.r, w.c_inf);
  }
  return out;
}

struct ForkOptions {
  std::size_t max_arms = 2;
  // Defaults to atd_colipschitz_limit(m).
  std::optional<double> c_inf;
};

// Exhaustive search, in increasing (r, mu0, mu1) order, for a target fork
// mu0 < mu1 < mu2k with pairwise-2r arms, then for preimages satisfying the
// three fork inequalities. Returns nullopt on spaces with fewer than 4 points.
std::optional<ForkWitness> fork_search(const MetricMapTable& m, double eps, double r_min,
                                       const ForkOptions& options = {});
ForkCheck check_fork(const MetricMapTable& m, const ForkWitness& w);
std::string fork_witness_to_json(const ForkWitness& w);

// 83 eps / (1 + 3 eps).
double beta_bound_from_fork(double eps);
Rational beta_bound_from_fork(const Rational& eps);

}  // namespace laakso_lab
