#include "laakso_lab/quotient_analysis.hpp"

#include <algorithm>
#include <array>

#include <json.hpp>

#include "laakso_lab/error.hpp"

namespace laakso_lab {

using nlohmann::json;

FiniteMetricSpace::FiniteMetricSpace(std::size_t n, std::vector<double> dist) : n_(n), dist_(std::move(dist)) {
  if (dist_.size() != n_ * n_) throw DomainError("distance table must be n*n");
  for (std::size_t i = 0; i < n_; ++i) {
    if ((*this)(i, i) != 0) throw DomainError("distance table must have a zero diagonal");
    for (std::size_t j = 0; j < n_; ++j) {
      const double d = (*this)(i, j);
      if (!(d >= 0) || std::isnan(d)) throw DomainError("distances must be non-negative");
      if (d != (*this)(j, i)) throw DomainError("distance table must be symmetric");
    }
  }
}

FiniteMetricSpace FiniteMetricSpace::from_rows(const std::vector<std::vector<double>>& rows) {
  std::vector<double> flat;
  flat.reserve(rows.size() * rows.size());
  for (const auto& row : rows) {
    if (row.size() != rows.size()) throw DomainError("distance table must be square");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return FiniteMetricSpace(rows.size(), std::move(flat));
}

void FiniteMetricSpace::set_order(const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  order_.assign(n_ * n_, 0);
  for (const auto& [i, j] : pairs) {
    if (i >= n_ || j >= n_) throw DomainError("order pair out of range");
    if (i == j) throw DomainError("order must be irreflexive");
    order_[i * n_ + j] = 1;
  }
}

std::vector<std::pair<std::size_t, std::size_t>> FiniteMetricSpace::order_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (order_.empty()) return out;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (order_[i * n_ + j]) out.emplace_back(i, j);
    }
  }
  return out;
}

std::optional<std::array<std::size_t, 3>> FiniteMetricSpace::triangle_violation(double tolerance) const {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t k = 0; k < n_; ++k) {
        if ((*this)(i, k) > (*this)(i, j) + (*this)(j, k) + tolerance) return std::array{i, j, k};
      }
    }
  }
  return std::nullopt;
}

std::vector<double> FiniteMetricSpace::realized_distances() const {
  std::vector<double> out(dist_.begin(), dist_.end());
  out.push_back(0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

MetricMapTable::MetricMapTable(FiniteMetricSpace source, FiniteMetricSpace target, std::vector<std::size_t> assign)
    : source_(std::move(source)), target_(std::move(target)), assign_(std::move(assign)) {
  if (assign_.size() != source_.size()) throw DomainError("assignment must cover every source point");
  fibers_.assign(target_.size(), {});
  for (std::size_t x = 0; x < assign_.size(); ++x) {
    if (assign_[x] >= target_.size()) throw DomainError("assignment points outside the target");
    fibers_[assign_[x]].push_back(x);
  }
  surjective_ = std::none_of(fibers_.begin(), fibers_.end(), [](const auto& f) { return f.empty(); });
}

double MetricMapTable::distance_to_fiber(std::size_t x, std::size_t y) const {
  double best = kInfinity;
  for (std::size_t z : fibers_.at(y)) best = std::min(best, source_(x, z));
  return best;
}

namespace {

FiniteMetricSpace space_from_json(const json& j, const char* name) {
  if (!j.is_object() || !j.contains("n") || !j.contains("dist")) {
    throw ParseError(std::string(name) + " must be {\"n\": int, \"dist\": [[real]]}");
  }
  const auto n = j.at("n").get<std::size_t>();
  const auto rows = j.at("dist").get<std::vector<std::vector<double>>>();
  if (rows.size() != n) throw ParseError(std::string(name) + ".dist must have n rows");
  auto space = FiniteMetricSpace::from_rows(rows);
  if (const auto bad = space.triangle_violation()) {
    throw ParseError(std::string(name) + " violates the triangle inequality at (" + std::to_string((*bad)[0]) + "," +
                     std::to_string((*bad)[1]) + "," + std::to_string((*bad)[2]) + ")");
  }
  return space;
}

json space_to_json(const FiniteMetricSpace& s) {
  std::vector<std::vector<double>> rows(s.size(), std::vector<double>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) rows[i][j] = s(i, j);
  }
  return {{"n", s.size()}, {"dist", rows}};
}

json order_to_json(const FiniteMetricSpace& s) {
  json out = json::array();
  for (const auto& [i, j] : s.order_pairs()) out.push_back({i, j});
  return out;
}

json finite_or_string(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

// (D, rho) for every sigma and every nu strictly below lambda(sigma).
struct Gap {
  double image = 0;
  double fiber = 0;
};

std::vector<Gap> atd_gaps(const MetricMapTable& m) {
  if (!m.target().has_order()) throw DomainError("ATD constants need an order on the target");
  std::vector<Gap> gaps;
  const auto& t = m.target();
  for (std::size_t s = 0; s < m.source().size(); ++s) {
    const std::size_t y = m(s);
    for (std::size_t nu = 0; nu < t.size(); ++nu) {
      if (t.before(y, nu)) gaps.push_back({t(y, nu), m.distance_to_fiber(s, nu)});
    }
  }
  return gaps;
}

std::vector<Gap> coarse_gaps(const MetricMapTable& m) {
  std::vector<Gap> gaps;
  const auto& t = m.target();
  for (std::size_t s = 0; s < m.source().size(); ++s) {
    const std::size_t y = m(s);
    for (std::size_t other = 0; other < t.size(); ++other) {
      if (other != y) gaps.push_back({t(y, other), m.distance_to_fiber(s, other)});
    }
  }
  return gaps;
}

double min_ratio_above(const std::vector<Gap>& gaps, double delta) {
  double best = kInfinity;
  for (const auto& g : gaps) {
    if (g.fiber > delta) best = std::min(best, g.image / g.fiber);
  }
  return best;
}

void require_surjective(const MetricMapTable& m) {
  if (!m.surjective()) throw DomainError("map must be surjective");
}

}  // namespace

MetricMapTable map_table_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("map table is not valid JSON: ") + e.what());
  }
  try {
    auto source = space_from_json(j.at("source"), "source");
    auto target = space_from_json(j.at("target"), "target");
    auto assign = j.at("assign").get<std::vector<std::size_t>>();
    if (j.contains("source_order")) source.set_order(j.at("source_order").get<std::vector<std::pair<std::size_t, std::size_t>>>());
    if (j.contains("target_order")) target.set_order(j.at("target_order").get<std::vector<std::pair<std::size_t, std::size_t>>>());
    return MetricMapTable(std::move(source), std::move(target), std::move(assign));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed map table: ") + e.what());
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid map table: ") + e.what());
  }
}

std::string map_table_to_json(const MetricMapTable& table) {
  json out{{"schema", 1},
           {"source", space_to_json(table.source())},
           {"target", space_to_json(table.target())},
           {"assign", table.assignment()}};
  if (table.source().has_order()) out["source_order"] = order_to_json(table.source());
  if (table.target().has_order()) out["target_order"] = order_to_json(table.target());
  return out.dump();
}

double lipschitz_constant(const MetricMapTable& m) { return coarse_lipschitz(m, 0); }

double coarse_lipschitz(const MetricMapTable& m, double delta) {
  const auto& s = m.source();
  const auto& t = m.target();
  double best = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      const double d = s(i, j);
      if (d > 0 && d >= delta) best = std::max(best, t(m(i), m(j)) / d);
    }
  }
  return best;
}

QuotientModuli quotient_moduli(const MetricMapTable& m, double r) {
  require_surjective(m);
  if (!(r > 0)) throw DomainError("radius must be positive");
  const auto& s = m.source();
  const auto& t = m.target();
  QuotientModuli out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (s(i, j) <= r) out.Omega = std::max(out.Omega, t(m(i), m(j)));
    }
  }
  const auto realized = t.realized_distances();
  out.omega = kInfinity;
  for (std::size_t x = 0; x < s.size(); ++x) {
    double bad = kInfinity;
    for (std::size_t y = 0; y < t.size(); ++y) {
      if (m.distance_to_fiber(x, y) > r) bad = std::min(bad, t(m(x), y));
    }
    // largest realized distance strictly below the first uncovered one
    const auto it = std::lower_bound(realized.begin(), realized.end(), bad);
    const double reach = it == realized.begin() ? 0 : *std::prev(it);
    out.omega = std::min(out.omega, reach);
  }
  if (s.size() == 0) out.omega = 0;
  return out;
}

double coarse_colipschitz(const MetricMapTable& m, double delta) {
  require_surjective(m);
  return min_ratio_above(coarse_gaps(m), delta);
}

double atd_colipschitz(const MetricMapTable& m, double delta) {
  require_surjective(m);
  return min_ratio_above(atd_gaps(m), delta);
}

double atd_colipschitz_limit(const MetricMapTable& m) {
  require_surjective(m);
  const auto gaps = atd_gaps(m);
  // c_atd is a non-decreasing step function of delta, finite exactly while
  // some gap has rho > delta; its last finite step is set by the largest rho.
  double largest = -1;
  for (const auto& g : gaps) {
    if (std::isfinite(g.fiber)) largest = std::max(largest, g.fiber);
  }
  if (largest <= 0) return kInfinity;
  double best = kInfinity;
  for (const auto& g : gaps) {
    if (g.fiber == largest) best = std::min(best, g.image / g.fiber);
  }
  return best;
}

CoarseProfile coarse_profile(const MetricMapTable& m, const std::vector<double>& deltas) {
  require_surjective(m);
  CoarseProfile p;
  p.lip = lipschitz_constant(m);
  p.deltas = deltas;
  std::sort(p.deltas.begin(), p.deltas.end());
  const auto co = coarse_gaps(m);
  std::optional<std::vector<Gap>> atd;
  if (m.target().has_order() && m.source().has_order()) atd = atd_gaps(m);
  if (atd) p.c_atd.emplace();
  for (double delta : p.deltas) {
    if (!(delta >= 0)) throw DomainError("delta grid must be non-negative");
    p.L.push_back(coarse_lipschitz(m, delta));
    p.c.push_back(min_ratio_above(co, delta));
    if (atd) p.c_atd->push_back(min_ratio_above(*atd, delta));
  }
  if (p.c_atd && !p.c_atd->empty()) p.c_atd_inf = *std::max_element(p.c_atd->begin(), p.c_atd->end());
  return p;
}

std::string coarse_profile_to_json(const CoarseProfile& p) {
  json rows = json::array();
  for (std::size_t i = 0; i < p.deltas.size(); ++i) {
    json row{{"delta", p.deltas[i]}, {"L", finite_or_string(p.L[i])}, {"c", finite_or_string(p.c[i])}};
    if (p.c_atd) row["c_atd"] = finite_or_string((*p.c_atd)[i]);
    rows.push_back(row);
  }
  json out{{"schema", 1}, {"lip", finite_or_string(p.lip)}, {"profile", rows}};
  if (p.c_atd_inf) out["c_atd_inf"] = finite_or_string(*p.c_atd_inf);
  return out.dump();
}

bool check_atd_colip(const MetricMapTable& m, double c, double delta) {
  require_surjective(m);
  const auto& s = m.source();
  const auto& t = m.target();
  if (!t.has_order()) throw DomainError("ATD check needs an order on the target");
  std::vector<double> candidates;
  for (std::size_t sigma = 0; sigma < s.size(); ++sigma) {
    const std::size_t y = m(sigma);
    for (std::size_t nu = 0; nu < t.size(); ++nu) {
      if (!t.before(y, nu)) continue;
      const double gap = t(y, nu);
      // Whether some preimage of nu lies within R of sigma changes only at the
      // realized fiber distances, so R ranges over [delta, infinity) split at
      // those values; on each piece [R_i, R_{i+1}) the hypothesis gap < cR
      // is satisfiable iff gap < c R_{i+1}.
      candidates.assign(1, delta);
      for (std::size_t z : m.fiber(nu)) {
        if (s(sigma, z) >= delta) candidates.push_back(s(sigma, z));
      }
      std::sort(candidates.begin(), candidates.end());
      candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double radius = candidates[i];
        const bool reached = std::any_of(m.fiber(nu).begin(), m.fiber(nu).end(),
                                         [&](std::size_t z) { return s(sigma, z) <= radius; });
        if (reached) break;
        const double upper = i + 1 < candidates.size() ? candidates[i + 1] : kInfinity;
        if (gap < c * upper) return false;
      }
    }
  }
  return true;
}

std::optional<ForkWitness> fork_search(const MetricMapTable& m, double eps, double r_min, const ForkOptions& options) {
  const auto& s = m.source();
  const auto& t = m.target();
  if (s.size() < 4 || t.size() < 3 || !m.surjective() || options.max_arms == 0) return std::nullopt;
  if (!t.has_order()) return std::nullopt;
  const double c_inf = options.c_inf.value_or(atd_colipschitz_limit(m));
  if (!std::isfinite(c_inf) || !(c_inf > 0)) return std::nullopt;
  const std::size_t min_arms = std::min<std::size_t>(2, options.max_arms);

  for (double r : t.realized_distances()) {
    if (r < r_min || r <= 0) continue;
    const double arm = fork_arm_bound(eps, r, c_inf);
    for (std::size_t mu0 = 0; mu0 < t.size(); ++mu0) {
      for (std::size_t mu1 = 0; mu1 < t.size(); ++mu1) {
        if (!t.before(mu0, mu1) || t(mu0, mu1) != r) continue;
        std::vector<std::size_t> arms;
        for (std::size_t mu2 = 0; mu2 < t.size() && arms.size() < options.max_arms; ++mu2) {
          if (!t.before(mu1, mu2) || t(mu1, mu2) != r || t(mu0, mu2) != 2 * r) continue;
          const bool spread = std::all_of(arms.begin(), arms.end(), [&](std::size_t a) { return t(a, mu2) == 2 * r; });
          if (spread) arms.push_back(mu2);
        }
        if (arms.size() < min_arms) continue;

        for (std::size_t sigma0 : m.fiber(mu0)) {
          for (std::size_t sigma1 : m.fiber(mu1)) {
            if (s(sigma0, sigma1) > arm) continue;
            std::vector<std::size_t> lifted;
            for (std::size_t mu2 : arms) {
              const auto& fiber = m.fiber(mu2);
              const auto hit = std::find_if(fiber.begin(), fiber.end(), [&](std::size_t sigma2) {
                return s(sigma1, sigma2) <= arm && fork_spread_holds(s(sigma0, sigma2) / 2, eps, r, c_inf);
              });
              if (hit == fiber.end()) break;
              lifted.push_back(*hit);
            }
            if (lifted.size() == arms.size()) {
              return ForkWitness{r, mu0, mu1, arms, sigma0, sigma1, lifted, eps, c_inf};
            }
          }
        }
      }
    }
  }
  return std::nullopt;
}

ForkCheck check_fork(const MetricMapTable& m, const ForkWitness& w) {
  ForkCheck out = check_fork(
      w, [&](std::size_t a, std::size_t b) { return m.source()(a, b); },
      [&](std::size_t a, std::size_t b) { return m.target()(a, b); });
  const bool consistent = m(w.sigma0) == w.mu0 && m(w.sigma1) == w.mu1 &&
                          std::equal(w.sigma2.begin(), w.sigma2.end(), w.mu2.begin(), w.mu2.end(),
                                     [&](std::size_t sg, std::size_t mu) { return m(sg) == mu; });
  out.target_shape = out.target_shape && consistent;
  return out;
}

std::string fork_witness_to_json(const ForkWitness& w) {
  json out{{"schema", 1},   {"r", w.r},           {"eps", w.eps},       {"c_inf", finite_or_string(w.c_inf)},
           {"mu0", w.mu0},  {"mu1", w.mu1},       {"mu2", w.mu2},       {"sigma0", w.sigma0},
           {"sigma1", w.sigma1}, {"sigma2", w.sigma2}};
  return out.dump();
}

double beta_bound_from_fork(double eps) {
  if (!(eps >= 0)) throw DomainError("eps must be non-negative");
  return 83 * eps / (1 + 3 * eps);
}

Rational beta_bound_from_fork(const Rational& eps) {
  if (eps < 0) throw DomainError("eps must be non-negative");
  return Rational(83) * eps / (Rational(1) + Rational(3) * eps);
}

}  // namespace laakso_lab
