#include "laakso_lab/moduli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "laakso_lab/error.hpp"

namespace laakso_lab {

LpModel::LpModel(double p) : p_(p) {
  if (!(p > 1) || !std::isfinite(p)) throw DomainError("p must be a finite number > 1");
}

double LpModel::beta_t_max() const { return std::pow(2.0, 1.0 / p_); }

ModulusKind parse_modulus_kind(const std::string& name) {
  if (name == "auc") return ModulusKind::kAuc;
  if (name == "aus") return ModulusKind::kAus;
  if (name == "beta") return ModulusKind::kBeta;
  throw ParseError("unknown modulus kind '" + name + "'");
}

std::string to_string(ModulusKind kind) {
  switch (kind) {
    case ModulusKind::kAuc: return "auc";
    case ModulusKind::kAus: return "aus";
    case ModulusKind::kBeta: return "beta";
  }
  return "?";
}

namespace {

void require_range(double t, double hi, const char* what) {
  if (!(t > 0) || t > hi) {
    throw DomainError(std::string(what) + ": t = " + std::to_string(t) + " outside (0, " + std::to_string(hi) + "]");
  }
}

double lp_norm2(double a, double b, double p) { return std::pow(std::pow(std::abs(a), p) + std::pow(std::abs(b), p), 1 / p); }

// ||x +/- x_n|| for x = sigma a w/||w||, x_n = w + s e_n, with ||w|| = omega.
double midpoint_norm(double a, double omega, double s, int sigma, BetaSign sign, double p) {
  const double along = sign == BetaSign::kPlus ? sigma * a + omega : sigma * a - omega;
  return lp_norm2(along, s, p);
}

}  // namespace

double auc_model(const LpModel& m, double t) {
  require_range(t, 1.0, "auc");
  return lp_norm2(1.0, t, m.p()) - 1;
}

double aus_model(const LpModel& m, double t) {
  require_range(t, 1.0, "aus");
  return lp_norm2(1.0, t, m.p()) - 1;
}

double beta_model(const LpModel& m, double t, BetaSign sign) {
  require_range(t, m.beta_t_max(), "beta");
  const double p = m.p();
  const double s = std::min(1.0, t * std::pow(2.0, -1 / p));
  const double omega = std::pow(std::max(0.0, 1 - std::pow(s, p)), 1 / p);
  // The extremal x is aligned with w for the + form and against it for the - form.
  const int sigma = sign == BetaSign::kPlus ? 1 : -1;
  return 1 - midpoint_norm(1.0, omega, s, sigma, sign, p) / 2;
}

double modulus_value(ModulusKind kind, const LpModel& m, double t) {
  switch (kind) {
    case ModulusKind::kAuc: return auc_model(m, t);
    case ModulusKind::kAus: return aus_model(m, t);
    case ModulusKind::kBeta: return beta_model(m, t);
  }
  return 0;
}

double auc_oracle(const LpModel& m, double t) {
  require_range(t, 1.0, "auc");
  auto f = [&](double r) { return lp_norm2(1.0, r, m.p()) - 1; };
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double lo = t, hi = 4;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-13) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::min({f(lo), f(hi), f1, f2});
}

double beta_oracle(const LpModel& m, double t, BetaSign sign) {
  require_range(t, m.beta_t_max(), "beta");
  const double p = m.p();
  const double s_min = std::min(1.0, t * std::pow(2.0, -1 / p));

  // Parameters in the unit cube: a = ||x||, s = s_min + (1 - s_min) u,
  // omega = v (1 - s^p)^(1/p).
  auto value = [&](const std::array<double, 3>& q, int sigma) {
    const double s = s_min + (1 - s_min) * q[1];
    const double omega = q[2] * std::pow(std::max(0.0, 1 - std::pow(s, p)), 1 / p);
    return midpoint_norm(q[0], omega, s, sigma, sign, p) / 2;
  };

  double best = -1;
  for (int sigma : {1, -1}) {
    constexpr int kGrid = 16;
    std::array<double, 3> q{}, best_q{};
    double local = -1;
    for (int i = 0; i <= kGrid; ++i) {
      for (int j = 0; j <= kGrid; ++j) {
        for (int k = 0; k <= kGrid; ++k) {
          q = {double(i) / kGrid, double(j) / kGrid, double(k) / kGrid};
          const double v = value(q, sigma);
          if (v > local) {
            local = v;
            best_q = q;
          }
        }
      }
    }
    for (double step = 1.0 / kGrid; step > 1e-13;) {
      bool moved = false;
      for (int axis = 0; axis < 3; ++axis) {
        for (double dir : {1.0, -1.0}) {
          auto trial = best_q;
          trial[axis] = std::clamp(trial[axis] + dir * step, 0.0, 1.0);
          const double v = value(trial, sigma);
          if (v > local) {
            local = v;
            best_q = trial;
            moved = true;
          }
        }
      }
      if (!moved) step /= 2;
    }
    best = std::max(best, local);
  }
  return 1 - best;
}

ModulusTable tabulate(ModulusKind kind, const LpModel& m, double tmin, double tmax, std::size_t points,
                      bool log_spacing) {
  if (points == 0) throw DomainError("points must be positive");
  if (!(tmin > 0) || tmin > tmax || (points > 1 && tmin == tmax)) throw DomainError("need 0 < tmin < tmax");
  ModulusTable table;
  table.kind = kind;
  table.p = m.p();
  for (std::size_t i = 0; i < points; ++i) {
    const double frac = points == 1 ? 0.0 : double(i) / double(points - 1);
    const double t = log_spacing ? tmin * std::pow(tmax / tmin, frac) : tmin + (tmax - tmin) * frac;
    table.samples.emplace_back(t, modulus_value(kind, m, t));
  }
  return table;
}

std::string modulus_table_to_csv(const ModulusTable& table) {
  std::ostringstream out;
  out.precision(17);
  out << "t,value\n";
  for (const auto& [t, v] : table.samples) out << t << ',' << v << '\n';
  return out.str();
}

bool is_non_decreasing(const ModulusTable& table) {
  for (std::size_t i = 1; i < table.samples.size(); ++i) {
    if (table.samples[i].first <= table.samples[i - 1].first) return false;
    if (table.samples[i].second < table.samples[i - 1].second) return false;
  }
  return true;
}

PowerFit power_type_fit(const ModulusTable& table) {
  const auto& s = table.samples;
  if (s.size() < 3) throw DomainError("power_type_fit needs at least 3 samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [t, v] : s) {
    if (!(t > 0) || !(v > 0)) throw DomainError("power_type_fit needs positive samples");
    const double x = std::log(t), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = double(s.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0) throw DomainError("power_type_fit needs distinct t values");
  const double slope = (n * sxy - sx * sy) / denom;
  return {std::exp((sy - slope * sx) / n), slope};
}

Lemma42Report check_beta_leq_auc(const LpModel& m, const std::vector<double>& t_grid, BetaSign sign) {
  Lemma42Report report;
  report.p = m.p();
  report.points = t_grid.size();
  report.min_margin = std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    require_range(t, 0.5, "lemma grid");
    const double margin = auc_model(m, 2 * t) - beta_model(m, t, sign);
    if (margin < report.min_margin) {
      report.min_margin = margin;
      report.worst_t = t;
    }
    if (margin < 0) report.passed = false;
  }
  return report;
}

std::vector<double> lemma42_grid(std::size_t points) {
  std::vector<double> grid;
  for (std::size_t k = 1; k <= points; ++k) grid.push_back(double(k) / double(2 * points));
  return grid;
}

std::string lemma42_report_to_json(const Lemma42Report& r) {
  nlohmann::json out{{"schema", 1},         {"passed", r.passed},         {"p", r.p},
                     {"points", r.points}, {"min_margin", r.min_margin}, {"worst_t", r.worst_t}};
  return out.dump();
}

double composed_power_type(double p, double eps) {
  const double q = p - eps;
  if (!(q > 1)) throw DomainError("composed_power_type needs p - eps > 1");
  return (q * (p + eps) - q) / (q - 1);
}

}  // namespace laakso_lab
