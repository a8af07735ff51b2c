#pragma once

// Asymptotic moduli of the disjoint-support extremal model for l_p.
//
// auc:  (1 + t^p)^(1/p) - 1                       t in (0, 1]
// aus:  same closed form, no oracle               t in (0, 1]
// beta: 1 - ((1 + (1 - s^p)^(1/p))^p + s^p)^(1/p) / 2,  s = t 2^(-1/p),
//                                                 t in (0, 2^(1/p)]
//
// These are model values, checked against small numerical optimizations of
// the same model, not exact moduli of a Banach space.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace laakso_lab {

class LpModel {
 public:
  explicit LpModel(double p);  // DomainError unless p > 1
  double p() const noexcept { return p_; }
  double beta_t_max() const;  // 2^(1/p)

 private:
  double p_;
};

enum class ModulusKind { kAuc, kAus, kBeta };

// Whether the beta modulus is written with ||x + x_n|| or ||x - x_n||.
enum class BetaSign { kPlus, kMinus };

ModulusKind parse_modulus_kind(const std::string& name);  // "auc", "aus", "beta"
std::string to_string(ModulusKind kind);

double auc_model(const LpModel& m, double t);
double aus_model(const LpModel& m, double t);
double beta_model(const LpModel& m, double t, BetaSign sign = BetaSign::kPlus);
double modulus_value(ModulusKind kind, const LpModel& m, double t);

// Golden-section minimization of ||x + z|| - 1 over ||z|| in [t, 4].
double auc_oracle(const LpModel& m, double t);
// Maximizes ||x +/- x_n|| / 2 over ||x|| <= 1, ||w||^p + s^p <= 1, s >= t 2^(-1/p)
// and the alignment sign of x against w: grid search, then pattern refinement.
double beta_oracle(const LpModel& m, double t, BetaSign sign = BetaSign::kPlus);

struct ModulusTable {
  ModulusKind kind = ModulusKind::kBeta;
  double p = 2;
  std::vector<std::pair<double, double>> samples;  // (t, value), t increasing
};

// `points` evenly spaced values from tmin to tmax (geometric when `log_spacing`).
ModulusTable tabulate(ModulusKind kind, const LpModel& m, double tmin, double tmax, std::size_t points,
                      bool log_spacing = false);
std::string modulus_table_to_csv(const ModulusTable& table);  // "t,value" header
bool is_non_decreasing(const ModulusTable& table);

struct PowerFit {
  double C = 0;
  double p = 0;
};

// Least squares of log(value) against log(t). DomainError on fewer than 3
// samples or a non-positive value.
PowerFit power_type_fit(const ModulusTable& table);

struct Lemma42Report {
  double p = 2;
  std::size_t points = 0;
  bool passed = true;
  double min_margin = 0;  // min over the grid of auc(2t) - beta(t)
  double worst_t = 0;
};

// beta(t) <= auc(2t) pointwise. Grid values must lie in (0, 1/2].
Lemma42Report check_beta_leq_auc(const LpModel& m, const std::vector<double>& t_grid,
                                 BetaSign sign = BetaSign::kPlus);
std::vector<double> lemma42_grid(std::size_t points = 50);  // k / (2 points), k = 1..points
std::string lemma42_report_to_json(const Lemma42Report& report);

// ((p - eps)(p + eps) - (p - eps)) / (p - eps - 1); DomainError if p - eps <= 1.
double composed_power_type(double p, double eps);

}  // namespace laakso_lab
