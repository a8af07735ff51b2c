#include <doctest.h>

#include <cmath>
#include <random>

#include "laakso_lab/error.hpp"
#include "laakso_lab/moduli.hpp"

using namespace laakso_lab;

TEST_SUITE("moduli") {
  TEST_CASE("auc closed form and oracle") {
    const LpModel l2(2);
    CHECK(auc_model(l2, 1) == doctest::Approx(std::sqrt(2.0) - 1).epsilon(1e-14));
    CHECK(std::abs(auc_oracle(l2, 1) - auc_model(l2, 1)) <= 1e-9);
    CHECK(auc_model(l2, 1e-8) < 1e-15);
    CHECK(std::abs(auc_model(LpModel(1.001), 0.5) - 0.5) < 1e-3);
    CHECK_THROWS_AS(auc_model(l2, 0), DomainError);
    CHECK_THROWS_AS(auc_model(l2, 1.5), DomainError);
    CHECK_THROWS_AS(LpModel(1.0), DomainError);
  }

  TEST_CASE("beta closed form and oracle") {
    const LpModel l2(2);
    CHECK(beta_model(l2, std::sqrt(2.0)) == doctest::Approx(1 - std::sqrt(2.0) / 2).epsilon(1e-12));
    CHECK(std::abs(beta_oracle(l2, 1) - beta_model(l2, 1)) <= 1e-6);
    CHECK(beta_model(l2, 1e-6) < 1e-10);
    CHECK_THROWS_AS(beta_model(l2, 1.5), DomainError);
    CHECK_THROWS_AS(beta_model(l2, -0.1), DomainError);
  }

  TEST_CASE("closed forms match the oracles on 100 seeded draws") {
    std::mt19937_64 rng(0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      const LpModel m(1.1 + 4.0 * unit(rng));
      const double t = 1e-3 + (1 - 1e-3) * unit(rng);
      CHECK(std::abs(auc_model(m, t) - auc_oracle(m, t)) <= 1e-9);
      const double tb = m.beta_t_max() * t;
      CHECK(std::abs(beta_model(m, tb) - beta_oracle(m, tb)) <= 1e-6);
      CHECK(std::abs(beta_model(m, tb, BetaSign::kMinus) - beta_oracle(m, tb, BetaSign::kMinus)) <= 1e-6);
    }
  }

  TEST_CASE("both sign conventions give the same beta") {
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
      const LpModel m(p);
      for (int k = 1; k <= 20; ++k) {
        const double t = m.beta_t_max() * k / 20;
        CHECK(beta_model(m, t, BetaSign::kPlus) == beta_model(m, t, BetaSign::kMinus));
      }
    }
  }

  TEST_CASE("beta(t) <= auc(2t) on 50-point grids") {
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
      const auto r = check_beta_leq_auc(LpModel(p), lemma42_grid(50));
      CHECK(r.passed);
      CHECK(r.points == 50);
      CHECK(r.min_margin >= 0);
    }
    CHECK(check_beta_leq_auc(LpModel(2), {0.1, 0.2, 0.3, 0.4, 0.5}).passed);
    CHECK(lemma42_grid(50).back() == 0.5);
    CHECK_THROWS_AS(check_beta_leq_auc(LpModel(2), {0.6}), DomainError);
  }

  TEST_CASE("moduli are non-decreasing") {
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
      const LpModel m(p);
      CHECK(is_non_decreasing(tabulate(ModulusKind::kAuc, m, 0.01, 1, 100)));
      CHECK(is_non_decreasing(tabulate(ModulusKind::kAus, m, 0.01, 1, 100)));
      CHECK(is_non_decreasing(tabulate(ModulusKind::kBeta, m, 0.01, m.beta_t_max(), 100)));
    }
  }

  TEST_CASE("power type fits") {
    ModulusTable exact;
    for (int i = 0; i < 10; ++i) {
      const double t = std::pow(10.0, -3 + i * 0.25);
      exact.samples.emplace_back(t, 0.5 * t * t * t);
    }
    const auto fit = power_type_fit(exact);
    CHECK(std::abs(fit.p - 3) < 1e-9);
    CHECK(std::abs(fit.C - 0.5) < 1e-9);

    for (double p : {1.5, 2.0, 3.0, 4.0}) {
      for (auto kind : {ModulusKind::kAuc, ModulusKind::kBeta}) {
        const auto f = power_type_fit(tabulate(kind, LpModel(p), 1e-3, 1e-1, 20, true));
        CHECK_MESSAGE(std::abs(f.p - p) <= 0.05 * p, to_string(kind) << " p=" << p << " fitted " << f.p);
      }
    }
    ModulusTable tiny;
    tiny.samples = {{0.1, 1}, {0.2, 2}};
    CHECK_THROWS_AS(power_type_fit(tiny), DomainError);
    tiny.samples.emplace_back(0.3, 0);
    CHECK_THROWS_AS(power_type_fit(tiny), DomainError);
  }

  TEST_CASE("composed power type") {
    CHECK(composed_power_type(2, 0) == 2);
    CHECK(composed_power_type(2, 0.1) == doctest::Approx((1.9 * 2.1 - 1.9) / 0.9).epsilon(1e-14));
    CHECK(composed_power_type(2, 0.1) == doctest::Approx(2.322222222).epsilon(1e-9));
    double previous = INFINITY;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
      const double ratio = std::abs(composed_power_type(3, eps) - 3) / eps;
      CHECK(ratio <= previous);
      CHECK(ratio < 10);
      previous = ratio;
    }
    CHECK_THROWS_AS(composed_power_type(2, 1), DomainError);
  }

  TEST_CASE("tables and csv") {
    const auto table = tabulate(ModulusKind::kBeta, LpModel(2), 0.01, 0.5, 3);
    REQUIRE(table.samples.size() == 3);
    CHECK(table.samples.front().first == 0.01);
    CHECK(table.samples.back().first == 0.5);
    const auto csv = modulus_table_to_csv(table);
    CHECK(csv.rfind("t,value\n0.01,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(parse_modulus_kind("aus") == ModulusKind::kAus);
    CHECK_THROWS_AS(parse_modulus_kind("nope"), ParseError);
    CHECK_THROWS_AS(tabulate(ModulusKind::kAuc, LpModel(2), 0.5, 0.1, 3), DomainError);
  }
}
