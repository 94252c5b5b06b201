#include <doctest.h>

#include <cmath>
#include <random>

#include "gsc/error.hpp"
#include "gsc/fault_metrics.hpp"
#include "oracles.hpp"

using namespace gsc::metrics;
using oracle::rel_close;

TEST_CASE("resistance_floor") {
  CHECK(resistance_floor(0.073, 13.01) == doctest::Approx(5.6110e-3).epsilon(1e-4));
  CHECK(resistance_floor(0.069, 13.03) == doctest::Approx(5.2955e-3).epsilon(1e-4));
  CHECK(resistance_floor(1.0, 1.0) == 1.0);
  CHECK_THROWS_AS(resistance_floor(0.0, 1.0), gsc::DomainError);
}

TEST_CASE("epsilon_fraction") {
  CHECK(epsilon_fraction(5.61e-3, 7.95) == doctest::Approx(7.06e-4).epsilon(1e-3));
  CHECK(epsilon_fraction(5.30e-3, 12.80) == doctest::Approx(4.14e-4).epsilon(1e-3));
  CHECK(epsilon_fraction(2.0, 4.0) == 0.5);
  CHECK_THROWS_AS(epsilon_fraction(5.0, 4.0), gsc::DomainError);
}

TEST_CASE("current_ceiling") {
  CHECK(current_ceiling(1.67, 7.95, 7.06e-4) == doctest::Approx(297.1).epsilon(5e-3));
  CHECK(current_ceiling(2.56, 12.80, 4.14e-4) == doctest::Approx(483.1).epsilon(5e-3));
  CHECK(current_ceiling(3.0, 6.0, 1.0) == 0.5);
}

TEST_CASE("powers and sfe") {
  CHECK(css_power(0.073, 13.01) == doctest::Approx(0.9497).epsilon(1e-4));
  CHECK(css_power(0.069, 13.03) == doctest::Approx(0.8991).epsilon(1e-4));
  CHECK_THROWS_AS(css_power(0.0, 13.0), gsc::DomainError);
  CHECK(nominal_power(1.67, 7.95) == doctest::Approx(0.3508).epsilon(1e-3));
  CHECK(nominal_power(2.56, 12.80) == doctest::Approx(0.512).epsilon(1e-12));
  CHECK(nominal_power(1.0, 1.0) == 1.0);
  CHECK(sfe(0.950, 0.351) == doctest::Approx(2.707).epsilon(1e-3));
  CHECK(sfe(0.899, 0.512) == doctest::Approx(1.756).epsilon(1e-3));
  CHECK(sfe(0.4, 0.4) == 1.0);
}

TEST_CASE("tci_clamp and stabilization_tau") {
  CHECK(tci_clamp(1000.0, 7.06e-4) == doctest::Approx(137.7).epsilon(1e-3));
  CHECK(tci_clamp(1000.0, 4.14e-4) == doctest::Approx(128.4).epsilon(1e-3));
  CHECK(rel_close(tci_clamp(42.0, 1.0 / std::exp(1.0)), 42.0, 1e-15));
  CHECK_THROWS_AS(tci_clamp(1.0, 1.0), gsc::DomainError);
  CHECK_THROWS_AS(tci_clamp(1.0, 1.5), gsc::DomainError);

  CHECK(stabilization_tau(1000.0, 7.06e-4) == doctest::Approx(7.256e-3).epsilon(1e-3));
  CHECK(stabilization_tau(1.0, 0.01) == doctest::Approx(4.60517).epsilon(1e-6));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lk(-4.0, 4.0);
  std::uniform_real_distribution<double> le(1e-6, 1.0 - 1e-6);
  for (int j = 0; j < 1000; ++j) {
    const double k = std::pow(10.0, lk(rng));
    const double eps = le(rng);
    CHECK(rel_close(stabilization_tau(k, eps) * k, std::log(1.0 / eps), 1e-12));
  }
}

TEST_CASE("scer") {
  const auto s = scer(0.950, 180.0, 40e-12, 1.67, 2);
  CHECK(s.e_total == doctest::Approx(171.0).epsilon(1e-12));
  CHECK(s.e_cap == doctest::Approx(1.1156e-10).epsilon(1e-4));
  CHECK(s.scer == doctest::Approx(1.53e12).epsilon(5e-3));
  CHECK(scer(0.5, 2.0, 2.0, 1.0, 1).scer == 1.0);
  CHECK(rel_close(scer(0.950, 360.0, 40e-12, 1.67, 2).scer, 2.0 * s.scer, 1e-14));
  CHECK(rel_close(scer(1.9, 180.0, 40e-12, 1.67, 2).scer, 2.0 * s.scer, 1e-14));
  CHECK(rel_close(scer(0.950, 180.0, 80e-12, 1.67, 2).scer, 0.5 * s.scer, 1e-14));
  CHECK(rel_close(scer(0.950, 180.0, 40e-12, 1.67, 4).scer, 0.5 * s.scer, 1e-14));
  CHECK_THROWS_AS(scer(0.950, 180.0, 40e-12, 1.67, 0), gsc::DomainError);
}

TEST_CASE("overshoot_ratio and energy_growth") {
  CHECK(overshoot_ratio(1000.0, 0.0) == 1.0);
  CHECK(overshoot_ratio(1000.0, 0.001) == doctest::Approx(2.71828).epsilon(1e-6));
  CHECK_THROWS_AS(overshoot_ratio(1000.0, 1.0), gsc::DomainError);

  const gsc::model::ModelParams p(5.0, 10.0, 0.5);
  CHECK(energy_growth(p, 2.0, 2.0) == 1.0);
  CHECK(energy_growth(p, 0.0, 2.0) == 0.0);
  CHECK(energy_growth(p, 1.0, 2.0) ==
        doctest::Approx((std::exp(0.5) - 1.0) / (std::exp(1.0) - 1.0)).epsilon(1e-12));
  CHECK(energy_growth(p, 1.0, 2.0) == doctest::Approx(0.37754).epsilon(1e-5));
}

TEST_CASE("FaultExtrema invariants") {
  CHECK_THROWS_AS(FaultExtrema(2.52, 1.67, 0.21, 0.073, 0.21, 1000, 180), gsc::DomainError);
  CHECK_THROWS_AS(FaultExtrema(2.52, 1.67, 0.21, 1.67, 13.01, 1000, 180), gsc::DomainError);
  CHECK_THROWS_AS(FaultExtrema(2.52, 1.67, 0.21, 0.073, 13.01, 0.0, 180), gsc::DomainError);
  const FaultExtrema e(2.52, 1.67, 0.21, 0.073, 13.01, 1000, 180);
  CHECK(e.r0() == doctest::Approx(7.95).epsilon(1e-3));
}

TEST_CASE("characterize_fault, 2.5 V extreme") {
  const FaultExtrema e(2.52, 1.67, 0.21, 0.073, 13.01, 1000.0, 180.0);
  const auto r = characterize_fault(e, 40e-12, 2);
  CHECK(r.r_c_min == doctest::Approx(5.61e-3).epsilon(5e-3));
  CHECK(r.epsilon == doctest::Approx(7.06e-4).epsilon(5e-3));
  CHECK(r.i_ceiling == doctest::Approx(297.1).epsilon(5e-3));
  CHECK(r.p_css == doctest::Approx(0.950).epsilon(5e-3));
  CHECK(r.p_nom == doctest::Approx(0.351).epsilon(5e-3));
  CHECK(r.sfe == doctest::Approx(2.71).epsilon(5e-3));
  CHECK(r.tci_clamp == doctest::Approx(137.7).epsilon(5e-3));
  CHECK(r.scer == doctest::Approx(1.53e12).epsilon(5e-3));
  CHECK(r.bounded);
  CHECK(r.sfe > 1.0);
  CHECK(rel_close(r.r_c_min, r.epsilon * r.r0, 1e-15));
  CHECK(rel_close(r.tau * 1000.0, std::log(1.0 / r.epsilon), 1e-12));
  CHECK(rel_close(r.scer, r.e_total / r.e_cap, 1e-15));
  CHECK(r.k_provenance == KProvenance::Declared);
  CHECK(r.warnings.empty());

  const auto lit = characterize_fault(e, 40e-12, 2, KProvenance::LiteratureDefault);
  CHECK(lit.warnings.size() == 1);
  CHECK(provenance_name(lit.k_provenance) == "literature_default");
}

TEST_CASE("characterize_fault, 5.0 V extreme") {
  const FaultExtrema e(5.02, 2.56, 0.20, 0.069, 13.03, 1000.0, 180.0);
  const auto r = characterize_fault(e, 40e-12, 2);
  CHECK(r.r_c_min == doctest::Approx(5.30e-3).epsilon(5e-3));
  CHECK(r.epsilon == doctest::Approx(4.14e-4).epsilon(5e-3));
  CHECK(r.i_ceiling == doctest::Approx(483.1).epsilon(5e-3));
  CHECK(r.p_css == doctest::Approx(0.899).epsilon(5e-3));
  CHECK(r.p_nom == doctest::Approx(0.512).epsilon(5e-3));
  CHECK(r.sfe == doctest::Approx(1.76).epsilon(5e-3));
  CHECK(r.tci_clamp == doctest::Approx(128.4).epsilon(5e-3));
  CHECK(r.bounded);
  CHECK(r.sfe > 1.0);
}
