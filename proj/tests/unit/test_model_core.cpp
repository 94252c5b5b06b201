#include <doctest.h>

#include <cmath>
#include <vector>

#include "gsc/error.hpp"
#include "gsc/model_core.hpp"
#include "oracles.hpp"

using namespace gsc::model;
using oracle::rel_close;

namespace {
const ModelParams kP(5.0, 10.0, 0.5);  // a = 0.5
}

TEST_CASE("ModelParams validates and derives a") {
  CHECK(kP.a() == 0.5);
  CHECK_THROWS_AS(ModelParams(0.0, 1.0, 1.0), gsc::DomainError);
  CHECK_THROWS_AS(ModelParams(1.0, -1.0, 1.0), gsc::DomainError);
  CHECK_THROWS_AS(ModelParams(1.0, 1.0, NAN), gsc::DomainError);
  const ModelParams q(2.52, 7.95, 1000.0);
  CHECK(q.a() == 2.52 / 7.95);
}

TEST_CASE("resistance_at") {
  CHECK(resistance_at(kP, 0.0) == 10.0);
  CHECK(rel_close(resistance_at(kP, 2.0), 10.0 * std::exp(-1.0), 1e-15));
  CHECK(resistance_at(kP, 2.0) == doctest::Approx(3.67879).epsilon(1e-6));
  const ModelParams q(1.0, 7.95, 1000.0);
  CHECK(rel_close(resistance_at(q, std::log(100.0) / 1000.0), 0.0795, 1e-12));
  CHECK_THROWS_AS(resistance_at(kP, -1.0), gsc::DomainError);
  for (double t = 0.0; t < 50.0; t += 0.37) {
    CHECK(resistance_at(kP, t + 0.1) < resistance_at(kP, t));
    CHECK(resistance_at(kP, t) > 0.0);
  }
}

TEST_CASE("r_short_deviation") {
  CHECK(r_short_deviation(kP, 0.0) == 0.0);
  CHECK(r_short_deviation(kP, 2.0) == doctest::Approx(-6.32121).epsilon(1e-6));
  CHECK(rel_close(r_short_deviation(kP, 2.0), resistance_at(kP, 2.0) - 10.0, 1e-14));
  CHECK(rel_close(r_short_deviation(kP, 200.0), -10.0, 1e-15));
  CHECK(r_short_deviation(kP, 200.0) > -10.0 - 1e-12);
}

TEST_CASE("transition_rate_from_deviation") {
  CHECK(transition_rate_from_deviation(5.0, 10.0, 1.0) == 0.5);
  CHECK(transition_rate_from_deviation(0.0, 10.0, 3.0) == 0.0);
  CHECK(transition_rate_from_deviation(10.0 * 2.0 * 4.0, 10.0, 4.0) == 2.0);
  CHECK_THROWS_AS(transition_rate_from_deviation(1.0, 10.0, 0.0), gsc::DomainError);
}

TEST_CASE("current_standard and current_modified") {
  CHECK(current_standard(kP, 0.0) == 0.5);
  CHECK(current_standard(kP, 2.0) == doctest::Approx(1.35914).epsilon(1e-6));
  CHECK(current_modified(kP, 0.0) == 0.5);
  CHECK(rel_close(current_modified(kP, 2.0), 0.5 * std::exp(std::exp(-1.0) - 1.0), 1e-15));
  CHECK(current_modified(kP, 2.0) == doctest::Approx(0.26576).epsilon(2e-4));
  CHECK(rel_close(current_modified(kP, 1e3), 0.5 / std::exp(1.0), 1e-15));
  CHECK(current_modified(kP, 1e3) == doctest::Approx(0.18394).epsilon(1e-5));
  const TransitionState pre = transition_state(kP, -3.0);
  CHECK(pre.i == 0.5);
}

TEST_CASE("boundedness holds on a log grid") {
  const double a = kP.a();
  for (double t = 1e-6; t < 1e3; t *= 1.7) {
    CHECK(resistance_at(kP, t) > 0.0);
    CHECK(resistance_at(kP, t) <= 10.0);
    CHECK(current_modified(kP, t) >= a / std::exp(1.0));
    CHECK(current_modified(kP, t) <= a);
    if (kP.k() * t < 700.0) CHECK(current_standard(kP, t) >= a);
  }
}

TEST_CASE("current_derivatives") {
  const auto d0 = current_derivatives(kP, 0.0);
  CHECK(d0.standard == 0.25);
  CHECK(d0.modified == -0.25);

  const ModelParams q(5.0, 10.0, 2.0);
  const auto far = current_derivatives(q, 20.0 / 2.0);
  CHECK(std::abs(far.modified) < 1e-8 * q.a() * q.k());

  for (const ModelParams& p : {kP, ModelParams(2.52, 7.95, 1000.0), ModelParams(1, 3, 1e-4)}) {
    for (double kt : {0.1, 1.0, 3.0, 7.0}) {
      const double t = kt / p.k();
      const double h = 1e-6 / p.k();
      const auto d = current_derivatives(p, t);
      const double fd_std =
          oracle::derivative([&](double x) { return current_standard(p, x); }, t, h);
      const double fd_mod =
          oracle::derivative([&](double x) { return current_modified(p, x); }, t, h);
      CHECK(rel_close(d.standard, fd_std, 1e-6));
      CHECK(rel_close(d.modified, fd_mod, 1e-6));
    }
  }
}

TEST_CASE("model_divergence") {
  CHECK(model_divergence(kP, 0.0) == 0.0);
  CHECK(rel_close(model_divergence(kP, 2.0),
                  0.5 * std::exp(1.0) - 0.5 * std::exp(std::exp(-1.0) - 1.0), 1e-14));
  CHECK(model_divergence(kP, 2.0) == doctest::Approx(1.09338).epsilon(1e-4));
  double prev = model_divergence(kP, 0.01);
  for (double t = 0.02; t < 40.0; t += 0.01) {
    const double d = model_divergence(kP, t);
    CHECK(d > prev);
    prev = d;
  }
}

TEST_CASE("instantaneous_power and cumulative_energy") {
  CHECK(instantaneous_power(kP, 0.0) == 2.5);
  CHECK(instantaneous_power(kP, 2.0) == doctest::Approx(6.79570).epsilon(1e-6));
  for (double t : {0.0, 0.3, 2.0, 9.0}) {
    CHECK(instantaneous_power(kP, t) == 5.0 * current_standard(kP, t));
  }
  CHECK(cumulative_energy(kP, 0.0) == 0.0);
  CHECK(cumulative_energy(kP, 2.0) == doctest::Approx(8.59141).epsilon(1e-6));

  const double trap = oracle::trapezoid([](double x) { return instantaneous_power(kP, x); },
                                        0.0, 2.0, 100000);
  CHECK(rel_close(cumulative_energy(kP, 2.0), trap, 1e-6));

  for (double t = 1e-4; t < 60.0; t *= 2.3) {
    const double h = 1e-6 * t;
    const double dE = oracle::derivative([](double x) { return cumulative_energy(kP, x); }, t, h);
    CHECK(rel_close(dE, instantaneous_power(kP, t), 1e-5));
  }
}

TEST_CASE("stabilization_time") {
  CHECK(stabilization_time(1.0, 0.01) == doctest::Approx(4.60517).epsilon(1e-6));
  CHECK(rel_close(stabilization_time(1000.0, 0.01), 0.00460517, 1e-6));
  CHECK(rel_close(stabilization_time(1.0, 1.0 / std::exp(1.0)), 1.0, 1e-15));
  CHECK_THROWS_AS(stabilization_time(1.0, 0.0), gsc::DomainError);
  CHECK_THROWS_AS(stabilization_time(1.0, 1.0), gsc::DomainError);
  CHECK_THROWS_AS(stabilization_time(0.0, 0.5), gsc::DomainError);
}

TEST_CASE("transition_state") {
  const auto pre = transition_state(kP, -1.0);
  CHECK(pre.v == 5.0);
  CHECK(pre.i == 0.5);
  CHECK(pre.r == 10.0);
  CHECK(pre.regime == Regime::PreFault);
  const auto on = transition_state(kP, 0.0);
  CHECK(on.i == 0.5);
  CHECK(on.r == 10.0);
  CHECK(on.regime == Regime::Fault);
  const auto later = transition_state(kP, 2.0);
  CHECK(later.i == doctest::Approx(1.35914).epsilon(1e-6));
  CHECK(later.r == doctest::Approx(3.67879).epsilon(1e-6));
  // continuity at onset
  const auto just_before = transition_state(kP, -1e-12);
  const auto just_after = transition_state(kP, 1e-12);
  CHECK(rel_close(just_before.i, just_after.i, 1e-11));
  CHECK(rel_close(just_before.r, just_after.r, 1e-11));
}

TEST_CASE("delta_resistance and delta_current") {
  CHECK(std::abs(delta_resistance(kP, 1e-15)) < 1e-13);
  CHECK(std::abs(delta_current(kP, 1e-15)) < 1e-15);
  CHECK(delta_resistance(kP, 2.0) == doctest::Approx(6.32121).epsilon(1e-6));
  CHECK(delta_current(kP, 2.0) == doctest::Approx(0.85914).epsilon(1e-5));
}

TEST_CASE("decay_rate") {
  CHECK(decay_rate(kP, 0.0) == 0.5);
  CHECK(decay_rate(kP, 100.0) == 0.5);
  for (double t : {0.1, 1.0, 10.0}) {
    const double fd = -oracle::derivative(
        [](double x) { return std::log(resistance_at(kP, x)); }, t, 1e-5);
    CHECK(std::abs(fd - decay_rate(kP, t)) < 1e-6);
  }
}

TEST_CASE("overflow is a domain error, not infinity") {
  const ModelParams q(1.0, 1.0, 1000.0);
  CHECK_THROWS_AS(current_standard(q, 1.0), gsc::DomainError);
  CHECK_THROWS_AS(cumulative_energy(q, 1.0), gsc::DomainError);
  CHECK_THROWS_AS(current_derivatives(q, 1.0), gsc::DomainError);
  CHECK_NOTHROW(current_modified(q, 1.0));
}
