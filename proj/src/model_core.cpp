#include "gsc/model_core.hpp"

#include <cmath>
#include <string>

#include "gsc/detail/numeric.hpp"
#include "gsc/error.hpp"

namespace gsc::model {

using detail::checked_exp;
using detail::require_nonnegative_time;

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

ModelParams::ModelParams(double v0, double r0, double k)
    : v0_(v0), r0_(r0), k_(k) {
  if (!positive_finite(v0) || !positive_finite(r0) || !positive_finite(k)) {
    throw DomainError("ModelParams: v0, r0 and k must be finite and > 0 (v0=" +
                      std::to_string(v0) + ", r0=" + std::to_string(r0) +
                      ", k=" + std::to_string(k) + ")");
  }
}

double resistance_at(const ModelParams& p, double t) {
  require_nonnegative_time(t, "resistance_at");
  return p.r0() * std::exp(-p.k() * t);
}

double r_short_deviation(const ModelParams& p, double t) {
  require_nonnegative_time(t, "r_short_deviation");
  // expm1 keeps precision near onset where e^{-kt} - 1 is tiny.
  return p.r0() * std::expm1(-p.k() * t);
}

double transition_rate_from_deviation(double r_short, double r0, double x) {
  if (!(r0 > 0.0)) throw DomainError("transition_rate_from_deviation: r0 must be > 0");
  if (x == 0.0) throw DomainError("transition_rate_from_deviation: x must be nonzero");
  return r_short / (r0 * x);
}

double current_standard(const ModelParams& p, double t) {
  require_nonnegative_time(t, "current_standard");
  const double value = p.a() * checked_exp(p.k() * t, "current_standard");
  if (!std::isfinite(value)) throw DomainError("current_standard: result overflow");
  return value;
}

double current_modified(const ModelParams& p, double t) {
  require_nonnegative_time(t, "current_modified");
  return p.a() * std::exp(std::expm1(-p.k() * t));
}

CurrentDerivatives current_derivatives(const ModelParams& p, double t) {
  require_nonnegative_time(t, "current_derivatives");
  const double a = p.a();
  const double k = p.k();
  const double growth = checked_exp(k * t, "current_derivatives");
  const double decay = std::exp(-k * t);
  const double standard = a * k * growth;
  if (!std::isfinite(standard)) throw DomainError("current_derivatives: result overflow");
  const double modified = -a * k * decay * std::exp(std::expm1(-k * t));
  return {standard, modified};
}

double model_divergence(const ModelParams& p, double t) {
  return std::abs(current_modified(p, t) - current_standard(p, t));
}

double instantaneous_power(const ModelParams& p, double t) {
  const double value = p.v0() * current_standard(p, t);
  if (!std::isfinite(value)) throw DomainError("instantaneous_power: result overflow");
  return value;
}

double cumulative_energy(const ModelParams& p, double t) {
  require_nonnegative_time(t, "cumulative_energy");
  checked_exp(p.k() * t, "cumulative_energy");
  const double value = p.v0() * p.a() / p.k() * std::expm1(p.k() * t);
  if (!std::isfinite(value)) throw DomainError("cumulative_energy: result overflow");
  return value;
}

double stabilization_time(double k, double eps_tol) {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("stabilization_time: k must be > 0");
  if (!(eps_tol > 0.0 && eps_tol < 1.0)) {
    throw DomainError("stabilization_time: tolerance must lie in (0, 1), got " +
                      std::to_string(eps_tol));
  }
  return -std::log(eps_tol) / k;
}

TransitionState transition_state(const ModelParams& p, double t) {
  if (std::isnan(t)) throw DomainError("transition_state: t is NaN");
  if (t < 0.0) return {t, p.v0(), p.a(), p.r0(), Regime::PreFault};
  return {t, p.v0(), current_standard(p, t), resistance_at(p, t), Regime::Fault};
}

double delta_resistance(const ModelParams& p, double t1) {
  require_nonnegative_time(t1, "delta_resistance");
  return -p.r0() * std::expm1(-p.k() * t1);
}

double delta_current(const ModelParams& p, double t1) {
  require_nonnegative_time(t1, "delta_current");
  checked_exp(p.k() * t1, "delta_current");
  return p.a() * std::expm1(p.k() * t1);
}

double decay_rate(const ModelParams& p, double t) {
  require_nonnegative_time(t, "decay_rate");
  // R'(t) = -k R(t), so the ratio is exact; no need to form R.
  return p.k();
}

}  // namespace gsc::model
