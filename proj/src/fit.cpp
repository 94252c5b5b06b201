#include <cmath>
#include <limits>

#include "gsc/error.hpp"
#include "gsc/pipeline.hpp"

namespace gsc::pipeline {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kStepTolerance = 1e-10;
constexpr int kMaxHalvings = 40;

// Internally the model is r = amp * e^{-k (t - t_mid)}; centring the time
// axis keeps the 2x2 normal equations well conditioned for any k.
struct Model {
  double amp;
  double k;
};

double sse(std::span<const double> t, std::span<const double> r, double t_mid, Model m) {
  double acc = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double e = r[j] - m.amp * std::exp(-m.k * (t[j] - t_mid));
    acc += e * e;
  }
  return acc;
}

}  // namespace

FitResult fit_exponential_decay(std::span<const double> t, std::span<const double> r) {
  const std::size_t n = t.size();
  if (n != r.size()) throw DomainError("fit_exponential_decay: t and r lengths differ");
  if (n < 3) throw DomainError("fit_exponential_decay: need at least 3 points");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(t[j]) || !std::isfinite(r[j])) {
      throw DomainError("fit_exponential_decay: non-finite sample at index " + std::to_string(j));
    }
    if (!(r[j] > 0.0)) {
      throw DomainError("fit_exponential_decay: nonpositive resistance at index " +
                        std::to_string(j));
    }
    if (j > 0 && !(t[j] > t[j - 1])) {
      throw DomainError("fit_exponential_decay: t must be strictly increasing");
    }
  }

  double t_mid = 0.0;
  for (double x : t) t_mid += x;
  t_mid /= static_cast<double>(n);

  // ln r = ln(amp) - k (t - t_mid), ordinary least squares.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = t[j] - t_mid;
    const double y = std::log(r[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double dn = static_cast<double>(n);
  const double denom = dn * sxx - sx * sx;
  if (!(denom > 0.0)) throw DomainError("fit_exponential_decay: degenerate time axis");
  const double slope = (dn * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / dn;

  Model m{std::exp(intercept), -slope};
  double cost = sse(t, r, t_mid, m);
  double k_scale = 1.0 / (t[n - 1] - t[0]);

  FitResult out;
  bool converged = false;
  bool stuck = false;
  int iter = 0;
  for (; iter < kMaxIterations && !converged && !stuck; ++iter) {
    double jaa = 0.0, jak = 0.0, jkk = 0.0, ga = 0.0, gk = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double x = t[j] - t_mid;
      const double g = std::exp(-m.k * x);
      const double e = r[j] - m.amp * g;
      const double da = g;
      const double dk = -m.amp * x * g;
      jaa += da * da;
      jak += da * dk;
      jkk += dk * dk;
      ga += da * e;
      gk += dk * e;
    }
    const double det = jaa * jkk - jak * jak;
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
      stuck = true;
      break;
    }
    const double step_a = (jkk * ga - jak * gk) / det;
    const double step_k = (jaa * gk - jak * ga) / det;

    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings; ++h, lambda *= 0.5) {
      const Model trial{m.amp + lambda * step_a, m.k + lambda * step_k};
      if (!(trial.amp > 0.0)) continue;
      const double c = sse(t, r, t_mid, trial);
      if (std::isfinite(c) && c <= cost) {
        const double rel = std::max(std::abs(lambda * step_a) / std::abs(m.amp),
                                    std::abs(lambda * step_k) / std::max(std::abs(m.k), k_scale));
        m = trial;
        cost = c;
        accepted = true;
        converged = rel < kStepTolerance;
        break;
      }
    }
    if (!accepted) {
      // No damped step lowers the cost: the iterate is stationary to working
      // precision if the proposed step was already small.
      const double rel = std::max(std::abs(step_a) / std::abs(m.amp),
                                  std::abs(step_k) / std::max(std::abs(m.k), k_scale));
      converged = rel < 1e-6;
      stuck = !converged;
    }
  }

  out.iterations = iter;
  out.k_fit = m.k;
  out.r0_fit = m.amp * std::exp(m.k * t_mid);
  out.rmse = std::sqrt(cost / dn);
  out.converged = converged && m.k > 0.0 && std::isfinite(out.r0_fit) && out.r0_fit > 0.0;
  return out;
}

}  // namespace gsc::pipeline
