#pragma once

// Closed-form governed short-circuit model.
//
// Resistance collapses as R(t) = R0 e^{-kt} once the fault starts. Two current
// laws are carried side by side: the standard law I = V0/R(t) = a e^{kt},
// which grows without bound, and the converging law a e^{e^{-kt} - 1}. Every
// function here takes t >= 0 (seconds since fault onset); pre-fault values
// are only reachable through transition_state().

#include <utility>

namespace gsc::model {

class ModelParams {
 public:
  /// Throws DomainError unless v0, r0 and k are all finite and positive.
  ModelParams(double v0, double r0, double k);

  double v0() const noexcept { return v0_; }
  double r0() const noexcept { return r0_; }
  double k() const noexcept { return k_; }
  /// Current scale, always v0 / r0.
  double a() const noexcept { return v0_ / r0_; }

 private:
  double v0_;
  double r0_;
  double k_;
};

enum class Regime { PreFault, Fault };

struct TransitionState {
  double t;
  double v;
  double i;
  double r;
  Regime regime;
};

struct CurrentDerivatives {
  double standard;  // A/s
  double modified;  // A/s
};

double resistance_at(const ModelParams& p, double t);

/// R(t) - R0, in (-R0, 0].
double r_short_deviation(const ModelParams& p, double t);

/// k recovered from a linear resistance deviation: r_short / (r0 * x).
double transition_rate_from_deviation(double r_short, double r0, double x);

double current_standard(const ModelParams& p, double t);
double current_modified(const ModelParams& p, double t);
CurrentDerivatives current_derivatives(const ModelParams& p, double t);

/// |I_modified(t) - I_standard(t)|.
double model_divergence(const ModelParams& p, double t);

double instantaneous_power(const ModelParams& p, double t);

/// Integral of instantaneous_power over [0, t].
double cumulative_energy(const ModelParams& p, double t);

/// Time for R to fall to eps_tol * R0: ln(1/eps_tol) / k.
double stabilization_time(double k, double eps_tol);

/// Total over all real t: constant (V0, V0/R0, R0) before onset.
TransitionState transition_state(const ModelParams& p, double t);

double delta_resistance(const ModelParams& p, double t1);
double delta_current(const ModelParams& p, double t1);

/// -(1/R) dR/dt, which is k everywhere on the fault branch.
double decay_rate(const ModelParams& p, double t);

}  // namespace gsc::model
