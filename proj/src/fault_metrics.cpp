#include "gsc/fault_metrics.hpp"

#include <cmath>

#include "gsc/detail/numeric.hpp"
#include "gsc/error.hpp"

namespace gsc::metrics {

using detail::require;

std::string_view provenance_name(KProvenance p) {
  switch (p) {
    case KProvenance::Fitted: return "fitted";
    case KProvenance::Declared: return "declared";
    case KProvenance::LiteratureDefault: return "literature_default";
  }
  return "declared";
}

namespace {

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

FaultExtrema::FaultExtrema(double v_source, double v_clamp, double i_nom, double v_short_min,
                           double i_max_clap, double k_fit, double t_fault)
    : v_source_(v_source),
      v_clamp_(v_clamp),
      i_nom_(i_nom),
      v_short_min_(v_short_min),
      i_max_clap_(i_max_clap),
      k_fit_(k_fit),
      t_fault_(t_fault) {
  for (double x : {v_source, v_clamp, i_nom, v_short_min, i_max_clap, k_fit, t_fault}) {
    require(positive(x), "FaultExtrema: every field must be finite and > 0");
  }
  require(v_short_min < v_clamp, "FaultExtrema: v_short_min must be below v_clamp");
  require(i_max_clap > i_nom, "FaultExtrema: i_max_clap must exceed i_nom");
}

double resistance_floor(double v_short_min, double i_max) {
  require(positive(v_short_min) && positive(i_max), "resistance_floor: inputs must be > 0");
  return v_short_min / i_max;
}

double epsilon_fraction(double r_c_min, double r0) {
  require(positive(r_c_min) && positive(r0), "epsilon_fraction: inputs must be > 0");
  require(r_c_min < r0, "epsilon_fraction: floor must lie below r0");
  return r_c_min / r0;
}

double current_ceiling(double v_clamp, double r0, double eps) {
  require(positive(v_clamp) && positive(r0) && positive(eps),
          "current_ceiling: inputs must be > 0");
  return v_clamp / (r0 * eps);
}

double css_power(double v_short_min, double i_max) {
  require(positive(v_short_min) && positive(i_max), "css_power: inputs must be > 0");
  return v_short_min * i_max;
}

double nominal_power(double v_clamp, double r0) {
  require(positive(v_clamp) && positive(r0), "nominal_power: inputs must be > 0");
  return v_clamp * v_clamp / r0;
}

double sfe(double p_css, double p_nom) {
  require(positive(p_css) && positive(p_nom), "sfe: inputs must be > 0");
  return p_css / p_nom;
}

double tci_clamp(double k, double eps) {
  require(positive(k), "tci_clamp: k must be > 0");
  require(eps > 0.0 && eps < 1.0, "tci_clamp: eps must lie in (0, 1)");
  return k / std::log(1.0 / eps);
}

ScerResult scer(double p_css, double t_fault, double c_j, double v_clamp, int n_diodes) {
  require(positive(p_css) && positive(t_fault) && positive(c_j) && positive(v_clamp) &&
              n_diodes > 0,
          "scer: inputs must be > 0");
  const double e_total = p_css * t_fault;
  const double e_cap = 0.5 * c_j * v_clamp * v_clamp * static_cast<double>(n_diodes);
  return {e_total / e_cap, e_total, e_cap};
}

double overshoot_ratio(double k, double t) {
  detail::require_nonnegative_time(t, "overshoot_ratio");
  return detail::checked_exp(k * t, "overshoot_ratio");
}

double energy_growth(const model::ModelParams& p, double t, double tau) {
  require(positive(tau), "energy_growth: tau must be > 0");
  const double reference = model::cumulative_energy(p, tau);
  require(reference > 0.0, "energy_growth: reference energy is zero");
  return model::cumulative_energy(p, t) / reference;
}

double stabilization_tau(double k, double eps) {
  require(positive(k), "stabilization_tau: k must be > 0");
  require(eps > 0.0 && eps < 1.0, "stabilization_tau: eps must lie in (0, 1)");
  return model::stabilization_time(k, eps);
}

BoundedFaultReport characterize_fault(const FaultExtrema& e, double c_j, int n_diodes,
                                      KProvenance k_source) {
  BoundedFaultReport r{};
  r.r0 = e.r0();
  r.r_c_min = resistance_floor(e.v_short_min(), e.i_max_clap());
  r.epsilon = epsilon_fraction(r.r_c_min, r.r0);
  r.i_ceiling = current_ceiling(e.v_clamp(), r.r0, r.epsilon);
  r.p_css = css_power(e.v_short_min(), e.i_max_clap());
  r.p_nom = nominal_power(e.v_clamp(), r.r0);
  r.sfe = sfe(r.p_css, r.p_nom);
  r.tci_clamp = tci_clamp(e.k_fit(), r.epsilon);
  r.tau = stabilization_tau(e.k_fit(), r.epsilon);
  const ScerResult energy = scer(r.p_css, e.t_fault(), c_j, e.v_clamp(), n_diodes);
  r.scer = energy.scer;
  r.e_total = energy.e_total;
  r.e_cap = energy.e_cap;
  r.k_provenance = k_source;
  r.bounded = e.i_max_clap() < r.i_ceiling;
  if (!r.bounded) {
    r.warnings.push_back("measured peak current reaches the theoretical ceiling");
  }
  if (k_source == KProvenance::LiteratureDefault) {
    r.warnings.push_back("decay constant not fitted; literature default k = 1000 1/s applied");
  }
  return r;
}

}  // namespace gsc::metrics
