#pragma once

// Bounded-fault characterisation: from measured clamp extrema to the
// resistance floor, the theoretical current ceiling, sustained and nominal
// power, their ratio (SFE), the transient clamping index and the
// sustained-to-capacitive energy ratio.

#include <string>
#include <string_view>
#include <vector>

#include "gsc/model_core.hpp"

namespace gsc::metrics {

/// Where the decay constant used by a report came from.
enum class KProvenance { Fitted, Declared, LiteratureDefault };

std::string_view provenance_name(KProvenance p);

/// Decay constant assumed when nothing better is available, 1/s.
inline constexpr double kLiteratureDecayConstant = 1000.0;

class FaultExtrema {
 public:
  /// r0 is derived as v_clamp / i_nom. Throws DomainError unless every value
  /// is positive, v_short_min < v_clamp and i_max_clap > i_nom.
  FaultExtrema(double v_source, double v_clamp, double i_nom, double v_short_min,
               double i_max_clap, double k_fit, double t_fault);

  double v_source() const noexcept { return v_source_; }
  double v_clamp() const noexcept { return v_clamp_; }
  double i_nom() const noexcept { return i_nom_; }
  /// Governed reference resistance, v_clamp / i_nom.
  double r0() const noexcept { return v_clamp_ / i_nom_; }
  double v_short_min() const noexcept { return v_short_min_; }
  double i_max_clap() const noexcept { return i_max_clap_; }
  double k_fit() const noexcept { return k_fit_; }
  double t_fault() const noexcept { return t_fault_; }

 private:
  double v_source_, v_clamp_, i_nom_, v_short_min_, i_max_clap_, k_fit_, t_fault_;
};

struct ScerResult {
  double scer;
  double e_total;  // J
  double e_cap;    // J
};

struct BoundedFaultReport {
  double r0;  // governed reference resistance
  double r_c_min;
  double epsilon;
  double i_ceiling;
  double p_css;
  double p_nom;
  double sfe;
  double tci_clamp;
  double tau;
  double scer;
  double e_total;
  double e_cap;
  KProvenance k_provenance;
  bool bounded;  // measured peak current below the theoretical ceiling
  std::vector<std::string> warnings;
};

double resistance_floor(double v_short_min, double i_max);
double epsilon_fraction(double r_c_min, double r0);
double current_ceiling(double v_clamp, double r0, double eps);
double css_power(double v_short_min, double i_max);
double nominal_power(double v_clamp, double r0);
double sfe(double p_css, double p_nom);
double tci_clamp(double k, double eps);
ScerResult scer(double p_css, double t_fault, double c_j, double v_clamp, int n_diodes);

/// Current growth relative to onset, e^{kt}.
double overshoot_ratio(double k, double t);

/// E(t) / E(tau) on the standard-law energy curve.
double energy_growth(const model::ModelParams& p, double t, double tau);

double stabilization_tau(double k, double eps);

BoundedFaultReport characterize_fault(const FaultExtrema& e, double c_j, int n_diodes,
                                      KProvenance k_source = KProvenance::Declared);

}  // namespace gsc::metrics
