#pragma once

// Sensor-validation stack. Ohm's law with a characterised fault-path
// resistance supplies the expected current; deviation (CDI), drift (RMD) and
// linearity (NLR) are then folded into a single confidence score (CCCS)
// under a named weighting scenario.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsc/signal_fidelity.hpp"

namespace gsc::calibration {

struct SegmentStats {
  double mean;
  double std;  // population
  std::size_t count;
};

SegmentStats segment_stats(std::span<const double> xs);

class CalibrationWeights {
 public:
  /// Throws DomainError on negative weights or a sum away from 1 by > 1e-9.
  CalibrationWeights(double w1, double w2, double w3);

  double w1() const noexcept { return w1_; }
  double w2() const noexcept { return w2_; }
  double w3() const noexcept { return w3_; }

 private:
  double w1_, w2_, w3_;
};

enum class Scenario { TransientDominant, SteadyState, Balanced };

std::optional<Scenario> parse_scenario(std::string_view name);
std::string_view scenario_name(Scenario s);

/// Preset weights: transient_dominant (0.1, 0.8, 0.1), steady_state
/// (0.45, 0.45, 0.1), balanced (1/3, 1/3, 1/3).
CalibrationWeights weighting_scenario(Scenario s);
/// Throws DomainError for an unknown name.
CalibrationWeights weighting_scenario(std::string_view name);

double expected_current(double v_measured, double r_sc);

/// Fault-path resistance as median(V) / median(I) over a steady window.
double characterize_rsc(std::span<const double> v, std::span<const double> i);

inline constexpr double kCdiFloorAmps = 1e-9;

/// Percent deviation of measured from expected current, or nullopt when
/// |expected| is below `floor` and the ratio is meaningless.
std::optional<double> cdi(double i_measured, double i_expected, double floor = kCdiFloorAmps);

struct CdiSeries {
  double mean_pct;  // over defined samples; 0 when none are defined
  std::size_t used;
  std::size_t excluded;
};

CdiSeries cdi_series(std::span<const double> i_measured, std::span<const double> i_expected,
                     double floor = kCdiFloorAmps);

/// Gamma: mean extreme CDI over mean nominal CDI.
double regime_ratio(double cdi_extreme_mean, double cdi_nominal_mean);

/// sigma / mu of a segment, population sigma.
double rmd(std::span<const double> segment);

double nlr(double delta_i_measured, double delta_i_ideal);

/// Signed relative difference (percent) between block means of `high` over
/// each `low` interval and the `low` samples themselves:
///   100 * sum(mean_j - low_j) / sum(|low_j|).
/// `low_offset_s` is the start of `low` relative to the start of `high`; it
/// and the interval ratio must both be whole multiples of high.t_s().
double redundancy_error(const fidelity::SampledSignal& high, const fidelity::SampledSignal& low,
                        double low_offset_s = 0.0);

/// Weighted score with each error saturated to a [0, 1] fraction first
/// (CDI enters as percent / 100).
double cccs(double cdi_avg_pct, double rmd_avg, double nlr_avg, const CalibrationWeights& w);

struct LinearityStep {
  double delta_measured;
  double delta_ideal;
};

struct CalibrationReport {
  double cdi_mean_pct = 0.0;
  std::optional<double> gamma;
  double rmd = 0.0;
  double nlr = 0.0;
  std::optional<double> redundancy_error_pct;
  double cccs = 0.0;
  Scenario scenario = Scenario::Balanced;
  std::size_t excluded_samples = 0;
  std::vector<std::string> notes;
};

struct CalibrationInputs {
  /// Fault-window voltage and current; R_sc and CDI come from these.
  std::span<const double> fault_v;
  std::span<const double> fault_i;
  /// Current per phase segment, for drift.
  std::vector<std::span<const double>> segments;
  std::vector<LinearityStep> linearity_steps;
  /// Mean CDI of a nominal-regime run, for gamma.
  std::optional<double> nominal_cdi_pct;
  /// Separately recorded (high, low) resolution streams and the low stream's
  /// start offset, for redundancy.
  std::optional<fidelity::SampledSignal> redundancy_high;
  std::optional<fidelity::SampledSignal> redundancy_low;
  double redundancy_offset_s = 0.0;
  Scenario scenario = Scenario::Balanced;
  /// Overrides the scenario preset when set.
  std::optional<CalibrationWeights> weights;
  double cdi_floor = kCdiFloorAmps;
};

CalibrationReport assess(const CalibrationInputs& in);

}  // namespace gsc::calibration
