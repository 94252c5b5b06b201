#pragma once

// Experiment logs in and out, phase segmentation, block averaging,
// exponential-decay fitting, and a seeded simulator that produces logs with
// the same sensor and ADC chain as the bench rig.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gsc/clamp_network.hpp"
#include "gsc/model_core.hpp"
#include "gsc/signal_fidelity.hpp"

namespace gsc::pipeline {

enum class Phase { Pre, Fault, Post };
enum class Polarity { Forward, Reverse };

std::string_view phase_name(Phase p);
std::string_view polarity_name(Polarity p);

/// Column layout written by write_log. parse_log accepts the same names in any order.
inline constexpr std::string_view kLogHeader =
    "t_s,voltage_v,current_a,phase,sampling_ms,trial,polarity,supply_v";

struct LogRow {
  double t_s;
  double voltage_v;
  double current_a;
  std::optional<Phase> phase;
  int sampling_ms;
  int trial;
  Polarity polarity;
  double supply_v;
};

/// One trial's columns pulled out of a log, in time order.
struct Trial {
  int id = 0;
  double t_s = 0.0;  // sampling interval, seconds
  Polarity polarity = Polarity::Forward;
  double supply_v = 0.0;
  std::vector<double> t;
  std::vector<double> v;
  std::vector<double> i;
  std::vector<std::optional<Phase>> phase;

  std::size_t size() const noexcept { return t.size(); }
  bool fully_labeled() const;
};

class ExperimentLog {
 public:
  /// Throws DomainError when time is not strictly increasing within a trial
  /// or a trial mixes sampling intervals.
  explicit ExperimentLog(std::vector<LogRow> rows);

  const std::vector<LogRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }

  /// Trial ids in order of first appearance.
  std::vector<int> trial_ids() const;
  Trial trial(int id) const;

 private:
  std::vector<LogRow> rows_;
};

/// Reads the CSV log format. Accepts LF or CRLF. Throws ParseError carrying
/// the 1-based line number of the first bad line.
ExperimentLog parse_log(std::istream& in);

/// Writes `log` in the same format parse_log reads. Numbers use the shortest
/// representation that round-trips exactly.
void write_log(std::ostream& out, const ExperimentLog& log);

struct Segment {
  Phase phase;
  std::size_t begin;  // sample index, inclusive
  std::size_t end;    // exclusive
  std::size_t size() const noexcept { return end - begin; }
};

struct Segmentation {
  std::vector<Segment> segments;
  bool from_labels = false;

  const Segment* find(Phase p) const;
};

/// Uses phase labels when every row carries one (and `use_labels` is set);
/// otherwise the fault is the longest contiguous run with |i| above the
/// midpoint of the baseline median |i| (leading 10% of samples) and the
/// global maximum |i|. Throws DomainError("no fault detected") when the
/// current never departs from baseline.
Segmentation segment_phases(const Trial& trial, bool use_labels = true);

/// Mean of each complete run of `block` samples; a trailing partial block is
/// dropped. The output interval is block * t_s.
fidelity::SampledSignal block_average(const fidelity::SampledSignal& sig, std::size_t block);

struct FitResult {
  double r0_fit = 0.0;
  double k_fit = 0.0;
  double rmse = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Least-squares fit of r(t) = r0 e^{-kt}: log-linear start, then damped
/// Gauss-Newton until the relative parameter step is below 1e-10 or 200
/// iterations pass. Needs >= 3 points, strictly increasing t and r > 0.
FitResult fit_exponential_decay(std::span<const double> t, std::span<const double> r);

/// Pointwise V / I with |I| < guard excluded.
struct ResistanceSeries {
  std::vector<double> t;
  std::vector<double> r;
};

ResistanceSeries resistance_series(std::span<const double> t, std::span<const double> v,
                                   std::span<const double> i, double guard = 1e-6);

/// Decay part of a fault segment: samples from onset until R first comes
/// within `settle_tol` of the settled floor (median R of the segment's second
/// half), with t shifted so onset is 0.
struct DecayWindow {
  ResistanceSeries series;
  double floor_ohm = 0.0;
  std::size_t settled_index = 0;  // first settled sample, relative to segment begin
};

DecayWindow decay_window(const Trial& trial, const Segment& fault, double settle_tol = 0.05);

/// Fit on the decay window, or nullopt when it holds fewer than 3 points or
/// the fit does not converge to a positive k.
std::optional<FitResult> fit_fault_decay(const Trial& trial, const Segment& fault);

/// Measured extrema of one trial: clamp level and nominal current from the
/// pre-fault medians, the fault plateau from medians over the settled part
/// of the fault segment. Magnitudes are used for reverse polarity.
struct MeasuredExtrema {
  double v_source;
  double v_clamp;
  double i_nom;
  double v_short_min;
  double i_max_clap;
  double t_fault;
};

MeasuredExtrema measure_extrema(const Trial& trial, const Segmentation& seg);

double sensor_transfer(double i, double sensitivity, double midpoint);
/// Inverse of sensor_transfer.
double sensor_current(double v, double sensitivity, double midpoint);
double adc_quantize(double v, int bits, double fullscale);

/// 1N5408 pair at the forward drop seen on the bench at fault-level
/// currents, 0.835 V per diode, so a 2.5 V source clamps to 1.67 V.
clamp::ClampNetwork bench_clamp();

struct SimConfig {
  /// v0 is the source voltage; the clamp sets the operating level.
  model::ModelParams model{2.5, 7.95, 1000.0};
  clamp::ClampNetwork clamp = bench_clamp();
  double pre_s = 60.0;
  double fault_s = 180.0;
  double post_s = 60.0;
  /// Fault plateau targets.
  double v_short_min = 0.073;
  double i_max = 13.01;
  double base_interval_s = 0.001;
  std::size_t block_size = 10;
  double noise_v = 0.0;
  double noise_i = 0.0;
  double sensor_sensitivity = 0.185;
  double sensor_midpoint = 2.5;
  int adc_bits = 10;
  double adc_fullscale = 5.0;
  bool quantize = true;
  Polarity polarity = Polarity::Forward;
  int trial = 1;
  bool label_phases = true;
  std::uint64_t seed = 1;

  double output_interval_s() const {
    return base_interval_s * static_cast<double>(block_size);
  }
  /// Clamped pre-fault voltage.
  double operating_voltage() const;
  /// SFE the configured extrema imply (plateau power over nominal power).
  double expected_sfe() const;

  /// Throws DomainError on inconsistent settings.
  void validate() const;
};

/// Noise-free, unsensed (V, I) at time t since the start of the run.
struct TruePoint {
  double v;
  double i;
  Phase phase;
};

TruePoint true_trajectory(const SimConfig& cfg, double t);

/// Generates one trial. Deterministic for a given config, seed included.
ExperimentLog simulate_experiment(const SimConfig& cfg);

}  // namespace gsc::pipeline
