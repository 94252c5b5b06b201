#include "gsc/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "gsc/detail/numeric.hpp"
#include "gsc/error.hpp"

namespace gsc::calibration {

SegmentStats segment_stats(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("segment_stats: empty segment");
  return {detail::mean(xs), detail::population_stddev(xs), xs.size()};
}

CalibrationWeights::CalibrationWeights(double w1, double w2, double w3)
    : w1_(w1), w2_(w2), w3_(w3) {
  if (!(w1 >= 0.0 && w2 >= 0.0 && w3 >= 0.0)) {
    throw DomainError("CalibrationWeights: weights must be >= 0");
  }
  if (std::abs(w1 + w2 + w3 - 1.0) > 1e-9) {
    throw DomainError("CalibrationWeights: weights must sum to 1");
  }
}

std::optional<Scenario> parse_scenario(std::string_view name) {
  if (name == "transient_dominant") return Scenario::TransientDominant;
  if (name == "steady_state") return Scenario::SteadyState;
  if (name == "balanced") return Scenario::Balanced;
  return std::nullopt;
}

std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::TransientDominant: return "transient_dominant";
    case Scenario::SteadyState: return "steady_state";
    case Scenario::Balanced: return "balanced";
  }
  return "balanced";
}

CalibrationWeights weighting_scenario(Scenario s) {
  switch (s) {
    case Scenario::TransientDominant: return {0.1, 0.8, 0.1};
    case Scenario::SteadyState: return {0.45, 0.45, 0.1};
    case Scenario::Balanced: break;
  }
  return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
}

CalibrationWeights weighting_scenario(std::string_view name) {
  const auto s = parse_scenario(name);
  if (!s) throw DomainError("unknown weighting scenario '" + std::string(name) + "'");
  return weighting_scenario(*s);
}

double expected_current(double v_measured, double r_sc) {
  if (!(r_sc > 0.0)) throw DomainError("expected_current: r_sc must be > 0");
  return v_measured / r_sc;
}

double characterize_rsc(std::span<const double> v, std::span<const double> i) {
  if (v.empty() || v.size() != i.size()) {
    throw DomainError("characterize_rsc: need equal-length, nonempty V and I");
  }
  const double mi = detail::median(i);
  if (mi == 0.0) throw DomainError("characterize_rsc: median current is zero");
  const double r = detail::median(v) / mi;
  if (!(r > 0.0)) throw DomainError("characterize_rsc: resistance is not positive");
  return r;
}

std::optional<double> cdi(double i_measured, double i_expected, double floor) {
  if (!(std::abs(i_expected) >= floor) || i_expected == 0.0) return std::nullopt;
  return std::abs((i_measured - i_expected) / i_expected) * 100.0;
}

CdiSeries cdi_series(std::span<const double> i_measured, std::span<const double> i_expected,
                     double floor) {
  if (i_measured.size() != i_expected.size()) {
    throw DomainError("cdi_series: measured and expected lengths differ");
  }
  double sum = 0.0;
  CdiSeries out{0.0, 0, 0};
  for (std::size_t k = 0; k < i_measured.size(); ++k) {
    if (const auto value = cdi(i_measured[k], i_expected[k], floor)) {
      sum += *value;
      ++out.used;
    } else {
      ++out.excluded;
    }
  }
  if (out.used > 0) out.mean_pct = sum / static_cast<double>(out.used);
  return out;
}

double regime_ratio(double cdi_extreme_mean, double cdi_nominal_mean) {
  if (!(cdi_nominal_mean > 0.0)) throw DomainError("regime_ratio: nominal CDI must be > 0");
  return cdi_extreme_mean / cdi_nominal_mean;
}

double rmd(std::span<const double> segment) {
  if (segment.empty()) throw DomainError("rmd: empty segment");
  const double mu = detail::mean(segment);
  if (mu == 0.0) throw DomainError("rmd: segment mean is zero");
  return detail::population_stddev(segment) / mu;
}

double nlr(double delta_i_measured, double delta_i_ideal) {
  if (delta_i_ideal == 0.0) throw DomainError("nlr: ideal step is zero");
  return std::abs((delta_i_measured - delta_i_ideal) / delta_i_ideal);
}

namespace {

// Whole-number ratio within 1e-9 relative, or nullopt.
std::optional<std::size_t> whole_ratio(double num, double den) {
  const double r = num / den;
  const double rounded = std::round(r);
  if (rounded < 0.0 || std::abs(r - rounded) > 1e-9 * std::max(1.0, r)) return std::nullopt;
  return static_cast<std::size_t>(rounded);
}

}  // namespace

double redundancy_error(const fidelity::SampledSignal& high, const fidelity::SampledSignal& low,
                        double low_offset_s) {
  const auto factor = whole_ratio(low.t_s(), high.t_s());
  if (!factor || *factor < 1) {
    throw DomainError("redundancy_error: low-resolution interval is not a whole multiple of "
                      "the high-resolution interval");
  }
  const auto shift = whole_ratio(low_offset_s, high.t_s());
  if (!shift) {
    throw DomainError("redundancy_error: streams are misaligned (offset is not a whole number "
                      "of high-resolution samples)");
  }
  const auto hi = high.values();
  const auto lo = low.values();
  if (*shift >= hi.size()) throw DomainError("redundancy_error: streams do not overlap");
  const std::size_t blocks = std::min(lo.size(), (hi.size() - *shift) / *factor);
  if (blocks == 0) throw DomainError("redundancy_error: no complete overlapping interval");

  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t j = 0; j < blocks; ++j) {
    const double integrated = detail::mean(hi.subspan(*shift + j * *factor, *factor));
    diff += integrated - lo[j];
    scale += std::abs(lo[j]);
  }
  if (scale == 0.0) {
    if (diff == 0.0) return 0.0;
    throw DomainError("redundancy_error: low-resolution stream is identically zero");
  }
  return 100.0 * diff / scale;
}

double cccs(double cdi_avg_pct, double rmd_avg, double nlr_avg, const CalibrationWeights& w) {
  for (double e : {cdi_avg_pct, rmd_avg, nlr_avg}) {
    if (!(e >= 0.0)) throw DomainError("cccs: error terms must be >= 0");
  }
  const double cdi_sat = std::min(cdi_avg_pct / 100.0, 1.0);
  const double rmd_sat = std::min(rmd_avg, 1.0);
  const double nlr_sat = std::min(nlr_avg, 1.0);
  const double score =
      w.w1() * (1.0 - cdi_sat) + w.w2() * (1.0 - rmd_sat) + w.w3() * (1.0 - nlr_sat);
  return std::clamp(score, 0.0, 1.0);
}

CalibrationReport assess(const CalibrationInputs& in) {
  CalibrationReport out;
  out.scenario = in.scenario;

  const double r_sc = characterize_rsc(in.fault_v, in.fault_i);
  std::vector<double> expected(in.fault_v.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    expected[k] = expected_current(in.fault_v[k], r_sc);
  }
  const CdiSeries series = cdi_series(in.fault_i, expected, in.cdi_floor);
  out.cdi_mean_pct = series.mean_pct;
  out.excluded_samples = series.excluded;
  if (series.excluded > 0) {
    out.notes.push_back(std::to_string(series.excluded) +
                        " samples excluded from CDI (expected current below floor)");
  }

  if (in.nominal_cdi_pct) {
    out.gamma = regime_ratio(out.cdi_mean_pct, *in.nominal_cdi_pct);
  } else {
    out.notes.push_back("gamma not computed: no nominal-regime CDI reference given");
  }

  double rmd_sum = 0.0;
  std::size_t rmd_count = 0;
  for (const auto& seg : in.segments) {
    if (seg.empty() || detail::mean(seg) == 0.0) continue;
    rmd_sum += std::abs(rmd(seg));
    ++rmd_count;
  }
  if (rmd_count > 0) out.rmd = rmd_sum / static_cast<double>(rmd_count);

  if (!in.linearity_steps.empty()) {
    double nlr_sum = 0.0;
    for (const auto& step : in.linearity_steps) nlr_sum += nlr(step.delta_measured, step.delta_ideal);
    out.nlr = nlr_sum / static_cast<double>(in.linearity_steps.size());
  } else {
    out.notes.push_back("no linearity steps declared; NLR term contributes zero error");
  }

  if (in.redundancy_high && in.redundancy_low) {
    out.redundancy_error_pct =
        redundancy_error(*in.redundancy_high, *in.redundancy_low, in.redundancy_offset_s);
  } else {
    out.notes.push_back("redundancy error not computed: no second-resolution stream given");
  }

  const CalibrationWeights w = in.weights.value_or(weighting_scenario(in.scenario));
  out.cccs = cccs(out.cdi_mean_pct, out.rmd, out.nlr, w);
  out.notes.push_back("CCCS saturates each error term at 1 before weighting");
  return out;
}

}  // namespace gsc::calibration
