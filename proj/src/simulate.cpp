#include <algorithm>
#include <cmath>
#include <random>

#include "gsc/detail/numeric.hpp"
#include "gsc/error.hpp"
#include "gsc/pipeline.hpp"

namespace gsc::pipeline {

using detail::require;

double sensor_transfer(double i, double sensitivity, double midpoint) {
  require(sensitivity > 0.0, "sensor_transfer: sensitivity must be > 0");
  return midpoint + sensitivity * i;
}

double sensor_current(double v, double sensitivity, double midpoint) {
  require(sensitivity > 0.0, "sensor_current: sensitivity must be > 0");
  return (v - midpoint) / sensitivity;
}

double adc_quantize(double v, int bits, double fullscale) {
  require(bits >= 1 && bits <= 52, "adc_quantize: bits must lie in [1, 52]");
  require(fullscale > 0.0, "adc_quantize: fullscale must be > 0");
  const double step = fullscale / std::ldexp(1.0, bits);
  const double q = std::round(v / step) * step;
  return std::clamp(q, 0.0, fullscale);
}

clamp::ClampNetwork bench_clamp() {
  clamp::DiodeSpec d = clamp::diode_1n5408();
  d.vf = 0.835;
  return clamp::ClampNetwork({d, d}, 0.0, 2);
}

namespace {

// Whole number of output intervals in `seconds`, or -1.
long long whole_intervals(double seconds, double interval) {
  const double n = seconds / interval;
  const double r = std::round(n);
  if (r < 1.0 || std::abs(n - r) > 1e-9 * std::max(1.0, r)) return -1;
  return static_cast<long long>(r);
}

// State `tau` seconds into `phase`.
TruePoint phase_point(const SimConfig& cfg, Phase phase, double tau) {
  const double v_pre = cfg.operating_voltage();
  const double r0 = cfg.model.r0();
  const double k = cfg.model.k();
  const double r_floor = cfg.v_short_min / cfg.i_max;

  switch (phase) {
    case Phase::Pre:
      return {v_pre, v_pre / r0, Phase::Pre};
    case Phase::Fault: {
      const model::ModelParams p(v_pre, r0, k);
      // Standard law until the clamp caps the current. Compare exponents so
      // long faults never evaluate an overflowing current.
      if (k * tau < std::log(cfg.i_max / p.a())) {
        return {v_pre, model::current_standard(p, tau), Phase::Fault};
      }
      const double r = std::max(r0 * std::exp(-k * tau), r_floor);
      return {cfg.i_max * r, cfg.i_max, Phase::Fault};
    }
    case Phase::Post: {
      const double r = r0 + (r_floor - r0) * std::exp(-k * tau);
      const double i = std::min(cfg.i_max, v_pre / r);
      return {i * r, i, Phase::Post};
    }
  }
  return {v_pre, v_pre / r0, Phase::Pre};
}

}  // namespace

double SimConfig::operating_voltage() const {
  return clamp::clamp_output(clamp, model.v0(), 0.0);
}

double SimConfig::expected_sfe() const {
  const double v = operating_voltage();
  return (v_short_min * i_max) / (v * v / model.r0());
}

void SimConfig::validate() const {
  require(pre_s > 0.0 && fault_s > 0.0 && post_s > 0.0, "SimConfig: durations must be > 0");
  require(base_interval_s > 0.0 && std::isfinite(base_interval_s),
          "SimConfig: base interval must be > 0");
  require(block_size >= 1, "SimConfig: block_size must be >= 1");
  require(adc_bits >= 1 && adc_bits <= 52, "SimConfig: adc_bits must lie in [1, 52]");
  require(adc_fullscale > 0.0, "SimConfig: adc_fullscale must be > 0");
  require(sensor_sensitivity > 0.0 && sensor_midpoint > 0.0,
          "SimConfig: sensor parameters must be > 0");
  require(noise_v >= 0.0 && noise_i >= 0.0, "SimConfig: noise levels must be >= 0");

  const double out_ms = output_interval_s() * 1000.0;
  const double ms = std::round(out_ms);
  require(std::abs(out_ms - ms) < 1e-9 && (ms == 10.0 || ms == 50.0 || ms == 100.0),
          "SimConfig: base interval x block must give 10, 50 or 100 ms");
  for (double d : {pre_s, fault_s, post_s}) {
    require(whole_intervals(d, output_interval_s()) > 0,
            "SimConfig: phase durations must be whole multiples of the output interval");
  }

  const double v_op = operating_voltage();
  require(v_short_min > 0.0 && v_short_min < v_op,
          "SimConfig: v_short_min must lie in (0, operating voltage)");
  require(i_max > v_op / model.r0(), "SimConfig: i_max must exceed the pre-fault current");
  if (quantize) {
    const double hi = sensor_transfer(i_max, sensor_sensitivity, sensor_midpoint);
    const double lo = sensor_transfer(-i_max, sensor_sensitivity, sensor_midpoint);
    require(hi <= adc_fullscale && lo >= 0.0,
            "SimConfig: current sensor output leaves the ADC range at i_max");
    require(v_op <= adc_fullscale, "SimConfig: operating voltage exceeds the ADC range");
  }
}

TruePoint true_trajectory(const SimConfig& cfg, double t) {
  detail::require_nonnegative_time(t, "true_trajectory");
  if (t < cfg.pre_s) return phase_point(cfg, Phase::Pre, t);
  if (t < cfg.pre_s + cfg.fault_s) return phase_point(cfg, Phase::Fault, t - cfg.pre_s);
  return phase_point(cfg, Phase::Post, t - cfg.pre_s - cfg.fault_s);
}

ExperimentLog simulate_experiment(const SimConfig& cfg) {
  cfg.validate();
  const double out_dt = cfg.output_interval_s();
  const std::size_t block = cfg.block_size;
  // Phase boundaries in base samples, kept integral so block starts never
  // land on the wrong side of a boundary through rounding.
  const auto base_samples = [&](double d) {
    return static_cast<std::size_t>(whole_intervals(d, out_dt)) * block;
  };
  const std::size_t fault_start = base_samples(cfg.pre_s);
  const std::size_t post_start = fault_start + base_samples(cfg.fault_s);
  const std::size_t total = post_start + base_samples(cfg.post_s);
  const std::size_t n_out = total / block;
  const double sign = cfg.polarity == Polarity::Reverse ? -1.0 : 1.0;
  const int sampling_ms = static_cast<int>(std::lround(out_dt * 1000.0));

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> vs(block);
  std::vector<double> is(block);
  std::vector<LogRow> rows;
  rows.reserve(n_out);

  for (std::size_t m = 0; m < n_out; ++m) {
    const double t_out = static_cast<double>(m) * out_dt;
    const std::size_t first = m * block;
    const Phase phase = first < fault_start ? Phase::Pre
                        : first < post_start ? Phase::Fault
                                             : Phase::Post;
    const std::size_t origin = phase == Phase::Pre     ? 0
                               : phase == Phase::Fault ? fault_start
                                                       : post_start;
    for (std::size_t b = 0; b < block; ++b) {
      const double tau = static_cast<double>(first + b - origin) * cfg.base_interval_s;
      const TruePoint p = phase_point(cfg, phase, tau);
      double v = p.v;
      double i = p.i;
      if (cfg.quantize) {
        v = adc_quantize(v, cfg.adc_bits, cfg.adc_fullscale);
        const double sensed = sensor_transfer(i, cfg.sensor_sensitivity, cfg.sensor_midpoint);
        i = sensor_current(adc_quantize(sensed, cfg.adc_bits, cfg.adc_fullscale),
                           cfg.sensor_sensitivity, cfg.sensor_midpoint);
      }
      if (cfg.noise_v > 0.0) v += cfg.noise_v * gauss(rng);
      if (cfg.noise_i > 0.0) i += cfg.noise_i * gauss(rng);
      vs[b] = sign * v;
      is[b] = sign * i;
    }
    LogRow row{};
    row.t_s = t_out;
    row.voltage_v = detail::mean(vs);
    row.current_a = detail::mean(is);
    if (cfg.label_phases) row.phase = phase;
    row.sampling_ms = sampling_ms;
    row.trial = cfg.trial;
    row.polarity = cfg.polarity;
    row.supply_v = cfg.model.v0();
    rows.push_back(row);
  }
  return ExperimentLog(std::move(rows));
}

}  // namespace gsc::pipeline
