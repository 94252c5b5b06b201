#include <algorithm>
#include <cmath>

#include "gsc/detail/numeric.hpp"
#include "gsc/error.hpp"
#include "gsc/pipeline.hpp"

namespace gsc::pipeline {

const Segment* Segmentation::find(Phase p) const {
  for (const auto& s : segments) {
    if (s.phase == p) return &s;
  }
  return nullptr;
}

namespace {

Segmentation from_labels(const Trial& trial) {
  Segmentation out;
  out.from_labels = true;
  const std::size_t n = trial.size();
  std::size_t start = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    if (k == n || *trial.phase[k] != *trial.phase[start]) {
      const Phase p = *trial.phase[start];
      if (out.find(p) != nullptr) {
        throw DomainError("segment_phases: phase " + std::string(phase_name(p)) +
                          " is not contiguous in trial " + std::to_string(trial.id));
      }
      if (!out.segments.empty() && out.segments.back().phase > p) {
        throw DomainError("segment_phases: phases out of order in trial " +
                          std::to_string(trial.id));
      }
      out.segments.push_back({p, start, k});
      start = k;
    }
  }
  if (out.find(Phase::Fault) == nullptr) {
    throw DomainError("segment_phases: labels contain no fault phase");
  }
  return out;
}

Segmentation detect(const Trial& trial) {
  const std::size_t n = trial.size();
  std::vector<double> mag(n);
  std::transform(trial.i.begin(), trial.i.end(), mag.begin(),
                 [](double x) { return std::abs(x); });

  const std::size_t lead = std::max<std::size_t>(1, n / 10);
  const double baseline = detail::median(std::span<const double>(mag).first(lead));
  const double peak = *std::max_element(mag.begin(), mag.end());
  if (!(peak - baseline > 1e-12 * std::max(1.0, peak))) {
    throw DomainError("no fault detected");
  }
  const double threshold = 0.5 * (baseline + peak);

  std::size_t best_begin = 0;
  std::size_t best_len = 0;
  for (std::size_t k = 0; k < n;) {
    if (mag[k] <= threshold) {
      ++k;
      continue;
    }
    const std::size_t begin = k;
    while (k < n && mag[k] > threshold) ++k;
    if (k - begin > best_len) {
      best_begin = begin;
      best_len = k - begin;
    }
  }
  if (best_len == 0) throw DomainError("no fault detected");

  Segmentation out;
  const std::size_t best_end = best_begin + best_len;
  if (best_begin > 0) out.segments.push_back({Phase::Pre, 0, best_begin});
  out.segments.push_back({Phase::Fault, best_begin, best_end});
  if (best_end < n) out.segments.push_back({Phase::Post, best_end, n});
  return out;
}

}  // namespace

Segmentation segment_phases(const Trial& trial, bool use_labels) {
  if (trial.size() == 0) throw DomainError("segment_phases: empty trial");
  if (use_labels && trial.fully_labeled()) return from_labels(trial);
  return detect(trial);
}

fidelity::SampledSignal block_average(const fidelity::SampledSignal& sig, std::size_t block) {
  if (block < 1) throw DomainError("block_average: block must be >= 1");
  if (block > sig.size()) {
    throw DomainError("block_average: block of " + std::to_string(block) +
                      " exceeds signal length " + std::to_string(sig.size()));
  }
  const auto xs = sig.values();
  std::vector<double> out(xs.size() / block);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = detail::mean(xs.subspan(j * block, block));
  return fidelity::SampledSignal(std::move(out), sig.t_s() * static_cast<double>(block));
}

ResistanceSeries resistance_series(std::span<const double> t, std::span<const double> v,
                                   std::span<const double> i, double guard) {
  if (t.size() != v.size() || t.size() != i.size()) {
    throw DomainError("resistance_series: column lengths differ");
  }
  ResistanceSeries out;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (std::abs(i[k]) < guard) continue;
    const double r = v[k] / i[k];
    if (!(r > 0.0)) continue;
    out.t.push_back(t[k]);
    out.r.push_back(r);
  }
  return out;
}

DecayWindow decay_window(const Trial& trial, const Segment& fault, double settle_tol) {
  DecayWindow out;
  const std::size_t n = fault.size();
  if (n == 0) return out;
  const auto t = std::span<const double>(trial.t).subspan(fault.begin, n);
  const auto v = std::span<const double>(trial.v).subspan(fault.begin, n);
  const auto i = std::span<const double>(trial.i).subspan(fault.begin, n);

  const ResistanceSeries tail =
      resistance_series(t.subspan(n / 2), v.subspan(n / 2), i.subspan(n / 2));
  if (tail.r.empty()) return out;
  out.floor_ohm = detail::median(tail.r);

  const double settled = out.floor_ohm * (1.0 + settle_tol);
  out.settled_index = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(i[k]) >= 1e-6 && v[k] / i[k] > 0.0 && v[k] / i[k] <= settled) {
      out.settled_index = k;
      break;
    }
  }
  out.series = resistance_series(t.first(out.settled_index), v.first(out.settled_index),
                                 i.first(out.settled_index));
  const double t0 = t.front();
  for (double& x : out.series.t) x -= t0;
  return out;
}

std::optional<FitResult> fit_fault_decay(const Trial& trial, const Segment& fault) {
  const DecayWindow w = decay_window(trial, fault);
  if (w.series.t.size() < 3) return std::nullopt;
  try {
    const FitResult fit = fit_exponential_decay(w.series.t, w.series.r);
    if (!fit.converged || !(fit.k_fit > 0.0)) return std::nullopt;
    return fit;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

MeasuredExtrema measure_extrema(const Trial& trial, const Segmentation& seg) {
  const Segment* pre = seg.find(Phase::Pre);
  const Segment* fault = seg.find(Phase::Fault);
  if (pre == nullptr || pre->size() == 0) {
    throw DomainError("measure_extrema: no pre-fault segment to take the clamp level from");
  }
  if (fault == nullptr || fault->size() == 0) throw DomainError("measure_extrema: no fault");

  auto slice = [](const std::vector<double>& xs, std::size_t begin, std::size_t end) {
    return std::span<const double>(xs).subspan(begin, end - begin);
  };

  MeasuredExtrema out{};
  out.v_source = trial.supply_v;
  out.v_clamp = std::abs(detail::median(slice(trial.v, pre->begin, pre->end)));
  out.i_nom = std::abs(detail::median(slice(trial.i, pre->begin, pre->end)));

  const DecayWindow w = decay_window(trial, *fault);
  std::size_t plateau_begin = fault->begin + std::min(w.settled_index, fault->size());
  if (plateau_begin >= fault->end) plateau_begin = fault->begin + fault->size() / 2;
  out.v_short_min = std::abs(detail::median(slice(trial.v, plateau_begin, fault->end)));
  out.i_max_clap = std::abs(detail::median(slice(trial.i, plateau_begin, fault->end)));
  out.t_fault = static_cast<double>(fault->size()) * trial.t_s;
  return out;
}

}  // namespace gsc::pipeline
