#include "gsc/signal_fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "fft.hpp"
#include "gsc/error.hpp"

namespace gsc::fidelity {

SampledSignal::SampledSignal(std::vector<double> values, double t_s)
    : values_(std::move(values)), t_s_(t_s) {
  if (values_.empty()) throw DomainError("SampledSignal: no samples");
  if (!(t_s_ > 0.0) || !std::isfinite(t_s_)) {
    throw DomainError("SampledSignal: sampling interval must be > 0");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DomainError("SampledSignal: non-finite sample at index " + std::to_string(i));
    }
  }
}

ValidationWeights::ValidationWeights(std::array<double, 5> w) : w_(w) {
  double sum = 0.0;
  for (double x : w_) {
    if (!(x >= 0.0)) throw DomainError("ValidationWeights: weights must be >= 0");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DomainError("ValidationWeights: weights sum to " + std::to_string(sum) +
                      ", expected 1");
  }
}

ValidationWeights ValidationWeights::uniform() {
  return ValidationWeights({0.2, 0.2, 0.2, 0.2, 0.2});
}

double f_max_from_k(double k) {
  if (!(k > 0.0)) throw DomainError("f_max_from_k: k must be > 0");
  return k / (2.0 * std::numbers::pi);
}

double nyquist_nci(double f_s, double f_max) {
  if (!(f_s > 0.0) || !(f_max > 0.0)) {
    throw DomainError("nyquist_nci: frequencies must be > 0");
  }
  return f_s / (2.0 * f_max);
}

std::vector<double> quantized_histogram(const SampledSignal& sig, std::size_t m) {
  if (m < 2) throw DomainError("quantized_histogram: need at least 2 bins");
  const auto xs = sig.values();
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;

  std::vector<double> counts(m, 0.0);
  if (span == 0.0) {
    counts[0] = 1.0;
    return counts;
  }
  for (double x : xs) {
    auto bin = static_cast<std::size_t>((x - lo) / span * static_cast<double>(m));
    counts[std::min(bin, m - 1)] += 1.0;
  }
  const double n = static_cast<double>(xs.size());
  for (double& c : counts) c /= n;
  return counts;
}

double shannon_entropy(std::span<const double> p) {
  if (p.empty()) throw DomainError("shannon_entropy: empty distribution");
  double total = 0.0;
  for (double q : p) {
    if (!(q >= 0.0)) throw DomainError("shannon_entropy: negative probability");
    total += q;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw DomainError("shannon_entropy: probabilities sum to " + std::to_string(total));
  }
  double h = 0.0;
  for (double q : p) {
    if (q > 0.0) h -= q * std::log2(q);
  }
  return h;
}

double transient_complexity(double h, std::size_t m) {
  if (m < 2) throw DomainError("transient_complexity: need at least 2 bins");
  const double h_max = std::log2(static_cast<double>(m));
  // Allow rounding slop from the entropy sum, nothing more.
  if (!(h >= -1e-12 && h <= h_max + 1e-12)) {
    throw DomainError("transient_complexity: entropy " + std::to_string(h) +
                      " outside [0, log2 m]");
  }
  return std::clamp(h / h_max, 0.0, 1.0);
}

Spectrum dft_psd(const SampledSignal& sig) {
  const std::size_t n = sig.size();
  if (n < 2) throw DomainError("dft_psd: need at least 2 samples");
  Spectrum s;
  s.psd = detail::full_power(sig.values());
  s.freqs_hz.resize(n);
  const double df = 1.0 / (static_cast<double>(n) * sig.t_s());
  for (std::size_t k = 0; k < n; ++k) s.freqs_hz[k] = static_cast<double>(k) * df;
  return s;
}

Spectrum one_sided(const Spectrum& two_sided) {
  const std::size_t n = two_sided.psd.size();
  if (n == 0) throw DomainError("one_sided: empty spectrum");
  Spectrum s;
  const std::size_t bins = n / 2 + 1;
  s.freqs_hz.assign(two_sided.freqs_hz.begin(), two_sided.freqs_hz.begin() + bins);
  s.psd.assign(two_sided.psd.begin(), two_sided.psd.begin() + bins);
  for (std::size_t k = 1; k < bins; ++k) {
    if (2 * k != n) s.psd[k] *= 2.0;
  }
  return s;
}

double dominant_frequency(const Spectrum& s, bool include_dc) {
  const std::size_t start = include_dc ? 0 : 1;
  if (s.psd.size() <= start) throw DomainError("dominant_frequency: empty spectrum");
  std::size_t best = start;
  for (std::size_t k = start + 1; k < s.psd.size(); ++k) {
    // Strict comparison: the first (lowest-frequency) maximum wins ties.
    if (s.psd[k] > s.psd[best]) best = k;
  }
  return s.freqs_hz[best];
}

double spectral_centroid(const Spectrum& s) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < s.psd.size(); ++k) {
    num += s.freqs_hz[k] * s.psd[k];
    den += s.psd[k];
  }
  if (!(den > 0.0)) throw DomainError("spectral_centroid: spectrum has no power");
  return num / den;
}

double spectral_entropy(std::span<const double> psd) {
  double total = 0.0;
  for (double x : psd) {
    if (!(x >= 0.0)) throw DomainError("spectral_entropy: negative power");
    total += x;
  }
  if (!(total > 0.0)) throw DomainError("spectral_entropy: spectrum has no power");
  double h = 0.0;
  for (double x : psd) {
    if (x > 0.0) {
      const double p = x / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

double ses(double h_s, std::size_t n_bins) {
  if (n_bins < 2) throw DomainError("ses: need at least 2 bins");
  const double h_max = std::log2(static_cast<double>(n_bins));
  if (!(h_s >= -1e-12 && h_s <= h_max + 1e-12)) {
    throw DomainError("ses: entropy " + std::to_string(h_s) + " outside [0, log2 N]");
  }
  return std::clamp(h_s / h_max, 0.0, 1.0);
}

double scc(double f_c, double f_max) {
  if (!(f_max > 0.0)) throw DomainError("scc: f_max must be > 0");
  return f_c / f_max;
}

namespace {

std::vector<double> make_window(Window kind, std::size_t len) {
  std::vector<double> w(len, 1.0);
  if (kind == Window::Hann) {
    // Periodic form: the window tiles exactly at 50% overlap.
    for (std::size_t i = 0; i < len; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(len));
    }
  }
  return w;
}

double frame_centroid(std::span<const double> power, std::span<const double> freqs) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < power.size(); ++k) {
    num += freqs[k] * power[k];
    den += power[k];
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace

Spectrogram stft_spectrogram(const SampledSignal& sig, const StftOptions& opts) {
  const std::size_t n = sig.size();
  const std::size_t len = opts.window_len;
  if (len < 2) throw DomainError("stft_spectrogram: window must be at least 2 samples");
  if (len > n) {
    throw DomainError("stft_spectrogram: window of " + std::to_string(len) +
                      " samples is longer than the signal (" + std::to_string(n) + ")");
  }
  if (opts.hop < 1 || opts.hop > len) {
    throw DomainError("stft_spectrogram: hop must lie in [1, window]");
  }

  Spectrogram out;
  out.frames = 1 + (n - len) / opts.hop;
  out.bins = len / 2 + 1;
  out.freqs_hz.resize(out.bins);
  const double df = 1.0 / (static_cast<double>(len) * sig.t_s());
  for (std::size_t k = 0; k < out.bins; ++k) out.freqs_hz[k] = static_cast<double>(k) * df;
  out.frame_times_s.resize(out.frames);
  out.power.resize(out.frames * out.bins);

  const std::vector<double> window = make_window(opts.window, len);
  const detail::RealDft dft(len);
  const auto xs = sig.values();
  std::vector<double> buf(len);
  for (std::size_t f = 0; f < out.frames; ++f) {
    const std::size_t start = f * opts.hop;
    for (std::size_t i = 0; i < len; ++i) buf[i] = xs[start + i] * window[i];
    const std::vector<double> p = dft.half_power(buf);
    std::copy(p.begin(), p.end(), out.power.begin() + static_cast<std::ptrdiff_t>(f * out.bins));
    out.frame_times_s[f] =
        (static_cast<double>(start) + 0.5 * static_cast<double>(len)) * sig.t_s();
  }
  return out;
}

double tfsm(const Spectrogram& spec, const StabilityRule& rule) {
  if (spec.frames == 0) throw DomainError("tfsm: spectrogram has no frames");
  if (!(rule.relative_tolerance >= 0.0)) throw DomainError("tfsm: tolerance must be >= 0");
  std::vector<double> centroids(spec.frames);
  for (std::size_t f = 0; f < spec.frames; ++f) {
    centroids[f] = frame_centroid(spec.frame(f), spec.freqs_hz);
  }
  std::vector<double> sorted = centroids;
  std::sort(sorted.begin(), sorted.end());
  const double reference = sorted[(sorted.size() - 1) / 2];
  const double band = rule.relative_tolerance * std::abs(reference);
  const auto stable = std::count_if(centroids.begin(), centroids.end(), [&](double c) {
    return std::abs(c - reference) <= band;
  });
  return static_cast<double>(stable) / static_cast<double>(spec.frames);
}

double cvi(double nci, double tci, double scc_value, double ses_value, double tfsm_value,
           const ValidationWeights& w) {
  for (double x : {nci, tci, scc_value, ses_value, tfsm_value}) {
    if (!std::isfinite(x)) throw DomainError("cvi: metric inputs must be finite");
  }
  if (!(nci > 0.0)) throw DomainError("cvi: nci must be > 0");
  auto unit = [](double x, const char* name) {
    if (x < 0.0 || x > 1.0) {
      throw DomainError(std::string("cvi: ") + name + " must lie in [0, 1]");
    }
    return x;
  };
  const double nci_capped = std::min(1.0, nci);
  const double scc_clamped = std::clamp(scc_value, 0.0, 1.0);
  const double value = w[0] * nci_capped + w[1] * unit(tci, "tci") +
                       w[2] * (1.0 - scc_clamped) + w[3] * (1.0 - unit(ses_value, "ses")) +
                       w[4] * unit(tfsm_value, "tfsm");
  // Weights may sum to 1 +- 1e-9.
  return std::clamp(value, 0.0, 1.0);
}

StftOptions resolve_stft(std::size_t n, const FidelityOptions& opts) {
  StftOptions s;
  s.window_len = opts.window_len.value_or(std::max<std::size_t>(2, n / 10));
  s.window_len = std::min(s.window_len, n);
  s.hop = opts.hop.value_or(std::max<std::size_t>(1, s.window_len / 2));
  s.window = opts.window;
  return s;
}

SpectralSummary summarize(const SampledSignal& sig, double f_max, const FidelityOptions& opts) {
  if (sig.size() < 2) throw DomainError("summarize: need at least 2 samples");
  SpectralSummary out;
  out.nci = nyquist_nci(sig.sample_rate(), f_max);

  const auto hist = quantized_histogram(sig, opts.histogram_bins);
  out.tci_complexity = transient_complexity(shannon_entropy(hist), opts.histogram_bins);

  out.psd = one_sided(dft_psd(sig));
  out.f_d = dominant_frequency(out.psd);
  out.f_c = spectral_centroid(out.psd);
  out.h_s = spectral_entropy(out.psd.psd);
  out.ses = ses(out.h_s, out.psd.psd.size());
  out.scc = scc(out.f_c, f_max);

  out.tfsm = tfsm(stft_spectrogram(sig, resolve_stft(sig.size(), opts)), opts.stability);
  out.cvi = cvi(out.nci, out.tci_complexity, out.scc, out.ses, out.tfsm, opts.weights);
  return out;
}

}  // namespace gsc::fidelity
