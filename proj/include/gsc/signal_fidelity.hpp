#pragma once

// Signal-fidelity metrics for sampled fault waveforms: Nyquist compliance,
// amplitude-histogram entropy, DFT power spectra and their descriptors,
// short-time spectrograms, and the composite validation index that folds
// them into one score.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace gsc::fidelity {

class SampledSignal {
 public:
  /// Throws DomainError on an empty or non-finite series or t_s <= 0.
  SampledSignal(std::vector<double> values, double t_s);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double t_s() const noexcept { return t_s_; }
  double sample_rate() const noexcept { return 1.0 / t_s_; }

 private:
  std::vector<double> values_;
  double t_s_;
};

/// Power per DFT bin with the matching bin frequencies.
struct Spectrum {
  std::vector<double> freqs_hz;
  std::vector<double> psd;
};

enum class Window { Hann, Rectangular };

/// Frames x bins power matrix, row-major. Bins run 0..window_len/2 and hold
/// |X_k|^2 of the windowed frame (no one-sided doubling).
struct Spectrogram {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<double> frame_times_s;  // frame centres
  std::vector<double> freqs_hz;
  std::vector<double> power;

  double at(std::size_t frame, std::size_t bin) const { return power[frame * bins + bin]; }
  std::span<const double> frame(std::size_t f) const {
    return std::span<const double>(power).subspan(f * bins, bins);
  }
};

struct StftOptions {
  std::size_t window_len;
  std::size_t hop;
  Window window = Window::Hann;
};

/// A frame is stable when its spectral centroid lies within
/// relative_tolerance of the median frame centroid. The median is the lower
/// median, so it is always the centroid of an actual frame.
struct StabilityRule {
  double relative_tolerance = 0.2;
};

class ValidationWeights {
 public:
  /// Throws DomainError on negative weights or a sum away from 1 by > 1e-9.
  explicit ValidationWeights(std::array<double, 5> w);
  static ValidationWeights uniform();

  const std::array<double, 5>& values() const noexcept { return w_; }
  double operator[](std::size_t i) const { return w_[i]; }

 private:
  std::array<double, 5> w_;
};

struct SpectralSummary {
  Spectrum psd;  // one-sided
  double f_d;
  double f_c;
  double h_s;
  double scc;
  double ses;
  double nci;
  double tci_complexity;
  double tfsm;
  double cvi;
};

struct FidelityOptions {
  std::size_t histogram_bins = 256;
  /// Defaults to 10% of the signal length.
  std::optional<std::size_t> window_len;
  /// Defaults to half the window.
  std::optional<std::size_t> hop;
  Window window = Window::Hann;
  StabilityRule stability;
  ValidationWeights weights = ValidationWeights::uniform();
};

double f_max_from_k(double k);

/// f_s / (2 f_max); compliant when >= 1.
double nyquist_nci(double f_s, double f_max);

/// Probability mass over m equal-width bins on [min, max]. The upper edge is
/// closed. A constant signal puts all mass in the first bin.
std::vector<double> quantized_histogram(const SampledSignal& sig, std::size_t m);

/// Entropy in bits; 0 log 0 is taken as 0. Input must sum to 1 within 1e-9.
double shannon_entropy(std::span<const double> p);

/// h / log2(m).
double transient_complexity(double h, std::size_t m);

/// Two-sided |DFT|^2 with f_k = k / (N t_s), k = 0..N-1.
Spectrum dft_psd(const SampledSignal& sig);

/// Folds a two-sided spectrum of a real signal onto bins 0..N/2, doubling
/// every bin that has a mirror image so total power is preserved.
Spectrum one_sided(const Spectrum& two_sided);

/// Frequency of the largest bin; ties resolve to the lowest frequency.
double dominant_frequency(const Spectrum& s, bool include_dc = true);

double spectral_centroid(const Spectrum& s);

/// Entropy (bits) of the spectrum normalised to a distribution.
double spectral_entropy(std::span<const double> psd);
double ses(double h_s, std::size_t n_bins);

/// f_c / f_max. Not clamped: measured spectra can sit far above f_max.
double scc(double f_c, double f_max);

Spectrogram stft_spectrogram(const SampledSignal& sig, const StftOptions& opts);

/// Fraction of spectrogram frames judged stable by `rule`.
double tfsm(const Spectrogram& spec, const StabilityRule& rule = {});

/// Composite index. NCI is capped at 1 and SCC clamped to [0, 1] here.
double cvi(double nci, double tci, double scc, double ses, double tfsm,
           const ValidationWeights& w);

/// Window-length defaults resolved against a signal of n samples.
StftOptions resolve_stft(std::size_t n, const FidelityOptions& opts);

/// Runs the whole suite on one signal. f_max normally comes from a fitted
/// decay constant via f_max_from_k.
SpectralSummary summarize(const SampledSignal& sig, double f_max,
                          const FidelityOptions& opts = {});

}  // namespace gsc::fidelity
