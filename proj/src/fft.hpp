#pragma once

// Thin RAII wrapper over an FFTW real-to-complex plan. Planning goes through a
// process-wide mutex (the FFTW planner is not thread-safe); execution on a
// built plan is safe from any thread.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace gsc::fidelity::detail {

class RealDft {
 public:
  explicit RealDft(std::size_t n);
  ~RealDft();
  RealDft(const RealDft&) = delete;
  RealDft& operator=(const RealDft&) = delete;

  std::size_t size() const noexcept { return n_; }

  /// |X_k|^2 for k = 0..n/2.
  std::vector<double> half_power(std::span<const double> x) const;

 private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

/// |X_k|^2 for k = 0..n-1 of a real sequence.
std::vector<double> full_power(std::span<const double> x);

}  // namespace gsc::fidelity::detail
