#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gsc/error.hpp"

namespace gsc::detail {

/// e^x, or DomainError naming `what` when the result leaves double range.
inline double checked_exp(double x, const char* what) {
  const double y = std::exp(x);
  if (!std::isfinite(y)) {
    throw DomainError(std::string(what) + ": exponential overflow at exponent " +
                      std::to_string(x));
  }
  return y;
}

inline void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

inline void require_nonnegative_time(double t, const char* what) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw DomainError(std::string(what) + ": t must be finite and >= 0, got " +
                      std::to_string(t));
  }
}

/// Left-to-right sum divided by count. Block averages and redundancy checks
/// both go through here so their results compare exactly.
inline double mean(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

/// Population standard deviation (no Bessel correction).
inline double population_stddev(std::span<const double> xs) {
  const double mu = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

inline double median(std::span<const double> xs) {
  std::vector<double> v(xs.begin(), xs.end());
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

}  // namespace gsc::detail
