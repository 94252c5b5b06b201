#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "gsc/error.hpp"

namespace gsc::fidelity::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

struct RealDft::Impl {
  std::unique_ptr<double, FftwFree> in;
  std::unique_ptr<fftw_complex, FftwFree> out;
  fftw_plan plan = nullptr;
};

RealDft::RealDft(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
  if (n == 0) throw DomainError("RealDft: length must be > 0");
  impl_->in.reset(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  impl_->out.reset(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))));
  std::lock_guard lock(planner_mutex());
  impl_->plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), impl_->in.get(),
                                     impl_->out.get(), FFTW_ESTIMATE);
  if (impl_->plan == nullptr) throw Error("RealDft: FFTW planning failed");
}

RealDft::~RealDft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(impl_->plan);
}

std::vector<double> RealDft::half_power(std::span<const double> x) const {
  if (x.size() != n_) throw DomainError("RealDft: input length mismatch");
  // New-array execute keeps the plan's own buffers untouched, so concurrent
  // calls on one plan do not race.
  double* in_aligned = static_cast<double*>(fftw_malloc(sizeof(double) * n_));
  auto* out_aligned =
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n_ / 2 + 1)));
  std::unique_ptr<double, FftwFree> in_guard(in_aligned);
  std::unique_ptr<fftw_complex, FftwFree> out_guard(out_aligned);
  std::copy(x.begin(), x.end(), in_aligned);
  fftw_execute_dft_r2c(impl_->plan, in_aligned, out_aligned);

  std::vector<double> power(n_ / 2 + 1);
  for (std::size_t k = 0; k < power.size(); ++k) {
    const double re = out_aligned[k][0];
    const double im = out_aligned[k][1];
    power[k] = re * re + im * im;
  }
  return power;
}

std::vector<double> full_power(std::span<const double> x) {
  const std::size_t n = x.size();
  RealDft dft(n);
  std::vector<double> half = dft.half_power(x);
  std::vector<double> power(n);
  for (std::size_t k = 0; k < n; ++k) power[k] = k <= n / 2 ? half[k] : half[n - k];
  return power;
}

}  // namespace gsc::fidelity::detail
