#include "selfnorm/convolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <string>

#include "fftw_support.hpp"
#include "selfnorm/errors.hpp"

namespace selfnorm {

std::mutex& detail::fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

namespace {

using detail::ComplexBuf;
using detail::RealBuf;

std::size_t next_pow2(std::size_t v) {
  std::size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

}  // namespace

struct CausalFilter::Impl {
  std::size_t n = 0;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ComplexBuf spectrum;

  ~Impl() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

CausalFilter::CausalFilter(std::span<const double> taps, std::size_t input_len,
                           std::size_t budget)
    : taps_(taps.size()), input_len_(input_len), fft_size_(next_pow2(input_len)) {
  if (taps.empty()) throw std::invalid_argument("CausalFilter: no taps");
  if (input_len < taps.size())
    throw std::invalid_argument("CausalFilter: input shorter than the filter");
  if (fft_size_ > budget)
    throw ResourceError("CausalFilter: transform length " + std::to_string(fft_size_) +
                        " (input " + std::to_string(input_len) + ", taps " +
                        std::to_string(taps.size()) + ") exceeds the budget of " +
                        std::to_string(budget));
  impl_ = std::make_unique<Impl>();
  const std::size_t N = fft_size_;
  const std::size_t nc = N / 2 + 1;
  impl_->n = N;
  RealBuf real(fftw_alloc_real(N));
  impl_->spectrum.reset(fftw_alloc_complex(nc));
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    impl_->forward = fftw_plan_dft_r2c_1d(static_cast<int>(N), real.get(),
                                          impl_->spectrum.get(), FFTW_ESTIMATE);
    impl_->backward = fftw_plan_dft_c2r_1d(static_cast<int>(N), impl_->spectrum.get(),
                                           real.get(), FFTW_ESTIMATE);
  }
  if (!impl_->forward || !impl_->backward)
    throw std::runtime_error("CausalFilter: FFTW planning failed");
  std::fill_n(real.get(), N, 0.0);
  std::copy(taps.begin(), taps.end(), real.get());
  fftw_execute_dft_r2c(impl_->forward, real.get(), impl_->spectrum.get());
  // fold the 1/N of the inverse transform into the stored spectrum
  const double scale = 1.0 / static_cast<double>(N);
  for (std::size_t k = 0; k < nc; ++k) {
    impl_->spectrum.get()[k][0] *= scale;
    impl_->spectrum.get()[k][1] *= scale;
  }
}

CausalFilter::~CausalFilter() = default;

void CausalFilter::apply(std::span<const double> in, std::span<double> out) const {
  if (in.size() != input_len_)
    throw std::invalid_argument("CausalFilter::apply: input length mismatch");
  if (out.size() != output_len())
    throw std::invalid_argument("CausalFilter::apply: output length mismatch");
  const std::size_t N = fft_size_;
  const std::size_t nc = N / 2 + 1;
  RealBuf real(fftw_alloc_real(N));
  ComplexBuf freq(fftw_alloc_complex(nc));
  std::copy(in.begin(), in.end(), real.get());
  std::fill(real.get() + in.size(), real.get() + N, 0.0);
  fftw_execute_dft_r2c(impl_->forward, real.get(), freq.get());
  const fftw_complex* h = impl_->spectrum.get();
  fftw_complex* x = freq.get();
  for (std::size_t k = 0; k < nc; ++k) {
    const double re = x[k][0] * h[k][0] - x[k][1] * h[k][1];
    const double im = x[k][0] * h[k][1] + x[k][1] * h[k][0];
    x[k][0] = re;
    x[k][1] = im;
  }
  fftw_execute_dft_c2r(impl_->backward, freq.get(), real.get());
  const std::size_t offset = taps_ - 1;
  std::copy_n(real.get() + offset, out.size(), out.begin());
}

}  // namespace selfnorm
