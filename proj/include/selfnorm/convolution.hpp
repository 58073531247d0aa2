#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace selfnorm {

/// Default cap on the FFT length used for one path.
inline constexpr std::size_t kDefaultFftBudget = std::size_t{1} << 26;

/// Causal FIR filter applied by real-to-complex FFT.
///
/// For taps a_0..a_M and an input window in[0..L-1] the filter produces
///   out[k] = sum_{i=0}^{M} a_i in[k + M - i],   k = 0..L-M-1,
/// i.e. the outputs that see a full-length history. The transform length is
/// the next power of two >= L, so circular wrap-around never reaches the
/// returned outputs. The coefficient spectrum is computed once; apply() is
/// const and safe to call from several threads.
class CausalFilter {
 public:
  CausalFilter(std::span<const double> taps, std::size_t input_len,
               std::size_t budget = kDefaultFftBudget);
  ~CausalFilter();
  CausalFilter(const CausalFilter&) = delete;
  CausalFilter& operator=(const CausalFilter&) = delete;

  std::size_t taps() const { return taps_; }
  std::size_t input_len() const { return input_len_; }
  std::size_t output_len() const { return input_len_ - (taps_ - 1); }
  std::size_t fft_size() const { return fft_size_; }

  void apply(std::span<const double> in, std::span<double> out) const;

 private:
  struct Impl;
  std::size_t taps_;
  std::size_t input_len_;
  std::size_t fft_size_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace selfnorm
