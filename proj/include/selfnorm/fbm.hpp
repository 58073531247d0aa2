#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "selfnorm/empirical.hpp"
#include "selfnorm/rng.hpp"

namespace selfnorm {

/// Fractional Brownian motion on t_k = k / m, k = 0..m.
struct FbmSpec {
  double H = 0.75;
  std::size_t m = 1024;

  FbmSpec() = default;
  /// Throws std::invalid_argument unless 0 < H < 1 and m >= 2.
  FbmSpec(double hurst, std::size_t grid);
};

/// Cov(W_H(s), W_H(t)) = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2.
double fbm_kernel(double H, double s, double t);

/// Autocovariance of unit-step fractional Gaussian noise at lag k.
double fgn_autocovariance(double H, std::size_t k);

enum class FbmBackend { Auto, Circulant, Dense };

struct FbmPath {
  std::vector<double> w;  ///< W_H(t_0) .. W_H(t_m), w[0] = 0
  FbmSpec spec;
  bool dense = false;     ///< sampled by the dense fallback
  bool clipped = false;   ///< negative eigenvalues above -1e-9 were set to 0
};

/// Exact sampler. Circulant embedding of the increment process of size 2m;
/// if an embedding eigenvalue is below -1e-9 the sampler switches to a
/// dense eigen-factorization of the m x m covariance (m <= kDenseLimit).
/// Construction does all factorization; sample() is const and thread-safe.
class FbmSampler {
 public:
  static constexpr double kClipThreshold = 1e-9;
  static constexpr std::size_t kDenseLimit = 2048;

  explicit FbmSampler(FbmSpec spec, FbmBackend backend = FbmBackend::Auto);
  ~FbmSampler();
  FbmSampler(const FbmSampler&) = delete;
  FbmSampler& operator=(const FbmSampler&) = delete;

  const FbmSpec& spec() const { return spec_; }
  bool dense() const { return dense_; }
  bool clipped() const { return clipped_; }
  /// Smallest eigenvalue seen during factorization, before clipping.
  double min_eigenvalue() const { return min_eigenvalue_; }

  FbmPath sample(RandomStream& stream) const;

 private:
  struct Impl;
  FbmSpec spec_;
  bool dense_ = false;
  bool clipped_ = false;
  double min_eigenvalue_ = 0.0;
  std::unique_ptr<Impl> impl_;
};

FbmPath sample_fbm(const FbmSpec& spec, RandomStream& stream);

/// w1sq = W(1)^2, integral = trapezoid rule for int_0^1 W^2 dt on the grid,
/// ratio = (w1sq / 2) / integral.
struct FbmFunctionals {
  double w1sq = 0.0;
  double integral = 0.0;
  double ratio = 0.0;
};

/// w holds grid values at k / (w.size() - 1). Throws DegeneratePathError when
/// the integral is zero.
FbmFunctionals functionals_fbm(std::span<const double> w);
FbmFunctionals functionals_fbm(const FbmPath& path);

enum class FbmFunctional { W1Squared, Integral, Ratio };

/// R i.i.d. samples of all three functionals. Path r uses the substream
/// (seed, {Fbm, tag, r}), so the result does not depend on `workers`.
struct FbmReference {
  EmpiricalDistribution w1sq;
  EmpiricalDistribution integral;
  EmpiricalDistribution ratio;

  const EmpiricalDistribution& get(FbmFunctional f) const;
};

/// Throws std::invalid_argument when R < 100.
FbmReference reference_samples(const FbmSpec& spec, std::size_t R, std::uint64_t seed,
                               std::uint64_t tag = 0, std::size_t workers = 1);

EmpiricalDistribution reference_distribution(const FbmSpec& spec, FbmFunctional functional,
                                             std::size_t R, std::uint64_t seed,
                                             std::uint64_t tag = 0, std::size_t workers = 1);

}  // namespace selfnorm
