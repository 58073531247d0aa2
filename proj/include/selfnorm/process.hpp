#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "selfnorm/coefficients.hpp"
#include "selfnorm/convolution.hpp"
#include "selfnorm/innovations.hpp"
#include "selfnorm/normalizer.hpp"
#include "selfnorm/rng.hpp"

namespace selfnorm {

/// Burn-in policy for the truncated moving average.
struct LagPolicy {
  /// Neglected coefficient mass sum_{i > M} a_i^2 relative to A^2.
  double mass_tolerance = 1e-6;
  /// Upper limit on M as a multiple of n; the window n + M is at most
  /// (multiple + 1) n.
  std::size_t max_multiple = 63;
};

/// M = max(n, min(M*, max_multiple * n)) with M* the coefficient-mass lag.
std::size_t default_lag(const CoefficientScheme& scheme, std::size_t n,
                        const LagPolicy& policy = {});

struct PathMeta {
  InnovationModel model{InnovationKind::StandardGaussian};
  CoefficientScheme scheme = CoefficientScheme::farima(0.25);
  std::size_t lag = 0;  ///< M
  double a_n = 0.0;     ///< exact a_n of the scheme
};

/// One realized path.
///
/// eps holds eps_{1-M} .. eps_n (length n + M), x holds X_1 .. X_n and s
/// holds S_0 .. S_n with X_k = sum_{i=0}^{M} a_i eps_{k-i}.
struct SamplePath {
  std::size_t n = 0;
  std::vector<double> eps;
  std::vector<double> x;
  std::vector<double> s;
  PathMeta meta;

  /// eps_t for 1 - M <= t <= n.
  double eps_at(std::ptrdiff_t t) const {
    return eps[static_cast<std::size_t>(t + static_cast<std::ptrdiff_t>(meta.lag) - 1)];
  }
};

/// Simulates paths of fixed (model, scheme, n, M), reusing one coefficient
/// spectrum across replicates. simulate() is const and thread-safe.
class PathSimulator {
 public:
  PathSimulator(InnovationModel model, CoefficientScheme scheme, std::size_t n,
                std::optional<std::size_t> lag = std::nullopt,
                std::size_t fft_budget = kDefaultFftBudget);

  std::size_t n() const { return n_; }
  std::size_t lag() const { return meta_.lag; }
  std::size_t fft_size() const { return filter_->fft_size(); }
  const PathMeta& meta() const { return meta_; }
  const std::vector<double>& taps() const { return taps_; }

  SamplePath simulate(RandomStream& stream) const;

  /// Path driven by caller-supplied innovations eps_{1-M} .. eps_n.
  SamplePath from_innovations(std::vector<double> eps) const;

 private:
  std::size_t n_;
  PathMeta meta_;
  std::vector<double> taps_;
  std::unique_ptr<CausalFilter> filter_;
};

SamplePath simulate_path(const InnovationModel& model, const CoefficientScheme& scheme,
                         std::size_t n, RandomStream& stream,
                         std::optional<std::size_t> lag = std::nullopt);

/// Test stub: a path whose X values are given directly (eps left empty).
SamplePath path_from_series(std::vector<double> x, const CoefficientScheme& scheme);

/// floor(n t) with t = 1 mapping to n; t must lie in [0, 1].
std::size_t step_index(std::size_t n, double t);

/// W(t) = S_[nt] / B_n, SN(t) = S_[nt] / (n a_n sqrt(sum X_i^2)) and the
/// law-of-large-numbers statistic (1 / (n l_n)) sum X_i^2.
class PathFunctionals {
 public:
  PathFunctionals(std::vector<double> s, double b_n, double self_norm, double lln);

  double W(double t) const;
  double SN(double t) const;
  double lln() const { return lln_; }
  double b_n() const { return b_n_; }
  double self_normalizer() const { return self_norm_; }

 private:
  std::vector<double> s_;
  double b_n_;
  double self_norm_;
  double lln_;
};

/// Throws DegeneratePathError when sum X_i^2 = 0.
PathFunctionals functionals(const SamplePath& path, const NormalizerTable& table);

struct TruncationReport {
  double difference = 0.0;  ///< S_n - S'_n
  double ratio = 0.0;       ///< |S_n - S'_n| / B_n
  std::size_t clipped = 0;  ///< innovations with |eps_t| > eta_{n-t}
};

/// Compares S_n with S'_n, the partial sum of the process whose innovations
/// eps_t are zeroed once |eps_t| exceeds eta_{n-t}.
TruncationReport truncated_path_diagnostic(const SamplePath& path,
                                           const NormalizerTable& table);

/// Y_0 = 0, Y_k = rho Y_{k-1} + X_k with the OLS estimate of rho and the
/// three normalized statistics
///   stat_a = sum Y_{k-1}^2 / (n^3 a_n^2 sum X^2)
///   stat_b = sum Y_{k-1}(Y_k - Y_{k-1}) / (n^2 a_n^2 sum X^2)
///   stat_c = n (rho_hat - 1).
struct UnitRootRun {
  std::vector<double> y;
  double rho = 1.0;
  double rho_hat = 0.0;
  double stat_a = 0.0;
  double stat_b = 0.0;
  double stat_c = 0.0;
  double sum_lag_sq = 0.0;   ///< sum Y_{k-1}^2
  double sum_lag_diff = 0.0; ///< sum Y_{k-1}(Y_k - Y_{k-1})
  double sum_x_sq = 0.0;     ///< sum X_k^2
};

/// Throws DegeneratePathError when sum Y_{k-1}^2 = 0 or sum X^2 = 0.
UnitRootRun unit_root_run(const SamplePath& path, double rho);

}  // namespace selfnorm
