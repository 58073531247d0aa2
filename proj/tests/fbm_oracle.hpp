#pragma once

// Monte Carlo check of an fBm sampler against the kernel
// (t^{2H} + s^{2H} - |t - s|^{2H}) / 2 on a set of grid times.

#include <cmath>
#include <cstddef>
#include <vector>

#include "selfnorm/fbm.hpp"
#include "selfnorm/parallel.hpp"

namespace oracle {

struct CovarianceCheck {
  double max_z = 0.0;      ///< max |empirical - kernel| / standard error
  double max_error = 0.0;  ///< max |empirical - kernel|
};

// Zero-mean estimator sum W_s W_t / R; under Gaussianity its standard error
// is sqrt((K_ss K_tt + K_st^2) / R).
inline CovarianceCheck fbm_covariance_check(const selfnorm::FbmSampler& sampler,
                                            const std::vector<double>& times, std::size_t R,
                                            std::uint64_t seed, std::size_t workers = 0) {
  const double H = sampler.spec().H;
  const std::size_t m = sampler.spec().m;
  const std::size_t d = times.size();
  std::vector<std::size_t> idx(d);
  for (std::size_t i = 0; i < d; ++i) idx[i] = static_cast<std::size_t>(std::llround(times[i] * m));
  std::vector<double> draws(R * d);
  selfnorm::parallel_for(R, workers, [&](std::size_t r) {
    selfnorm::RandomStream rs(seed, {77, r});
    const auto p = sampler.sample(rs);
    for (std::size_t i = 0; i < d; ++i) draws[r * d + i] = p.w[idx[i]];
  });
  CovarianceCheck out;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      long double acc = 0.0L;
      for (std::size_t r = 0; r < R; ++r) acc += (long double)draws[r * d + i] * draws[r * d + j];
      const double emp = static_cast<double>(acc / R);
      const double s = times[i], t = times[j];
      auto k = [H](double a, double b) {
        return 0.5 * (std::pow(a, 2 * H) + std::pow(b, 2 * H) - std::pow(std::fabs(a - b), 2 * H));
      };
      const double kst = k(s, t);
      const double se = std::sqrt((k(s, s) * k(t, t) + kst * kst) / static_cast<double>(R));
      out.max_error = std::max(out.max_error, std::fabs(emp - kst));
      out.max_z = std::max(out.max_z, std::fabs(emp - kst) / se);
    }
  }
  return out;
}

// Largest |correlation| between increments of the grid path at lags 1..max_lag,
// measured in units of the null standard error 1 / sqrt(count).
inline double increment_correlation_z(const selfnorm::FbmSampler& sampler, std::size_t R,
                                      std::size_t max_lag, std::uint64_t seed) {
  const std::size_t m = sampler.spec().m;
  std::vector<long double> prod(max_lag + 1, 0.0L);
  std::size_t count = 0;
  for (std::size_t r = 0; r < R; ++r) {
    selfnorm::RandomStream rs(seed, {78, r});
    const auto p = sampler.sample(rs);
    for (std::size_t k = 1; k + max_lag <= m; ++k) {
      const double x0 = p.w[k] - p.w[k - 1];
      for (std::size_t l = 0; l <= max_lag; ++l) prod[l] += (long double)x0 * (p.w[k + l] - p.w[k + l - 1]);
    }
    count += m - max_lag;
  }
  double worst = 0.0;
  for (std::size_t l = 1; l <= max_lag; ++l) {
    const double rho = static_cast<double>(prod[l] / prod[0]);
    worst = std::max(worst, std::fabs(rho) * std::sqrt(static_cast<double>(count)));
  }
  return worst;
}

}  // namespace oracle
