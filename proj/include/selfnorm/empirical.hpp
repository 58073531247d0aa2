#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace selfnorm {

/// Sorted sample of replicate statistics.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  EmpiricalDistribution(std::vector<double> values, std::string label = {});

  const std::vector<double>& values() const { return values_; }
  std::size_t count() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const std::string& label() const { return label_; }

  /// Fraction of values <= x.
  double cdf(double x) const;
  /// Linear interpolation between order statistics; p in [0, 1].
  double quantile(double p) const;
  double median() const { return quantile(0.5); }
  double mean() const;

  /// Copy with every value multiplied by c > 0.
  EmpiricalDistribution scaled(double c) const;

 private:
  std::vector<double> values_;
  std::string label_;
};

/// sup_x |F_n(x) - F(x)|. Throws std::invalid_argument on empty input.
double ks_one_sample(const EmpiricalDistribution& dist,
                     const std::function<double(double)>& cdf);

/// sup_x |F_a(x) - G_b(x)|. Throws std::invalid_argument on empty input.
double ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

/// Asymptotic two-sample critical value c sqrt((na + nb) / (na nb)) with
/// c = sqrt(-ln(level / 2) / 2); c = 1.628 at level 0.01.
double ks_critical_value(std::size_t na, std::size_t nb, double level);

/// 1.22 / sqrt(R), the typical one-sample KS distance under the null.
double ks_noise_floor(std::size_t count);

/// N(0, sigma^2) distribution function.
double normal_cdf(double x, double sigma = 1.0);

}  // namespace selfnorm
