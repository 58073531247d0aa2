#include "selfnorm/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace selfnorm {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values, std::string label)
    : values_(std::move(values)), label_(std::move(label)) {
  for (double v : values_)
    if (std::isnan(v)) throw std::invalid_argument("EmpiricalDistribution: NaN value");
  std::sort(values_.begin(), values_.end());
}

double EmpiricalDistribution::cdf(double x) const {
  if (values_.empty()) throw std::invalid_argument("cdf: empty distribution");
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double EmpiricalDistribution::quantile(double p) const {
  if (values_.empty()) throw std::invalid_argument("quantile: empty distribution");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("quantile: p outside [0, 1]");
  const double h = p * static_cast<double>(values_.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values_.size() - 1);
  return values_[lo] + (h - static_cast<double>(lo)) * (values_[hi] - values_[lo]);
}

double EmpiricalDistribution::mean() const {
  if (values_.empty()) throw std::invalid_argument("mean: empty distribution");
  long double acc = 0.0L;
  for (double v : values_) acc += v;
  return static_cast<double>(acc / static_cast<long double>(values_.size()));
}

EmpiricalDistribution EmpiricalDistribution::scaled(double c) const {
  if (!(c > 0.0)) throw std::domain_error("scaled: factor must be positive");
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  return EmpiricalDistribution(std::move(v), label_);
}

double ks_one_sample(const EmpiricalDistribution& dist,
                     const std::function<double(double)>& cdf) {
  if (dist.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  const auto& v = dist.values();
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;  // ties jump together
    const double f = cdf(v[i]);
    d = std::max({d, std::fabs(f - static_cast<double>(i) / n),
                  std::fabs(static_cast<double>(j) / n - f)});
    i = j;
  }
  return std::min(d, 1.0);
}

double ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  const auto& x = a.values();
  const auto& y = b.values();
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() || j < y.size()) {
    double t;
    if (j == y.size() || (i < x.size() && x[i] <= y[j])) t = x[i];
    else t = y[j];
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical_value(std::size_t na, std::size_t nb, double level) {
  if (na == 0 || nb == 0) throw std::invalid_argument("ks_critical_value: empty sample");
  if (!(level > 0.0 && level < 1.0)) throw std::domain_error("ks_critical_value: level");
  const double c = std::sqrt(-0.5 * std::log(level / 2.0));
  const double a = static_cast<double>(na), b = static_cast<double>(nb);
  return c * std::sqrt((a + b) / (a * b));
}

double ks_noise_floor(std::size_t count) {
  if (count == 0) throw std::invalid_argument("ks_noise_floor: empty sample");
  return 1.22 / std::sqrt(static_cast<double>(count));
}

double normal_cdf(double x, double sigma) {
  return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0)));
}

}  // namespace selfnorm
