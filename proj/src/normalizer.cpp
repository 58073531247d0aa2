#include "selfnorm/normalizer.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "selfnorm/errors.hpp"

namespace selfnorm {
namespace {

constexpr double kEtaScanCap = 1e30;
constexpr int kMaxBisection = 200;

// eta for a real-valued index; j <= 0 makes the condition vacuous.
double eta_real(const InnovationModel& model, double j) {
  const double start = model.lower_threshold() + 1.0;
  if (!(j > 0.0)) return start;
  const double bound = 1.0 / j;
  auto holds = [&](double s) { return model.truncated_second_moment(s) / (s * s) <= bound; };
  if (holds(start)) return start;
  double lo = start;
  double hi = 2.0 * start;
  while (!holds(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > kEtaScanCap)
      throw DivergenceError("eta: l(s)/s^2 <= 1/j never holds below 1e30 (j = " +
                            std::to_string(j) + ")");
  }
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (holds(mid) ? hi : lo) = mid;
  }
  return hi;
}

// eta_j given eta_{j-1} = prev. The sets {s : l(s)/s^2 <= 1/j} shrink as j
// grows, so eta_j >= prev and the bracket can start at prev. For catalog
// models the predicate is monotone beyond b + 1, so this agrees with
// eta_real bit for bit.
double eta_after(const InnovationModel& model, double j, double prev) {
  const double bound = 1.0 / j;
  auto holds = [&](double s) { return model.truncated_second_moment(s) / (s * s) <= bound; };
  if (holds(prev)) return prev;
  double lo = prev;
  double step = prev / j;
  double hi = lo + step;
  while (!holds(hi)) {
    lo = hi;
    step *= 2.0;
    hi = lo + step;
    if (hi > kEtaScanCap)
      throw DivergenceError("eta: l(s)/s^2 <= 1/j never holds below 1e30 (j = " +
                            std::to_string(j) + ")");
  }
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (holds(mid) ? hi : lo) = mid;
  }
  return hi;
}

// Direct part of sum_{i>=1} b_{ni}^2 w(i) runs to this multiple of n.
constexpr std::size_t kDirectMultiple = 64;
// The quadrature tail then covers this many further decades.
constexpr double kTailSpan = 1e11;

WeightedSquareSum weighted_b_square_sum(const CoefficientScheme& scheme, std::size_t n,
                                        const std::function<double(double)>& weight) {
  if (n < 1) throw std::invalid_argument("weighted sum: n must be >= 1");
  WeightedSquareSum out;
  const std::size_t J = kDirectMultiple * n;
  const auto table = build_partial_sums(scheme, n, J);
  long double direct = 0.0L;
  for (std::size_t i = 1; i <= J; ++i) {
    const double b = table.b[i];
    if (b != 0.0) direct += static_cast<long double>(b) * b * weight(static_cast<double>(i));
  }
  out.direct = static_cast<double>(direct);
  out.direct_terms = J;
  if (scheme.cutoff()) {
    // stubs have compact support; nothing beyond n + cutoff
    long double extra = 0.0L;
    for (std::size_t i = J + 1; i < n + *scheme.cutoff() + 1; ++i) {
      const double b = scheme.window_sum(i - n + 1, i);
      extra += static_cast<long double>(b) * b * weight(static_cast<double>(i));
    }
    out.tail = static_cast<double>(extra);
    out.total = out.direct + out.tail;
    return out;
  }
  const double nd = static_cast<double>(n);
  const double lo = static_cast<double>(J) + 0.5;
  const double hi = lo * kTailSpan;
  auto integrand = [&](double y) {
    const double x = std::exp(y);
    const double b = scheme.far_window_sum(x - nd + 1.0, x);
    return b * b * weight(x) * x;
  };
  out.tail = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, std::log(lo), std::log(hi), 20, 1e-10);
  // beyond hi: b_{nx} ~ n a_x, and sum n^2 a_x^2 w(x) ~ n^2 x a_x^2 w(x) / (2 alpha - 1)
  const double a_hi = scheme.far_window_sum(hi - nd + 1.0, hi) / nd;
  out.remainder = nd * nd * hi * a_hi * a_hi * weight(hi) / (2.0 * scheme.alpha() - 1.0);
  out.tail_limit = hi;
  out.total = out.direct + out.tail + out.remainder;
  return out;
}

}  // namespace

double eta(const InnovationModel& model, std::size_t j) {
  return eta_real(model, static_cast<double>(j));
}

double c_alpha(double alpha) {
  if (!(alpha > 0.5 && alpha < 1.0))
    throw std::domain_error("c_alpha: alpha must lie in (1/2, 1)");
  const double beta = 1.0 - alpha;
  auto f = [beta](double x) {
    const double g = std::pow(x, beta) - std::pow(x - 1.0, beta);
    return g * g;
  };
  // [0, 1]: int x^{2 beta} dx
  double total = 1.0 / (3.0 - 2.0 * alpha);
  // [1, 2]: endpoint singularity of (x - 1)^beta
  boost::math::quadrature::tanh_sinh<double> ts;
  total += ts.integrate(f, 1.0, 2.0);
  // [2, T] on dyadic pieces
  constexpr double T = 1024.0;
  for (double a = 2.0; a < T; a *= 2.0)
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, 2.0 * a, 10,
                                                                          1e-15);
  // [T, inf): with y = x - 1/2,
  // f = beta^2 y^{2 beta - 2} (1 + (beta - 1)(beta - 2) / (12 y^2) + O(y^-4))
  const double y = T - 0.5;
  const double lead = beta * beta * std::pow(y, 2.0 * beta - 1.0) / (1.0 - 2.0 * beta);
  const double next = beta * beta * (beta - 1.0) * (beta - 2.0) / 12.0 *
                      std::pow(y, 2.0 * beta - 3.0) / (3.0 - 2.0 * beta);
  total += lead + next;
  return total / (beta * beta);
}

NormalizerTable::NormalizerTable(InnovationModel model, CoefficientScheme scheme,
                                 std::span<const std::size_t> n_list)
    : model_(model),
      scheme_(std::move(scheme)),
      c_alpha_(selfnorm::c_alpha(scheme_.alpha())),
      a_sq_(scheme_.a_squared_total()) {
  for (std::size_t n : n_list) {
    if (n < 1) throw std::invalid_argument("NormalizerTable: every n must be >= 1");
    (void)B_sq(n);
  }
}

double NormalizerTable::eta(std::size_t j) const {
  {
    std::lock_guard lock(mu_);
    if (dense_ && j < dense_->size()) return (*dense_)[j];
    if (auto it = eta_memo_.find(j); it != eta_memo_.end()) return it->second;
  }
  const double v = selfnorm::eta(model_, j);
  std::lock_guard lock(mu_);
  eta_memo_.emplace(j, v);
  return v;
}

double NormalizerTable::l_n(std::size_t n) const {
  return model_.truncated_second_moment(eta(n));
}

double NormalizerTable::B_sq(std::size_t n) const {
  double slow = 0.0;
  {
    std::lock_guard lock(mu_);
    if (auto it = slow_memo_.find(n); it != slow_memo_.end()) slow = it->second;
  }
  if (slow == 0.0) {
    slow = scheme_.slowly_varying(static_cast<double>(n));
    std::lock_guard lock(mu_);
    slow_memo_.emplace(n, slow);
  }
  const double nd = static_cast<double>(n);
  return c_alpha_ * l_n(n) * std::pow(nd, 3.0 - 2.0 * scheme_.alpha()) * slow * slow;
}

double NormalizerTable::D_sq(std::size_t n) const {
  return a_sq_ * static_cast<double>(n) * l_n(n);
}

std::shared_ptr<const std::vector<double>> NormalizerTable::eta_range(std::size_t upto) const {
  std::lock_guard lock(mu_);
  if (dense_ && dense_->size() > upto) return dense_;
  auto next = std::make_shared<std::vector<double>>();
  next->reserve(upto + 1);
  if (dense_) *next = *dense_;
  for (std::size_t j = next->size(); j <= upto; ++j) {
    auto it = eta_memo_.find(j);
    if (it != eta_memo_.end()) next->push_back(it->second);
    else if (j < 2) next->push_back(selfnorm::eta(model_, j));
    else next->push_back(eta_after(model_, static_cast<double>(j), next->back()));
  }
  dense_ = std::move(next);
  return dense_;
}

std::vector<std::size_t> NormalizerTable::stored_indices() const {
  std::lock_guard lock(mu_);
  std::vector<std::size_t> out;
  for (const auto& [j, v] : eta_memo_) out.push_back(j);
  return out;
}

WeightedSquareSum sum_b_squared(const CoefficientScheme& scheme, std::size_t n) {
  return weighted_b_square_sum(scheme, n, [](double) { return 1.0; });
}

VarianceEquivalence variance_equivalence(const NormalizerTable& table, std::size_t n) {
  const auto& model = table.model();
  VarianceEquivalence out;
  // the direct part asks for i = 1, 2, 3, ... in order
  double last_i = 0.0, last_eta = 0.0;
  out.sum = weighted_b_square_sum(table.scheme(), n, [&](double i) {
    const double e = (i == last_i + 1.0 && i >= 2.0) ? eta_after(model, i, last_eta)
                                                      : eta_real(model, i);
    last_i = i;
    last_eta = e;
    return model.truncated_second_moment(e);
  });
  out.B_sq = table.B_sq(n);
  out.ratio = out.sum.total / out.B_sq;
  return out;
}

}  // namespace selfnorm
