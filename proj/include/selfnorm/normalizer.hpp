#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "selfnorm/coefficients.hpp"
#include "selfnorm/innovations.hpp"

namespace selfnorm {

/// eta_j = inf{s >= b + 1 : l(s) / s^2 <= 1 / j}.
///
/// Doubling scan from b + 1 followed by bisection on the membership predicate
/// down to adjacent doubles (at most 200 steps). For j = 0 the condition is
/// vacuous and b + 1 is returned. Throws DivergenceError if no s up to 1e30
/// satisfies the condition.
double eta(const InnovationModel& model, std::size_t j);

/// c_alpha = int_0^inf [x^{1-alpha} - max(x-1, 0)^{1-alpha}]^2 dx / (1-alpha)^2.
/// Throws std::domain_error unless 1/2 < alpha < 1.
double c_alpha(double alpha);

/// eta, l_n = l(eta_n), B_n^2 = c_alpha l_n n^{3-2 alpha} L(n)^2 and
/// D_n^2 = A^2 n l_n for one (innovation model, coefficient scheme) pair.
///
/// Values are memoized on first request. Lookups from several threads are
/// safe; the memo is guarded by an internal mutex.
class NormalizerTable {
 public:
  NormalizerTable(InnovationModel model, CoefficientScheme scheme,
                  std::span<const std::size_t> n_list = {});

  const InnovationModel& model() const { return model_; }
  const CoefficientScheme& scheme() const { return scheme_; }
  double c_alpha() const { return c_alpha_; }
  double a_sq() const { return a_sq_; }

  double eta(std::size_t j) const;
  double l_n(std::size_t n) const;
  double B_sq(std::size_t n) const;
  double D_sq(std::size_t n) const;

  /// eta_0 .. eta_upto as a dense immutable vector, extended on demand.
  std::shared_ptr<const std::vector<double>> eta_range(std::size_t upto) const;

  /// Indices that currently have memoized eta values.
  std::vector<std::size_t> stored_indices() const;

 private:
  InnovationModel model_;
  CoefficientScheme scheme_;
  double c_alpha_;
  double a_sq_;
  mutable std::mutex mu_;
  mutable std::map<std::size_t, double> eta_memo_;
  mutable std::map<std::size_t, double> slow_memo_;
  mutable std::shared_ptr<const std::vector<double>> dense_;
};

/// Result of a weighted sum sum_{i >= 1} b_{ni}^2 w(i).
struct WeightedSquareSum {
  double total = 0.0;
  double direct = 0.0;       ///< terms i <= direct_terms, summed exactly
  double tail = 0.0;         ///< quadrature estimate for direct_terms < i <= tail_limit
  double remainder = 0.0;    ///< leading-order estimate beyond tail_limit
  std::size_t direct_terms = 0;
  double tail_limit = 0.0;
};

/// sum_{i >= 1} b_{ni}^2, the partial-sum variance per unit innovation variance.
WeightedSquareSum sum_b_squared(const CoefficientScheme& scheme, std::size_t n);

/// sum_{i >= 1} b_{ni}^2 l(eta_i) / B_n^2, which tends to 1.
struct VarianceEquivalence {
  WeightedSquareSum sum;
  double B_sq = 0.0;
  double ratio = 0.0;
};
VarianceEquivalence variance_equivalence(const NormalizerTable& table, std::size_t n);

}  // namespace selfnorm
