#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "selfnorm/rng.hpp"

namespace selfnorm {

enum class InnovationKind {
  Rademacher,        ///< +1 / -1 with probability 1/2 each
  StandardGaussian,  ///< N(0, 1)
  SymmetricPareto2,  ///< symmetric, density |x|^{-3} on |x| >= 1
};

/// A centered innovation law in the domain of attraction of the normal law.
///
/// Every model exposes an exact sampler together with the analytic truncated
/// moments that drive the normalizer construction:
///   l(x)            = E eps^2 I(|eps| <= x)
///   tail(x)         = P(|eps| > x)
///   tail_abs(x)     = E |eps| I(|eps| > x)
///   trunc_abs3(x)   = E |eps|^3 I(|eps| <= x)
class InnovationModel {
 public:
  explicit InnovationModel(InnovationKind kind) : kind_(kind) {}

  /// Accepts "rademacher", "gaussian" (or "standard-gaussian"), "pareto2"
  /// (or "symmetric-pareto2"). Throws std::invalid_argument otherwise.
  static InnovationModel from_name(std::string_view name);

  InnovationKind kind() const { return kind_; }
  std::string name() const;

  double draw(RandomStream& stream) const;
  void sample_into(RandomStream& stream, std::span<double> out) const;
  std::vector<double> sample(RandomStream& stream, std::size_t count) const;

  double truncated_second_moment(double x) const;
  double tail_probability(double x) const;
  double tail_abs_moment(double x) const;
  double truncated_abs_third_moment(double x) const;

  /// b = inf{x >= 1 : l(x) > 0}.
  double lower_threshold() const;

  /// True when l(x) stays bounded, i.e. E eps^2 < infinity.
  bool finite_variance() const;

  friend bool operator==(const InnovationModel&, const InnovationModel&) = default;

 private:
  InnovationKind kind_;
};


/// Row of the domain-of-attraction diagnostic at one grid point.
struct DaRow {
  double x;
  double tail_ratio;    ///< x^2 P(|eps| > x) / l(x)
  double first_ratio;   ///< x E|eps| I(|eps| > x) / l(x)
  double third_ratio;   ///< E|eps|^3 I(|eps| <= x) / (x l(x))
};

struct DaReport {
  std::vector<DaRow> rows;
  bool infinite_variance = false;
  /// Each ratio column is strictly decreasing along the grid.
  bool decreasing = false;
};

/// Evaluates the three equivalent characterizations of the normal domain of
/// attraction on an increasing positive grid. Rejects grids with fewer than
/// three points or that are not strictly increasing.
DaReport check_da_equivalences(const InnovationModel& model,
                               std::span<const double> grid);

}  // namespace selfnorm
