#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace selfnorm {

/// Slowly varying factor L(n) of a power-law coefficient sequence.
struct SlowVary {
  enum class Kind { Const, LogPower };
  Kind kind = Kind::Const;
  double param = 1.0;  ///< c for Const, p for LogPower

  static SlowVary constant(double c) { return {Kind::Const, c}; }
  static SlowVary log_power(double p) { return {Kind::LogPower, p}; }

  /// L(x) = c, or (1 + ln x)^p.
  double operator()(double x) const;
  std::string describe() const;

  friend bool operator==(const SlowVary&, const SlowVary&) = default;
};

/// Coefficients a_0, a_1, ... of the causal linear process.
///
/// Farima(d):        a_i = Gamma(i + d) / (Gamma(d) Gamma(i + 1)), 0 < d < 1/2.
/// PowerLaw(alpha):  a_0 = 1, a_i = i^{-alpha} L(i) for i >= 1, 1/2 < alpha < 1.
///
/// Both satisfy a_n ~ n^{-alpha} L(n) with alpha = 1 - d in the FARIMA case.
class CoefficientScheme {
 public:
  enum class Kind { Farima, PowerLaw };

  static CoefficientScheme farima(double d);
  static CoefficientScheme power_law(double alpha, SlowVary slow = SlowVary::constant(1.0));

  /// Parses "farima:0.3", "powerlaw:0.75", "powerlaw:0.75:const:2",
  /// "powerlaw:0.6:logpower:1".
  static CoefficientScheme parse(std::string_view text);

  Kind kind() const { return kind_; }
  double d() const { return d_; }
  double alpha() const { return alpha_; }
  const SlowVary& slow() const { return slow_; }

  /// Exact a_i. FARIMA uses the recurrence a_i = a_{i-1} (i - 1 + d) / i.
  double coeff(std::size_t i) const;

  /// a_0 .. a_{count-1} in one pass.
  std::vector<double> coefficients(std::size_t count) const;

  /// L(n) such that a_n = n^{-alpha} L(n). For FARIMA this is a_n n^alpha.
  double slowly_varying(double n) const;

  /// A^2 = sum_{i >= 0} a_i^2.
  double a_squared_total() const;

  /// Rigorous upper bound on sum_{i > m} a_i^2 (m >= 1).
  double squared_tail_bound(std::size_t m) const;

  /// Smallest m with squared_tail_bound(m) <= rel_tol * A^2.
  std::size_t mass_lag(double rel_tol) const;

  /// sum_{i=lo}^{hi} a_i, exact for short windows, closed-form or
  /// Euler-Maclaurin for windows far in the tail.
  double window_sum(std::size_t lo, std::size_t hi) const;

  /// sum_{i=lo}^{hi} a_i extended to real endpoints, for lo >= 4096: FARIMA
  /// via the closed-form prefix sum, power laws via Euler-Maclaurin.
  double far_window_sum(double lo, double hi) const;

  std::string describe() const;

  /// Coefficients beyond this lag are zero. Only the test stubs use this.
  std::optional<std::size_t> cutoff() const { return cutoff_; }

  friend bool operator==(const CoefficientScheme&, const CoefficientScheme&) = default;

 private:
  friend CoefficientScheme truncated_scheme(CoefficientScheme, std::size_t);
  CoefficientScheme() = default;

  double raw_coeff(std::size_t i) const;

  Kind kind_ = Kind::Farima;
  double d_ = 0.0;
  double alpha_ = 0.0;
  SlowVary slow_{};
  std::optional<std::size_t> cutoff_;
};

/// Test-only: the same scheme with a_i = 0 for i > lag. With lag = 0 this is
/// the white-noise stub X_k = eps_k.
CoefficientScheme truncated_scheme(CoefficientScheme scheme, std::size_t lag);

/// b_{nj} and A_{nj}^2 for j = 0..jmax.
///
/// b_{nj} = a_1 + ... + a_j for j < n and a_{j-n+1} + ... + a_j for j >= n;
/// A_{nj}^2 is the same window over a_i^2. Entry 0 of both arrays is 0.
struct PartialSumTable {
  std::size_t n = 0;
  std::vector<double> b;
  std::vector<double> asq;
  double asq_total = 0.0;  ///< A^2 including a_0
};

/// Default cap on the number of table entries (two doubles each).
inline constexpr std::size_t kDefaultTableBudget = std::size_t{1} << 28;

/// Builds the table in one forward pass. Throws ResourceError when
/// jmax + 1 exceeds `budget` entries, std::invalid_argument when n < 1 or
/// jmax < n.
PartialSumTable build_partial_sums(const CoefficientScheme& scheme, std::size_t n,
                                   std::size_t jmax,
                                   std::size_t budget = kDefaultTableBudget);

struct CoefficientOrderReport {
  std::size_t n = 0;
  double near_ratio = 0.0;  ///< max_{i<=2n} |b_ni| / (i^{1-alpha} L(i))
  double far_ratio = 0.0;   ///< max_{2n<i<=10n} |b_ni| / (n (i-n)^{-alpha} L(i))
};

/// Order-of-magnitude check of the partial-sum coefficients. Requires n >= 100.
CoefficientOrderReport coefficient_order_check(const CoefficientScheme& scheme,
                                               std::size_t n);

}  // namespace selfnorm
