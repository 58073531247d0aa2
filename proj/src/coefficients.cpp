#include "selfnorm/coefficients.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "selfnorm/errors.hpp"

namespace selfnorm {
namespace {

// Below this index, or for windows shorter than this, sums are done term by term.
constexpr std::size_t kDirectLimit = 4096;

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    throw std::invalid_argument("cannot parse " + std::string(what) + " from '" +
                                std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// shortest text that parses back to the same double
std::string fmt_num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

double SlowVary::operator()(double x) const {
  if (kind == Kind::Const) return param;
  return std::pow(1.0 + std::log(x), param);
}

std::string SlowVary::describe() const {
  return (kind == Kind::Const ? "const:" : "logpower:") + fmt_num(param);
}

CoefficientScheme CoefficientScheme::farima(double d) {
  if (!(d > 0.0 && d < 0.5))
    throw std::invalid_argument("farima: d must lie in (0, 1/2), got " + fmt_num(d));
  CoefficientScheme s;
  s.kind_ = Kind::Farima;
  s.d_ = d;
  s.alpha_ = 1.0 - d;
  return s;
}

CoefficientScheme CoefficientScheme::power_law(double alpha, SlowVary slow) {
  if (!(alpha > 0.5 && alpha < 1.0))
    throw std::invalid_argument("powerlaw: alpha must lie in (1/2, 1), got " +
                                fmt_num(alpha));
  if (slow.kind == SlowVary::Kind::Const && !(slow.param > 0.0))
    throw std::invalid_argument("powerlaw: constant L must be positive");
  if (!std::isfinite(slow.param))
    throw std::invalid_argument("powerlaw: slowly varying parameter must be finite");
  CoefficientScheme s;
  s.kind_ = Kind::PowerLaw;
  s.alpha_ = alpha;
  s.d_ = 1.0 - alpha;
  s.slow_ = slow;
  return s;
}

CoefficientScheme CoefficientScheme::parse(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts[0] == "farima" && parts.size() == 2)
    return farima(parse_double(parts[1], "d"));
  if (parts[0] == "powerlaw" && (parts.size() == 2 || parts.size() == 4)) {
    const double alpha = parse_double(parts[1], "alpha");
    if (parts.size() == 2) return power_law(alpha);
    const double p = parse_double(parts[3], "L parameter");
    if (parts[2] == "const") return power_law(alpha, SlowVary::constant(p));
    if (parts[2] == "logpower") return power_law(alpha, SlowVary::log_power(p));
  }
  throw std::invalid_argument("cannot parse coefficient scheme '" + std::string(text) +
                              "' (expected farima:<d> or powerlaw:<alpha>[:const|logpower:<p>])");
}

std::string CoefficientScheme::describe() const {
  std::string s = kind_ == Kind::Farima ? "farima:" + fmt_num(d_)
                                        : "powerlaw:" + fmt_num(alpha_) + ":" + slow_.describe();
  if (cutoff_) s += "@cut" + std::to_string(*cutoff_);
  return s;
}

double CoefficientScheme::raw_coeff(std::size_t i) const {
  if (kind_ == Kind::Farima) {
    double a = 1.0;
    for (std::size_t k = 1; k <= i; ++k)
      a *= (static_cast<double>(k) - 1.0 + d_) / static_cast<double>(k);
    return a;
  }
  if (i == 0) return 1.0;
  const double x = static_cast<double>(i);
  return std::pow(x, -alpha_) * slow_(x);
}

double CoefficientScheme::coeff(std::size_t i) const {
  if (cutoff_ && i > *cutoff_) return 0.0;
  return raw_coeff(i);
}

std::vector<double> CoefficientScheme::coefficients(std::size_t count) const {
  std::vector<double> a(count, 0.0);
  if (count == 0) return a;
  const std::size_t live = cutoff_ ? std::min(count, *cutoff_ + 1) : count;
  if (kind_ == Kind::Farima) {
    a[0] = 1.0;
    for (std::size_t k = 1; k < live; ++k)
      a[k] = a[k - 1] * ((static_cast<double>(k) - 1.0 + d_) / static_cast<double>(k));
  } else {
    for (std::size_t k = 0; k < live; ++k) a[k] = raw_coeff(k);
  }
  return a;
}

double CoefficientScheme::slowly_varying(double n) const {
  if (kind_ == Kind::PowerLaw) return slow_(n);
  const auto i = static_cast<std::size_t>(std::llround(n));
  return raw_coeff(i) * std::pow(static_cast<double>(i), alpha_);
}

namespace {

// int_m^inf x^{-2 alpha} L(x)^2 dx for the power-law family.
double power_law_sq_integral(double alpha, const SlowVary& slow, double m) {
  const double kappa = 2.0 * alpha - 1.0;
  if (slow.kind == SlowVary::Kind::Const)
    return slow.param * slow.param * std::pow(m, -kappa) / kappa;
  // substitute y = ln x: int_{ln m}^inf e^{-kappa y} (1 + y)^{2p} dy
  const double p2 = 2.0 * slow.param;
  const double y0 = std::log(m);
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [&](double t) {
    const double y = y0 + t;
    return std::exp(-kappa * y) * std::pow(1.0 + y, p2);
  };
  return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

}  // namespace

double CoefficientScheme::a_squared_total() const {
  if (cutoff_) {
    double s = 0.0;
    for (double v : coefficients(*cutoff_ + 1)) s += v * v;
    return s;
  }
  if (kind_ == Kind::Farima) {
    const double g = std::tgamma(1.0 - d_);
    return std::tgamma(1.0 - 2.0 * d_) / (g * g);
  }
  if (slow_.kind == SlowVary::Kind::Const)
    return 1.0 + slow_.param * slow_.param * boost::math::zeta(2.0 * alpha_);
  // Direct sum up to M, then Euler-Maclaurin for the tail:
  // sum_{i>M} f(i) = int_M^inf f - f(M)/2 - f'(M)/12 + O(f'''(M)).
  const std::size_t M = std::size_t{1} << 20;
  long double s = 1.0L;
  for (std::size_t i = 1; i <= M; ++i) {
    const double a = raw_coeff(i);
    s += static_cast<long double>(a) * a;
  }
  const double x = static_cast<double>(M);
  const double fx = std::pow(raw_coeff(M), 2);
  const double dfx = fx * (-2.0 * alpha_ / x + 2.0 * slow_.param / (x * (1.0 + std::log(x))));
  s += power_law_sq_integral(alpha_, slow_, x) - fx / 2.0 - dfx / 12.0;
  return static_cast<double>(s);
}

double CoefficientScheme::squared_tail_bound(std::size_t m) const {
  if (m == 0) throw std::invalid_argument("squared_tail_bound: m must be >= 1");
  if (cutoff_) {
    double s = 0.0;
    for (std::size_t i = m + 1; i <= *cutoff_; ++i) s += std::pow(raw_coeff(i), 2);
    return s;
  }
  const double x = static_cast<double>(m);
  if (kind_ == Kind::Farima) {
    // Wendel: Gamma(i + d) / Gamma(i + 1) <= i^{d - 1}, so a_i <= i^{d-1} / Gamma(d).
    const double g = std::tgamma(d_);
    return std::pow(x, 2.0 * d_ - 1.0) / ((1.0 - 2.0 * d_) * g * g);
  }
  // f(x) = x^{-2 alpha} L(x)^2 is decreasing once 1 + ln x > p / alpha.
  double start = x;
  double head = 0.0;
  if (slow_.kind == SlowVary::Kind::LogPower && slow_.param > 0.0) {
    const double knee = std::exp(slow_.param / alpha_ - 1.0);
    if (start < knee) {
      const auto k = static_cast<std::size_t>(std::ceil(knee));
      for (std::size_t i = m + 1; i <= k; ++i) head += std::pow(raw_coeff(i), 2);
      start = static_cast<double>(k);
    }
  }
  return head + power_law_sq_integral(alpha_, slow_, start);
}

std::size_t CoefficientScheme::mass_lag(double rel_tol) const {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("mass_lag: tolerance must be positive");
  if (cutoff_) return std::max<std::size_t>(*cutoff_, 1);
  const double target = rel_tol * a_squared_total();
  constexpr std::size_t kCap = std::size_t{1} << 62;
  std::size_t hi = 1;
  while (squared_tail_bound(hi) > target) {
    if (hi >= kCap / 2) return kCap;
    hi *= 2;
  }
  if (hi == 1) return 1;
  std::size_t lo = hi / 2;  // bound(lo) > target
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (squared_tail_bound(mid) > target ? lo : hi) = mid;
  }
  return hi;
}

double CoefficientScheme::window_sum(std::size_t lo, std::size_t hi) const {
  if (hi < lo) return 0.0;
  if (cutoff_) {
    double s = 0.0;
    for (std::size_t i = lo; i <= std::min(hi, *cutoff_); ++i) s += raw_coeff(i);
    return s;
  }
  if (kind_ == Kind::Farima) {
    if (hi - lo < kDirectLimit) {
      // start from a_lo = Gamma(lo + d) / (Gamma(d) Gamma(lo + 1)), then recur
      double a = lo == 0 ? 1.0
                         : boost::math::tgamma_delta_ratio(static_cast<double>(lo) + d_, 1.0 - d_) /
                               std::tgamma(d_);
      long double s = a;
      for (std::size_t k = lo + 1; k <= hi; ++k) {
        a *= (static_cast<double>(k) - 1.0 + d_) / static_cast<double>(k);
        s += a;
      }
      return static_cast<double>(s);
    }
    return far_window_sum(static_cast<double>(lo), static_cast<double>(hi));
  }
  // power law: direct below kDirectLimit, Euler-Maclaurin above
  long double s = 0.0L;
  std::size_t k = lo;
  const std::size_t direct_end = (hi - lo < kDirectLimit) ? hi : std::min(hi, kDirectLimit);
  for (; k <= direct_end; ++k) s += raw_coeff(k);
  if (k > hi) return static_cast<double>(s);
  s += far_window_sum(static_cast<double>(k), static_cast<double>(hi));
  return static_cast<double>(s);
}

double CoefficientScheme::far_window_sum(double lo, double hi) const {
  if (hi < lo) return 0.0;
  if (kind_ == Kind::Farima) {
    // sum_{i=0}^{j} a_i = Gamma(j + 1 + d) / (Gamma(1 + d) Gamma(j + 1))
    auto prefix = [&](double j) {
      return 1.0 / (std::tgamma(1.0 + d_) * boost::math::tgamma_delta_ratio(j + 1.0, d_));
    };
    if (lo < 0.5 || hi - lo >= 0.5 * lo) {
      const double upper = prefix(hi);
      return lo < 0.5 ? upper : upper - prefix(lo - 1.0);
    }
    // narrow window: the prefix difference cancels, so integrate a(x) directly
    const double g = std::tgamma(d_);
    auto a = [&](double x) { return boost::math::tgamma_delta_ratio(x + d_, 1.0 - d_) / g; };
    const double integral = boost::math::quadrature::gauss<double, 30>::integrate(a, lo, hi);
    // a'(x) = a(x) (d - 1) / x up to a relative O(1 / x) correction
    const double dlo = a(lo) * (d_ - 1.0) / lo;
    const double dhi = a(hi) * (d_ - 1.0) / hi;
    return integral + (a(lo) + a(hi)) / 2.0 + (dhi - dlo) / 12.0;
  }
  auto f = [&](double x) { return std::pow(x, -alpha_) * slow_(x); };
  auto df = [&](double x) {
    double g = -alpha_ / x;
    if (slow_.kind == SlowVary::Kind::LogPower) g += slow_.param / (x * (1.0 + std::log(x)));
    return f(x) * g;
  };
  double integral = 0.0;
  if (slow_.kind == SlowVary::Kind::Const) {
    const double beta = 1.0 - alpha_;
    // hi^beta - lo^beta without cancellation for narrow windows
    integral = slow_.param * std::pow(lo, beta) *
               std::expm1(beta * std::log1p((hi - lo) / lo)) / beta;
  } else {
    // log variable keeps the integrand smooth over many decades
    auto g = [&](double y) {
      const double x = std::exp(y);
      return f(x) * x;
    };
    integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        g, std::log(lo), std::log(hi), 15, 1e-14);
  }
  return integral + (f(lo) + f(hi)) / 2.0 + (df(hi) - df(lo)) / 12.0;
}

CoefficientScheme truncated_scheme(CoefficientScheme scheme, std::size_t lag) {
  scheme.cutoff_ = lag;
  return scheme;
}

PartialSumTable build_partial_sums(const CoefficientScheme& scheme, std::size_t n,
                                   std::size_t jmax, std::size_t budget) {
  if (n < 1) throw std::invalid_argument("build_partial_sums: n must be >= 1");
  if (jmax < n) throw std::invalid_argument("build_partial_sums: jmax must be >= n");
  if (jmax + 1 > budget)
    throw ResourceError("build_partial_sums: jmax = " + std::to_string(jmax) +
                        " exceeds the table budget of " + std::to_string(budget) +
                        " entries");
  const auto a = scheme.coefficients(jmax + 1);
  PartialSumTable t;
  t.n = n;
  t.b.assign(jmax + 1, 0.0);
  t.asq.assign(jmax + 1, 0.0);
  // long double running sums keep the sliding-window values accurate far out
  long double wb = 0.0L, wq = 0.0L;
  for (std::size_t j = 1; j <= jmax; ++j) {
    wb += a[j];
    wq += static_cast<long double>(a[j]) * a[j];
    if (j > n) {
      wb -= a[j - n];
      wq -= static_cast<long double>(a[j - n]) * a[j - n];
    }
    t.b[j] = static_cast<double>(wb);
    t.asq[j] = static_cast<double>(wq);
  }
  t.asq_total = scheme.a_squared_total();
  return t;
}

CoefficientOrderReport coefficient_order_check(const CoefficientScheme& scheme,
                                               std::size_t n) {
  if (n < 100) throw std::invalid_argument("coefficient_order_check: n must be >= 100");
  const auto t = build_partial_sums(scheme, n, 10 * n);
  const double alpha = scheme.alpha();
  const auto a = scheme.coefficients(10 * n + 1);
  auto slow = [&](std::size_t i) {
    const double x = static_cast<double>(i);
    return scheme.kind() == CoefficientScheme::Kind::PowerLaw ? scheme.slow()(x)
                                                              : a[i] * std::pow(x, alpha);
  };
  CoefficientOrderReport r;
  r.n = n;
  for (std::size_t i = 1; i <= 2 * n; ++i) {
    const double x = static_cast<double>(i);
    const double ref = std::pow(x, 1.0 - alpha) * std::abs(slow(i));
    r.near_ratio = std::max(r.near_ratio, std::abs(t.b[i]) / ref);
  }
  const double nd = static_cast<double>(n);
  for (std::size_t i = 2 * n + 1; i <= 10 * n; ++i) {
    const double x = static_cast<double>(i);
    const double ref = nd * std::pow(x - nd, -alpha) * std::abs(slow(i));
    r.far_ratio = std::max(r.far_ratio, std::abs(t.b[i]) / ref);
  }
  return r;
}

}  // namespace selfnorm
