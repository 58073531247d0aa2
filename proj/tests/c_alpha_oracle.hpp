#pragma once

// Independent evaluations of
//   c_alpha = int_0^inf [x^{1-a} - max(x-1, 0)^{1-a}]^2 dx / (1-a)^2
// used as test oracles.

#include <cmath>

namespace oracle {

// Composite trapezoid rule on three pieces after smoothing substitutions:
// x = u^8 on [0, 1], x = 1 + v^8 on [1, 2] and x = e^y on [2, T], plus the
// first three terms of the large-x expansion beyond T = 10^6.
inline double c_alpha_trapezoid(double alpha) {
  const long double b = 1.0L - alpha;
  auto f = [b](long double x) {
    const long double d = std::pow(x, b) - (x > 1.0L ? std::pow(x - 1.0L, b) : 0.0L);
    return d * d;
  };
  auto trap = [](auto g, long double lo, long double hi, long panels) {
    const long double h = (hi - lo) / panels;
    long double acc = 0.5L * (g(lo) + g(hi));
    for (long k = 1; k < panels; ++k) acc += g(lo + h * k);
    return acc * h;
  };
  const long double p = 8.0L;
  const long panels = 2000000;
  const long double unit =
      trap([&](long double u) { return f(std::pow(u, p)) * p * std::pow(u, p - 1.0L); }, 0.0L,
           1.0L, panels);
  const long double near =
      trap([&](long double v) { return f(1.0L + std::pow(v, p)) * p * std::pow(v, p - 1.0L); },
           0.0L, 1.0L, panels);
  const long double T = 1e6L;
  const long double mid = trap([&](long double y) {
    const long double x = std::exp(y);
    return f(x) * x;
  }, std::log(2.0L), std::log(T), 4 * panels);
  // x^{2b} (1 - (1 - 1/x)^b)^2 = b^2 x^{2b-2} (1 + c1 / x + c2 / x^2 + ...)
  const long double c1 = 1.0L - b;
  const long double c2 = (1.0L - b) * (11.0L - 7.0L * b) / 12.0L;
  auto tail_term = [&](long double power, long double coef) {
    return coef * std::pow(T, power + 1.0L) / -(power + 1.0L);
  };
  const long double tail = b * b *
                           (tail_term(2.0L * b - 2.0L, 1.0L) + tail_term(2.0L * b - 3.0L, c1) +
                            tail_term(2.0L * b - 4.0L, c2));
  return static_cast<double>((unit + near + mid + tail) / (b * b));
}

// Closed form via the moving-average constant of fractional Brownian motion with
// H = 3/2 - a: Gamma(H + 1/2)^2 / (Gamma(2H + 1) sin(pi H)), divided by (1 - a)^2.
inline double c_alpha_gamma(double alpha) {
  const double H = 1.5 - alpha;
  const double b = 1.0 - alpha;
  const double pi = 3.14159265358979323846;
  const double v = std::tgamma(H + 0.5) * std::tgamma(H + 0.5) /
                   (std::tgamma(2.0 * H + 1.0) * std::sin(pi * H));
  return v / (b * b);
}

}  // namespace oracle
