#include "selfnorm/process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "selfnorm/errors.hpp"

namespace selfnorm {

std::size_t default_lag(const CoefficientScheme& scheme, std::size_t n,
                        const LagPolicy& policy) {
  if (n == 0) throw std::invalid_argument("default_lag: n must be >= 1");
  const std::size_t mass = scheme.mass_lag(policy.mass_tolerance);
  const std::size_t cap = policy.max_multiple * n;
  return std::max(n, std::min(mass, cap));
}

PathSimulator::PathSimulator(InnovationModel model, CoefficientScheme scheme,
                             std::size_t n, std::optional<std::size_t> lag,
                             std::size_t fft_budget)
    : n_(n) {
  if (n == 0) throw std::invalid_argument("PathSimulator: n must be >= 1");
  meta_.model = model;
  meta_.scheme = scheme;
  meta_.lag = lag ? *lag : default_lag(scheme, n);
  meta_.a_n = scheme.coeff(n);
  taps_ = scheme.coefficients(meta_.lag + 1);
  filter_ = std::make_unique<CausalFilter>(taps_, n + meta_.lag, fft_budget);
}

SamplePath PathSimulator::simulate(RandomStream& stream) const {
  std::vector<double> eps(n_ + meta_.lag);
  meta_.model.sample_into(stream, eps);
  return from_innovations(std::move(eps));
}

SamplePath PathSimulator::from_innovations(std::vector<double> eps) const {
  if (eps.size() != n_ + meta_.lag)
    throw std::invalid_argument("from_innovations: expected " +
                                std::to_string(n_ + meta_.lag) + " innovations, got " +
                                std::to_string(eps.size()));
  SamplePath path;
  path.n = n_;
  path.meta = meta_;
  path.x.assign(n_, 0.0);
  filter_->apply(eps, path.x);
  path.eps = std::move(eps);
  path.s.assign(n_ + 1, 0.0);
  long double acc = 0.0L;
  for (std::size_t k = 0; k < n_; ++k) {
    acc += path.x[k];
    path.s[k + 1] = static_cast<double>(acc);
  }
  return path;
}

SamplePath simulate_path(const InnovationModel& model, const CoefficientScheme& scheme,
                         std::size_t n, RandomStream& stream,
                         std::optional<std::size_t> lag) {
  return PathSimulator(model, scheme, n, lag).simulate(stream);
}

SamplePath path_from_series(std::vector<double> x, const CoefficientScheme& scheme) {
  if (x.empty()) throw std::invalid_argument("path_from_series: empty series");
  SamplePath path;
  path.n = x.size();
  path.meta.scheme = scheme;
  path.meta.a_n = scheme.coeff(path.n);
  path.s.assign(path.n + 1, 0.0);
  long double acc = 0.0L;
  for (std::size_t k = 0; k < path.n; ++k) {
    acc += x[k];
    path.s[k + 1] = static_cast<double>(acc);
  }
  path.x = std::move(x);
  return path;
}

std::size_t step_index(std::size_t n, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("step_index: t outside [0, 1]");
  if (t == 1.0) return n;
  const double nd = static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::floor(nd * t));
  // n * t can round below an exact grid point k/n
  while (k < n && static_cast<double>(k + 1) / nd <= t) ++k;
  while (k > 0 && static_cast<double>(k) / nd > t) --k;
  return k;
}

PathFunctionals::PathFunctionals(std::vector<double> s, double b_n, double self_norm,
                                 double lln)
    : s_(std::move(s)), b_n_(b_n), self_norm_(self_norm), lln_(lln) {}

double PathFunctionals::W(double t) const { return s_[step_index(s_.size() - 1, t)] / b_n_; }

double PathFunctionals::SN(double t) const {
  return s_[step_index(s_.size() - 1, t)] / self_norm_;
}

namespace {

long double sum_squares(const std::vector<double>& v) {
  long double acc = 0.0L;
  for (double x : v) acc += static_cast<long double>(x) * x;
  return acc;
}

}  // namespace

PathFunctionals functionals(const SamplePath& path, const NormalizerTable& table) {
  const long double q = sum_squares(path.x);
  if (q == 0.0L) throw DegeneratePathError("functionals: sum of X_i^2 is zero");
  const double n = static_cast<double>(path.n);
  const double self_norm =
      n * path.meta.a_n * static_cast<double>(std::sqrt(q));
  const double lln = static_cast<double>(q / (static_cast<long double>(n) * table.l_n(path.n)));
  return PathFunctionals(path.s, std::sqrt(table.B_sq(path.n)), self_norm, lln);
}

TruncationReport truncated_path_diagnostic(const SamplePath& path,
                                           const NormalizerTable& table) {
  const std::size_t n = path.n;
  const std::size_t m = path.meta.lag;
  if (path.eps.size() != n + m)
    throw std::invalid_argument("truncated_path_diagnostic: path carries no innovations");
  const auto etas = table.eta_range(n + m - 1);
  // prefix[q] = a_0 + ... + a_q
  const std::vector<double> a = path.meta.scheme.coefficients(m + 1);
  std::vector<long double> prefix(m + 1);
  long double acc = 0.0L;
  for (std::size_t i = 0; i <= m; ++i) prefix[i] = acc += a[i];

  TruncationReport rep;
  long double diff = 0.0L;
  const auto sn = static_cast<std::ptrdiff_t>(n);
  const auto sm = static_cast<std::ptrdiff_t>(m);
  for (std::ptrdiff_t t = 1 - sm; t <= sn; ++t) {
    const double e = path.eps_at(t);
    const std::size_t j = static_cast<std::size_t>(sn - t);
    if (!(std::fabs(e) > (*etas)[j])) continue;
    ++rep.clipped;
    // coefficient of eps_t in S_n: sum over k in [max(1,t), min(n, t+M)] of a_{k-t}
    const std::ptrdiff_t hi = std::min(sn, t + sm) - t;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(1, t) - t;
    const long double c = prefix[static_cast<std::size_t>(hi)] -
                          (lo > 0 ? prefix[static_cast<std::size_t>(lo - 1)] : 0.0L);
    diff += c * e;
  }
  rep.difference = static_cast<double>(diff);
  rep.ratio = std::fabs(rep.difference) / std::sqrt(table.B_sq(n));
  return rep;
}

UnitRootRun unit_root_run(const SamplePath& path, double rho) {
  const std::size_t n = path.n;
  UnitRootRun run;
  run.rho = rho;
  run.y.assign(n + 1, 0.0);
  long double lag_sq = 0.0L, cross = 0.0L, lag_diff = 0.0L, xsq = 0.0L;
  long double prev = 0.0L;
  for (std::size_t k = 1; k <= n; ++k) {
    const long double x = path.x[k - 1];
    const long double cur = rho * prev + x;
    run.y[k] = static_cast<double>(cur);
    lag_sq += prev * prev;
    cross += cur * prev;
    lag_diff += prev * (cur - prev);
    xsq += x * x;
    prev = cur;
  }
  if (lag_sq == 0.0L) throw DegeneratePathError("unit_root_run: sum of Y_{k-1}^2 is zero");
  if (xsq == 0.0L) throw DegeneratePathError("unit_root_run: sum of X_k^2 is zero");
  const long double nn = static_cast<long double>(n);
  const long double an2 = static_cast<long double>(path.meta.a_n) * path.meta.a_n;
  run.sum_lag_sq = static_cast<double>(lag_sq);
  run.sum_lag_diff = static_cast<double>(lag_diff);
  run.sum_x_sq = static_cast<double>(xsq);
  run.rho_hat = static_cast<double>(cross / lag_sq);
  run.stat_a = static_cast<double>(lag_sq / (nn * nn * nn * an2 * xsq));
  run.stat_b = static_cast<double>(lag_diff / (nn * nn * an2 * xsq));
  // n (rho_hat - 1) = n sum Y_{k-1}(Y_k - Y_{k-1}) / sum Y_{k-1}^2
  run.stat_c = static_cast<double>(nn * lag_diff / lag_sq);
  return run;
}

}  // namespace selfnorm
