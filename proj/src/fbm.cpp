#include "selfnorm/fbm.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include "fftw_support.hpp"
#include "selfnorm/errors.hpp"
#include "selfnorm/parallel.hpp"

namespace selfnorm {

FbmSpec::FbmSpec(double hurst, std::size_t grid) : H(hurst), m(grid) {
  if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("FbmSpec: H must lie in (0, 1)");
  if (m < 2) throw std::invalid_argument("FbmSpec: grid size m must be >= 2");
}

double fbm_kernel(double H, double s, double t) {
  const double e = 2.0 * H;
  return 0.5 * (std::pow(t, e) + std::pow(s, e) - std::pow(std::fabs(t - s), e));
}

double fgn_autocovariance(double H, std::size_t k) {
  const double e = 2.0 * H;
  const double x = static_cast<double>(k);
  if (k == 0) return 1.0;
  return 0.5 * (std::pow(x + 1.0, e) - 2.0 * std::pow(x, e) + std::pow(x - 1.0, e));
}

struct FbmSampler::Impl {
  // circulant backend
  std::size_t N = 0;
  std::vector<double> root;  // sqrt(lambda_k / N)
  fftw_plan plan = nullptr;
  // dense backend: covariance = F F^T on t_1..t_m
  Eigen::MatrixXd factor;

  ~Impl() {
    if (plan) {
      std::lock_guard lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

namespace {

std::vector<double> embedding_eigenvalues(double H, std::size_t m) {
  const std::size_t N = 2 * m;
  detail::RealBuf c(fftw_alloc_real(N));
  detail::ComplexBuf spec(fftw_alloc_complex(N / 2 + 1));
  if (!c || !spec) throw ResourceError("fbm: cannot allocate embedding of size " + std::to_string(N));
  for (std::size_t k = 0; k <= m; ++k) c.get()[k] = fgn_autocovariance(H, k);
  for (std::size_t k = 1; k < m; ++k) c.get()[N - k] = c.get()[k];
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(N), c.get(), spec.get(), FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
  }
  std::vector<double> lambda(N);
  for (std::size_t k = 0; k <= N / 2; ++k) lambda[k] = spec.get()[k][0];
  for (std::size_t k = N / 2 + 1; k < N; ++k) lambda[k] = lambda[N - k];
  return lambda;
}

}  // namespace

FbmSampler::FbmSampler(FbmSpec spec, FbmBackend backend)
    : spec_(spec), impl_(std::make_unique<Impl>()) {
  (void)FbmSpec(spec.H, spec.m);  // validates
  const std::size_t m = spec_.m;
  bool use_dense = backend == FbmBackend::Dense;

  if (!use_dense) {
    std::vector<double> lambda = embedding_eigenvalues(spec_.H, m);
    min_eigenvalue_ = *std::min_element(lambda.begin(), lambda.end());
    if (min_eigenvalue_ < -kClipThreshold) {
      if (backend == FbmBackend::Circulant || m > kDenseLimit) {
        std::ostringstream msg;
        msg << "fbm: circulant embedding failed (min eigenvalue " << min_eigenvalue_
            << " < -" << kClipThreshold << ") and m = " << m
            << " exceeds the dense fallback limit " << kDenseLimit;
        throw ResourceError(msg.str());
      }
      use_dense = true;
    } else {
      impl_->N = lambda.size();
      impl_->root.resize(lambda.size());
      const double N = static_cast<double>(lambda.size());
      for (std::size_t k = 0; k < lambda.size(); ++k) {
        if (lambda[k] < 0.0) clipped_ = true;
        impl_->root[k] = std::sqrt(std::max(lambda[k], 0.0) / N);
      }
      detail::ComplexBuf a(fftw_alloc_complex(impl_->N));
      detail::ComplexBuf b(fftw_alloc_complex(impl_->N));
      std::lock_guard lock(detail::fftw_planner_mutex());
      impl_->plan = fftw_plan_dft_1d(static_cast<int>(impl_->N), a.get(), b.get(),
                                     FFTW_FORWARD, FFTW_ESTIMATE);
    }
  }

  if (use_dense) {
    if (m > kDenseLimit) {
      std::ostringstream msg;
      msg << "fbm: dense backend requested for m = " << m << " above the limit " << kDenseLimit;
      throw ResourceError(msg.str());
    }
    dense_ = true;
    const auto sm = static_cast<Eigen::Index>(m);
    Eigen::MatrixXd cov(sm, sm);
    for (Eigen::Index i = 0; i < sm; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double v = fbm_kernel(spec_.H, static_cast<double>(i + 1) / static_cast<double>(m),
                                    static_cast<double>(j + 1) / static_cast<double>(m));
        cov(i, j) = v;
        cov(j, i) = v;
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw std::runtime_error("fbm: eigen-decomposition failed");
    Eigen::VectorXd ev = eig.eigenvalues();
    min_eigenvalue_ = ev.minCoeff();
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
      if (ev[k] < 0.0) {
        clipped_ = true;
        ev[k] = 0.0;
      }
    }
    impl_->factor = eig.eigenvectors() * ev.cwiseSqrt().asDiagonal();
  }
}

FbmSampler::~FbmSampler() = default;

FbmPath FbmSampler::sample(RandomStream& stream) const {
  const std::size_t m = spec_.m;
  FbmPath path;
  path.spec = spec_;
  path.dense = dense_;
  path.clipped = clipped_;
  path.w.assign(m + 1, 0.0);

  if (dense_) {
    Eigen::VectorXd z(static_cast<Eigen::Index>(m));
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = stream.normal();
    const Eigen::VectorXd w = impl_->factor * z;
    for (std::size_t k = 0; k < m; ++k) path.w[k + 1] = w[static_cast<Eigen::Index>(k)];
    return path;
  }

  const std::size_t N = impl_->N;
  detail::ComplexBuf in(fftw_alloc_complex(N));
  detail::ComplexBuf out(fftw_alloc_complex(N));
  if (!in || !out) throw ResourceError("fbm: cannot allocate FFT buffers of size " + std::to_string(N));
  for (std::size_t k = 0; k < N; ++k) {
    const double re = stream.normal();
    const double im = stream.normal();
    in.get()[k][0] = impl_->root[k] * re;
    in.get()[k][1] = impl_->root[k] * im;
  }
  fftw_execute_dft(impl_->plan, in.get(), out.get());
  const double scale = std::pow(static_cast<double>(m), -spec_.H);
  long double acc = 0.0L;
  for (std::size_t k = 0; k < m; ++k) {
    acc += out.get()[k][0];
    path.w[k + 1] = static_cast<double>(acc) * scale;
  }
  return path;
}

FbmPath sample_fbm(const FbmSpec& spec, RandomStream& stream) {
  return FbmSampler(spec).sample(stream);
}

FbmFunctionals functionals_fbm(std::span<const double> w) {
  if (w.size() < 2) throw std::invalid_argument("functionals_fbm: need at least two grid points");
  const std::size_t m = w.size() - 1;
  long double acc = 0.5L * (static_cast<long double>(w[0]) * w[0] +
                            static_cast<long double>(w[m]) * w[m]);
  for (std::size_t k = 1; k < m; ++k) acc += static_cast<long double>(w[k]) * w[k];
  FbmFunctionals f;
  f.w1sq = w[m] * w[m];
  f.integral = static_cast<double>(acc / static_cast<long double>(m));
  if (f.integral == 0.0) throw DegeneratePathError("functionals_fbm: integral of W^2 is zero");
  f.ratio = 0.5 * f.w1sq / f.integral;
  return f;
}

FbmFunctionals functionals_fbm(const FbmPath& path) { return functionals_fbm(path.w); }

const EmpiricalDistribution& FbmReference::get(FbmFunctional f) const {
  switch (f) {
    case FbmFunctional::W1Squared: return w1sq;
    case FbmFunctional::Integral: return integral;
    case FbmFunctional::Ratio: return ratio;
  }
  throw std::invalid_argument("FbmReference: unknown functional");
}

FbmReference reference_samples(const FbmSpec& spec, std::size_t R, std::uint64_t seed,
                               std::uint64_t tag, std::size_t workers) {
  if (R < 100) throw std::invalid_argument("reference_samples: R must be >= 100");
  const FbmSampler sampler(spec);
  std::vector<double> a(R), b(R), c(R);
  parallel_for(R, workers, [&](std::size_t r) {
    RandomStream stream(seed, {static_cast<std::uint64_t>(StreamTag::Fbm), tag, r});
    const FbmFunctionals f = functionals_fbm(sampler.sample(stream));
    a[r] = f.w1sq;
    b[r] = f.integral;
    c[r] = f.ratio;
  });
  return {EmpiricalDistribution(std::move(a), "fbm:w1sq"),
          EmpiricalDistribution(std::move(b), "fbm:integral"),
          EmpiricalDistribution(std::move(c), "fbm:ratio")};
}

EmpiricalDistribution reference_distribution(const FbmSpec& spec, FbmFunctional functional,
                                             std::size_t R, std::uint64_t seed,
                                             std::uint64_t tag, std::size_t workers) {
  return reference_samples(spec, R, seed, tag, workers).get(functional);
}

}  // namespace selfnorm
