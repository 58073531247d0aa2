#include <gtest/gtest.h>

#include <cmath>

#include "selfnorm/errors.hpp"
#include "selfnorm/fbm.hpp"
#include "fbm_oracle.hpp"

using namespace selfnorm;

TEST(Fbm, SpecValidation) {
  EXPECT_THROW(FbmSpec(0.0, 16), std::invalid_argument);
  EXPECT_THROW(FbmSpec(1.0, 16), std::invalid_argument);
  EXPECT_THROW(FbmSpec(0.7, 1), std::invalid_argument);
  EXPECT_NO_THROW(FbmSpec(0.7, 2));
}

TEST(Fbm, KernelAndNoiseAutocovariance) {
  EXPECT_DOUBLE_EQ(fbm_kernel(0.75, 1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(fbm_kernel(0.5, 0.3, 0.7), 0.3);
  EXPECT_DOUBLE_EQ(fgn_autocovariance(0.5, 0), 1.0);
  EXPECT_NEAR(fgn_autocovariance(0.5, 3), 0.0, 1e-15);
  // gamma(1) = 2^{2H - 1} - 1
  EXPECT_NEAR(fgn_autocovariance(0.75, 1), std::pow(2.0, 0.5) - 1.0, 1e-14);
}

TEST(Fbm, PathStartsAtZero) {
  FbmSampler s(FbmSpec(0.75, 64));
  RandomStream rs(1, {2});
  const auto p = s.sample(rs);
  ASSERT_EQ(p.w.size(), 65u);
  EXPECT_EQ(p.w[0], 0.0);
  EXPECT_FALSE(p.dense);
}

TEST(Fbm, CovarianceWithinStandardErrors) {
  const std::vector<double> times{0.2, 0.4, 0.6, 0.8, 1.0};
  for (double H : {0.6, 0.75, 0.9}) {
    FbmSampler s(FbmSpec(H, 20));
    const auto c = oracle::fbm_covariance_check(s, times, 20000, 41);
    EXPECT_LT(c.max_z, 4.0) << H;
  }
}

TEST(Fbm, BrownianIncrementsUncorrelated) {
  FbmSampler s(FbmSpec(0.5, 64));
  EXPECT_LT(oracle::increment_correlation_z(s, 2000, 4, 5), 4.0);
  EXPECT_FALSE(s.clipped());
}

TEST(Fbm, HalfAndOneCovariance) {
  // H = 1/2: Cov(W(0.5), W(1)) = 0.5
  FbmSampler s(FbmSpec(0.5, 8));
  const auto c = oracle::fbm_covariance_check(s, {0.5, 1.0}, 20000, 9);
  EXPECT_LT(c.max_z, 4.0);
}

TEST(Fbm, DenseAndCirculantAgree) {
  const FbmSpec spec(0.8, 32);
  FbmSampler circ(spec, FbmBackend::Circulant);
  FbmSampler dense(spec, FbmBackend::Dense);
  EXPECT_TRUE(dense.dense());
  EXPECT_FALSE(circ.dense());
  const std::vector<double> times{0.25, 0.5, 1.0};
  EXPECT_LT(oracle::fbm_covariance_check(dense, times, 20000, 3).max_z, 4.0);
  std::vector<double> a, b;
  for (std::uint64_t r = 0; r < 3000; ++r) {
    RandomStream r1(1, {r}), r2(2, {r});
    a.push_back(circ.sample(r1).w.back());
    b.push_back(dense.sample(r2).w.back());
  }
  EXPECT_LT(ks_two_sample(EmpiricalDistribution(a), EmpiricalDistribution(b)),
            ks_critical_value(3000, 3000, 0.01));
}

TEST(Fbm, DenseLimitEnforced) {
  EXPECT_THROW(FbmSampler(FbmSpec(0.7, FbmSampler::kDenseLimit + 1), FbmBackend::Dense),
               ResourceError);
}

TEST(Fbm, SampleDeterministic) {
  FbmSampler s(FbmSpec(0.75, 128));
  RandomStream a(4, {1}), b(4, {1});
  EXPECT_EQ(s.sample(a).w, s.sample(b).w);
}

TEST(Fbm, FunctionalStubs) {
  const std::vector<double> ones(11, 1.0);
  const auto c = functionals_fbm(ones);
  EXPECT_DOUBLE_EQ(c.w1sq, 1.0);
  EXPECT_DOUBLE_EQ(c.integral, 1.0);
  EXPECT_DOUBLE_EQ(c.ratio, 0.5);
  // W(t) = t: trapezoid integral of t^2 with step h is 1/3 + h^2 / 6
  double prev_err = 1.0;
  for (std::size_t m : {4u, 16u, 64u, 256u}) {
    std::vector<double> w(m + 1);
    for (std::size_t k = 0; k <= m; ++k) w[k] = double(k) / m;
    const auto f = functionals_fbm(w);
    const double h = 1.0 / m;
    EXPECT_NEAR(f.integral, 1.0 / 3.0 + h * h / 6.0, 1e-14);
    EXPECT_NEAR(f.ratio, 0.5 / (1.0 / 3.0 + h * h / 6.0), 1e-13);
    const double err = std::fabs(f.ratio - 1.5);
    EXPECT_LT(err, prev_err);
    prev_err = err;
  }
  EXPECT_THROW(functionals_fbm(std::vector<double>(5, 0.0)), DegeneratePathError);
  EXPECT_THROW(functionals_fbm(std::vector<double>(1, 1.0)), std::invalid_argument);
}

TEST(Fbm, SquaredEndpointIsChiSquared) {
  // Var W_H(1) = 1, so P(W(1)^2 <= 1) = P(|Z| <= 1) = 0.682689...
  const auto d = reference_distribution(FbmSpec(0.7, 64), FbmFunctional::W1Squared, 10000, 17);
  const double p = 0.6826894921370859;
  EXPECT_NEAR(d.cdf(1.0), p, 4.0 * std::sqrt(p * (1 - p) / 10000));
}

TEST(Fbm, ReferenceSeedsAgreeInDistribution) {
  const FbmSpec spec(0.75, 128);
  const auto a = reference_samples(spec, 2000, 1);
  const auto b = reference_samples(spec, 2000, 2);
  for (auto f : {FbmFunctional::W1Squared, FbmFunctional::Integral, FbmFunctional::Ratio})
    EXPECT_LT(ks_two_sample(a.get(f), b.get(f)), ks_critical_value(2000, 2000, 0.01));
}

TEST(Fbm, ReferenceIndependentOfWorkers) {
  const FbmSpec spec(0.6, 64);
  const auto a = reference_samples(spec, 300, 8, 3, 1);
  const auto b = reference_samples(spec, 300, 8, 3, 4);
  EXPECT_EQ(a.ratio.values(), b.ratio.values());
  EXPECT_EQ(a.integral.values(), b.integral.values());
  EXPECT_THROW(reference_samples(spec, 99, 1), std::invalid_argument);
}

TEST(Fbm, GridRefinementStabilizesFunctionals) {
  // coarse and fine grids share a limit; means of int W^2 agree within noise
  const auto coarse = reference_distribution(FbmSpec(0.75, 32), FbmFunctional::Integral, 4000, 3);
  const auto fine = reference_distribution(FbmSpec(0.75, 512), FbmFunctional::Integral, 4000, 4);
  // E int_0^1 W_H^2 dt = 1 / (2H + 1)
  const double exact = 1.0 / 2.5;
  EXPECT_NEAR(fine.mean(), exact, 0.03);
  EXPECT_NEAR(coarse.mean(), exact, 0.03);
}
