#include <gtest/gtest.h>

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <random>

#include "selfnorm/errors.hpp"
#include "selfnorm/normalizer.hpp"
#include "c_alpha_oracle.hpp"

using namespace selfnorm;

namespace {

const InnovationModel kRad(InnovationKind::Rademacher);
const InnovationModel kGauss(InnovationKind::StandardGaussian);
const InnovationModel kPareto(InnovationKind::SymmetricPareto2);

// Root of 2 ln s / s^2 = 1 / j on s > sqrt(e) in long double.
long double pareto_eta_oracle(double j) {
  auto f = [j](long double s) { return 2.0L * std::log(s) / (s * s) - 1.0L / j; };
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      f, 2.0L, 1e15L, boost::math::tools::eps_tolerance<long double>(60), iters);
  return (r.first + r.second) / 2.0L;
}

}  // namespace

TEST(Normalizer, RademacherEtaClosedForm) {
  EXPECT_EQ(eta(kRad, 1), 2.0);
  EXPECT_EQ(eta(kRad, 4), 2.0);
  EXPECT_EQ(eta(kRad, 9), 3.0);
  EXPECT_EQ(eta(kRad, 100), 10.0);
  for (std::size_t j : {5u, 17u, 1000u, 123456u})
    EXPECT_NEAR(eta(kRad, j), std::sqrt(double(j)), 1e-10 * std::sqrt(double(j)));
}

TEST(Normalizer, ParetoEtaAtBoundary) {
  EXPECT_EQ(eta(kPareto, 1), 2.0);
  EXPECT_LE(kPareto.truncated_second_moment(2.0) / 4.0, 1.0);
}

TEST(Normalizer, ParetoEtaAgainstRootFinder) {
  for (double j : {1e3, 1e6, 1e9}) {
    const double expected = static_cast<double>(pareto_eta_oracle(j));
    const double got = eta(kPareto, static_cast<std::size_t>(j));
    EXPECT_NEAR(got, expected, 1e-10 * expected) << j;
  }
}

TEST(Normalizer, EtaInfimumProperty) {
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> logj(0.0, std::log(1e9));
  for (const auto& m : {kRad, kGauss, kPareto}) {
    for (int k = 0; k < 200; ++k) {
      const auto j = static_cast<std::size_t>(std::exp(logj(gen))) + 1;
      const double e = eta(m, j);
      const double bound = 1.0 / static_cast<double>(j);
      EXPECT_LE(m.truncated_second_moment(e) / (e * e), bound);
      if (e > 2.0) {
        const double tol = 1e-10 * std::max(1.0, e);
        const double below = e - tol;
        EXPECT_GT(m.truncated_second_moment(below) / (below * below), bound)
            << m.name() << " j=" << j;
        // a coarse scan of [b + 1, eta - tol] finds no earlier point
        for (int q = 0; q <= 50; ++q) {
          const double s = 2.0 + (below - 2.0) * q / 50.0;
          EXPECT_GT(m.truncated_second_moment(s) / (s * s), bound);
        }
      }
    }
  }
}

TEST(Normalizer, EtaNondecreasing) {
  for (const auto& m : {kRad, kGauss, kPareto}) {
    NormalizerTable t(m, CoefficientScheme::farima(0.3));
    const auto v = t.eta_range(20000);
    for (std::size_t j = 1; j < v->size(); ++j) ASSERT_GE((*v)[j], (*v)[j - 1]) << m.name();
    for (std::size_t j : {2u, 3u, 99u, 4097u, 20000u}) EXPECT_EQ((*v)[j], eta(m, j)) << m.name();
  }
}

TEST(Normalizer, EtaRangeMatchesPointwiseForRandomIndices) {
  std::mt19937_64 gen(7);
  NormalizerTable t(kGauss, CoefficientScheme::farima(0.3));
  const auto v = t.eta_range(300000);
  std::uniform_int_distribution<std::size_t> pick(0, 300000);
  for (int k = 0; k < 500; ++k) {
    const std::size_t j = pick(gen);
    ASSERT_EQ((*v)[j], eta(kGauss, j)) << j;
  }
}

TEST(Normalizer, CAlphaUnitPiece) {
  // the [0, 1] part of the integral is 1 / (3 - 2 alpha); at 3/4 this is 2/3
  const double alpha = 0.75;
  EXPECT_NEAR(1.0 / (3.0 - 2.0 * alpha), 0.6666666666666666, 1e-15);
  // c_alpha (1 - alpha)^2 exceeds that piece by the positive remainder
  EXPECT_GT(c_alpha(alpha) * (1 - alpha) * (1 - alpha), 1.0 / (3.0 - 2.0 * alpha));
}

TEST(Normalizer, CAlphaAgainstOracles) {
  for (double alpha : {0.6, 0.75, 0.9}) {
    const double lib = c_alpha(alpha);
    EXPECT_NEAR(lib, oracle::c_alpha_trapezoid(alpha), 1e-6) << alpha;
    EXPECT_NEAR(lib, oracle::c_alpha_gamma(alpha), 1e-8 * lib) << alpha;
  }
  EXPECT_NEAR(c_alpha(0.75), 13.9843, 1e-4);
}

TEST(Normalizer, CAlphaGridFinitePositive) {
  for (double alpha = 0.55; alpha < 0.96; alpha += 0.1) {
    const double c = c_alpha(alpha);
    EXPECT_TRUE(std::isfinite(c));
    EXPECT_GT(c, 0.0);
  }
  EXPECT_THROW(c_alpha(0.5), std::domain_error);
  EXPECT_THROW(c_alpha(1.0), std::domain_error);
}

TEST(Normalizer, CAlphaBitReproducible) {
  EXPECT_EQ(c_alpha(0.7), c_alpha(0.7));
}

TEST(Normalizer, RademacherBn) {
  NormalizerTable t(kRad, CoefficientScheme::power_law(0.75));
  EXPECT_EQ(t.l_n(10000), 1.0);
  EXPECT_NEAR(t.B_sq(10000), c_alpha(0.75) * std::pow(1e4, 1.5), 1e-9 * t.B_sq(10000));
}

TEST(Normalizer, ParetoLn) {
  NormalizerTable t(kPareto, CoefficientScheme::farima(0.3));
  const double e = static_cast<double>(pareto_eta_oracle(1e4));
  EXPECT_NEAR(t.l_n(10000), 2.0 * std::log(e), 1e-10);
}

TEST(Normalizer, ParetoEtaOrder) {
  double prev = 1.0;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    const double e = eta(kPareto, n);
    const double l = kPareto.truncated_second_moment(e);
    const double ratio = e * e / (double(n) * l);
    EXPECT_NEAR(ratio, 1.0, 0.10) << n;
    // the root relation holds with equality up to rounding at every n
    EXPECT_NEAR(ratio, 1.0, 1e-9) << n;
    const double dist = std::fabs(ratio - 1.0);
    EXPECT_LE(dist, prev + 1e-12);
    prev = dist;
  }
}

TEST(Normalizer, DnDefinition) {
  NormalizerTable t(kGauss, CoefficientScheme::farima(0.3));
  EXPECT_NEAR(t.D_sq(5000), t.a_sq() * 5000.0 * t.l_n(5000), 1e-12 * t.D_sq(5000));
}

TEST(Normalizer, BnDefinitionExact) {
  for (const auto& s : {CoefficientScheme::farima(0.3), CoefficientScheme::power_law(0.6, SlowVary::log_power(1.0))}) {
    NormalizerTable t(kPareto, s);
    const double n = 4096.0;
    const double L = s.kind() == CoefficientScheme::Kind::Farima ? s.coeff(4096) * std::pow(n, s.alpha())
                                                                 : s.slow()(n);
    EXPECT_NEAR(t.B_sq(4096), t.c_alpha() * t.l_n(4096) * std::pow(n, 3.0 - 2.0 * s.alpha()) * L * L,
                1e-12 * t.B_sq(4096));
  }
}

static void expect_regular_variation(const InnovationModel& m) {
  for (const auto& s : {CoefficientScheme::power_law(0.75), CoefficientScheme::farima(0.3)}) {
    NormalizerTable t(m, s);
    const double ratio = t.B_sq(200000) / t.B_sq(100000);
    EXPECT_NEAR(ratio / std::pow(2.0, 3.0 - 2.0 * s.alpha()), 1.0, 0.02) << m.name() << s.describe();
  }
}

TEST(Normalizer, RegularVariationOfBnRademacher) { expect_regular_variation(kRad); }
TEST(Normalizer, RegularVariationOfBnGaussian) { expect_regular_variation(kGauss); }
// l_n grows like ln n here, so l_{2n} / l_n - 1 is about ln 2 / ln n at n = 10^5
TEST(Normalizer, RegularVariationOfBnPareto) { expect_regular_variation(kPareto); }

TEST(Normalizer, StoredIndicesTrackRequests) {
  NormalizerTable t(kPareto, CoefficientScheme::farima(0.3));
  t.l_n(123);
  t.eta(77);
  const auto idx = t.stored_indices();
  EXPECT_NE(std::find(idx.begin(), idx.end(), 123u), idx.end());
  EXPECT_NE(std::find(idx.begin(), idx.end(), 77u), idx.end());
}

TEST(Normalizer, VarianceEquivalenceRademacher) {
  // sum_{i>=1} b_{ni}^2 l(eta_i) / B_n^2 within 5% of 1 at n = 10^5
  NormalizerTable t(kRad, CoefficientScheme::power_law(0.75));
  const auto v = variance_equivalence(t, 100000);
  EXPECT_NEAR(v.ratio, 1.0, 0.05);
}

TEST(Normalizer, VarianceEquivalenceTailNegligible) {
  NormalizerTable t(kRad, CoefficientScheme::power_law(0.75));
  const auto v = variance_equivalence(t, 1000);
  EXPECT_LT(v.sum.remainder, 1e-4 * v.sum.total);
  EXPECT_GT(v.sum.direct, 0.9 * v.sum.total);
}
