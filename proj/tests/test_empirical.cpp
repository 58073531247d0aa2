#include <gtest/gtest.h>

#include <cmath>

#include "selfnorm/empirical.hpp"

using namespace selfnorm;

TEST(Empirical, CdfAndQuantile) {
  EmpiricalDistribution d({3.0, 1.0, 2.0, 4.0});
  EXPECT_EQ(d.values(), (std::vector<double>{1.0, 2.0, 3.0, 4.0}));
  EXPECT_EQ(d.cdf(0.5), 0.0);
  EXPECT_EQ(d.cdf(2.0), 0.5);
  EXPECT_EQ(d.cdf(10.0), 1.0);
  EXPECT_EQ(d.quantile(0.0), 1.0);
  EXPECT_EQ(d.quantile(1.0), 4.0);
  EXPECT_DOUBLE_EQ(d.median(), 2.5);
  EXPECT_DOUBLE_EQ(d.mean(), 2.5);
  EXPECT_EQ(d.scaled(2.0).values(), (std::vector<double>{2.0, 4.0, 6.0, 8.0}));
  EXPECT_THROW(d.quantile(1.5), std::domain_error);
  EXPECT_THROW(d.scaled(0.0), std::domain_error);
  EXPECT_THROW(EmpiricalDistribution({1.0, std::nan("")}), std::invalid_argument);
}

TEST(Empirical, KsOneSampleSinglePoint) {
  EmpiricalDistribution d({0.0});
  EXPECT_NEAR(ks_one_sample(d, [](double x) { return normal_cdf(x); }), 0.5, 1e-15);
}

TEST(Empirical, KsOneSampleExactUniform) {
  // points (2k - 1) / (2m) against U(0, 1) give 1 / (2m)
  std::vector<double> v;
  for (int k = 1; k <= 10; ++k) v.push_back((2.0 * k - 1) / 20.0);
  auto u = [](double x) { return std::clamp(x, 0.0, 1.0); };
  EXPECT_NEAR(ks_one_sample(EmpiricalDistribution(v), u), 0.05, 1e-15);
}

TEST(Empirical, KsOneSampleTies) {
  EmpiricalDistribution d({0.5, 0.5, 0.5, 0.5});
  auto u = [](double x) { return std::clamp(x, 0.0, 1.0); };
  EXPECT_NEAR(ks_one_sample(d, u), 0.5, 1e-15);
}

TEST(Empirical, KsTwoSample) {
  EmpiricalDistribution a({1.0, 2.0, 3.0});
  EXPECT_EQ(ks_two_sample(a, a), 0.0);
  EmpiricalDistribution b({10.0, 11.0});
  EXPECT_EQ(ks_two_sample(a, b), 1.0);
  EXPECT_EQ(ks_two_sample(b, a), 1.0);
  EmpiricalDistribution c({1.5, 2.5, 3.5, 4.5});
  EXPECT_EQ(ks_two_sample(a, c), ks_two_sample(c, a));
  EXPECT_NEAR(ks_two_sample(a, c), 0.5, 1e-15);
  // interleaved ties: F_a jumps to 1/2 at 1, F_b reaches 1/2 at 1 too
  EXPECT_EQ(ks_two_sample(EmpiricalDistribution({1.0, 2.0}), EmpiricalDistribution({1.0, 3.0})), 0.5);
}

TEST(Empirical, EmptyInputsThrow) {
  EmpiricalDistribution e;
  EmpiricalDistribution a({1.0});
  EXPECT_THROW(ks_one_sample(e, [](double x) { return normal_cdf(x); }), std::invalid_argument);
  EXPECT_THROW(ks_two_sample(e, a), std::invalid_argument);
  EXPECT_THROW(ks_two_sample(a, e), std::invalid_argument);
  EXPECT_THROW(e.cdf(0.0), std::invalid_argument);
  EXPECT_THROW(ks_critical_value(0, 5, 0.01), std::invalid_argument);
}

TEST(Empirical, CriticalValueAndNoiseFloor) {
  EXPECT_NEAR(ks_critical_value(2000, 10000, 0.01), 1.6276 * std::sqrt(12000.0 / 2e7), 1e-4);
  EXPECT_NEAR(ks_noise_floor(2000), 1.22 / std::sqrt(2000.0), 1e-15);
}

TEST(Empirical, NormalCdf) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.0), 0.8413447460685429, 1e-15);
  EXPECT_NEAR(normal_cdf(2.0, 2.0), 0.8413447460685429, 1e-15);
}
