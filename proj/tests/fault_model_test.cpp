#include "ftct/fault_model.hpp"

#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <vector>

namespace ftct {
namespace {

// Independent closed form of the random-incidence distribution:
// G(t) = P(1/kappa, (t/lambda)^kappa).
double g_oracle(double lambda, double kappa, double t) {
  return boost::math::gamma_p(1.0 / kappa, std::pow(t / lambda, kappa));
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> v;
  for (int k = 0; k < count; ++k) {
    v.push_back(lo * std::pow(hi / lo, k / double(count - 1)));
  }
  return v;
}

TEST(WeibullFaultsTest, Validation) {
  EXPECT_THROW(WeibullFaults(0.0, 0.5), std::invalid_argument);
  EXPECT_THROW(WeibullFaults(10.0, 0.0), std::invalid_argument);
  EXPECT_THROW(WeibullFaults(10.0, 1.2), std::invalid_argument);
  EXPECT_NO_THROW(WeibullFaults(10.0, 1.0));
  EXPECT_NEAR(WeibullFaults(1000, 0.7).mean(), 1000 * std::tgamma(1 + 1 / 0.7), 1e-9);
}

TEST(Cdf, Examples) {
  const WeibullFaults exp_model(100, 1.0);
  EXPECT_EQ(cdf(exp_model, 0.0), 0.0);
  EXPECT_NEAR(cdf(exp_model, 10.0), 1 - std::exp(-0.1), 1e-15);
  const WeibullFaults m(100, 0.7);
  EXPECT_NEAR(cdf(m, 1e6 * 100), 1.0, 1e-12);
  EXPECT_THROW(cdf(m, -1.0), std::invalid_argument);
  double prev = 0.0;
  for (double t : log_grid(1e-3, 1e5, 40)) {
    const double f = cdf(m, t);
    EXPECT_GE(f, prev);
    prev = f;
  }
}

TEST(RandomIncidence, MatchesIncompleteGamma) {
  for (double kappa : {0.3, 0.5, 0.7, 0.99, 1.0}) {
    const WeibullFaults m(100, kappa);
    EXPECT_EQ(random_incidence_cdf(m, 0.0), 0.0);
    for (double t : log_grid(0.1, 1e5, 50)) {
      EXPECT_NEAR(random_incidence_cdf(m, t), g_oracle(100, kappa, t), 1e-10)
          << "kappa=" << kappa << " t=" << t;
    }
  }
}

TEST(RandomIncidenceProperty, BoundedByCdf) {
  for (double kappa : {0.3, 0.5, 0.7, 1.0}) {
    const WeibullFaults m(50, kappa);
    for (double t : log_grid(50e-3, 50e3, 50)) {
      const double g = random_incidence_cdf(m, t), f = cdf(m, t);
      EXPECT_LE(g, f + 1e-9) << "kappa=" << kappa << " t=" << t;
      if (kappa == 1.0) EXPECT_NEAR(g, f, 1e-10);
    }
  }
}

TEST(RandomStreamTest, DeterministicAndDistinct) {
  RandomStream a(42, 3), b(42, 3), c(42, 4), e(43, 3);
  for (int k = 0; k < 10; ++k) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
    EXPECT_NE(x, e.next());
  }
  RandomStream u(1, 1);
  for (int k = 0; k < 1000; ++k) {
    const double v = u.uniform();
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  EXPECT_NE(mix_seed(1, 2), mix_seed(2, 1));
}

TEST(Sampling, InverseTransform) {
  const WeibullFaults m(1000, 0.7);
  EXPECT_EQ(time_to_failure(m, 0.0), 0.0);
  const double u = 0.3;
  EXPECT_NEAR(cdf(m, time_to_failure(m, u)), u, 1e-14);
}

void expect_mean_within_3_sigma(const WeibullFaults& m, double expected_mean) {
  RandomStream rng(2024, 0);
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = sample_time_to_failure(m, rng);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double sd = std::sqrt((sum2 / n - mean * mean) / n);
  EXPECT_LE(std::abs(mean - expected_mean), 3 * sd);
}

TEST(Sampling, ExponentialMean) { expect_mean_within_3_sigma(WeibullFaults(100, 1.0), 100.0); }

TEST(Sampling, WeibullMean) {
  expect_mean_within_3_sigma(WeibullFaults(1000, 0.7),
                             1000 * boost::math::tgamma(1 + 1 / 0.7));
}

TEST(LongRunRate, Examples) {
  EXPECT_NEAR(long_run_fault_rate(WeibullFaults(1000, 1.0)), 1e-3, 1e-15);
  EXPECT_NEAR(long_run_fault_rate(WeibullFaults(1000, 0.7)),
              1 / (1000 * boost::math::tgamma(1 + 1 / 0.7)), 1e-15);
  EXPECT_GT(long_run_fault_rate(WeibullFaults(100, 0.7)),
            long_run_fault_rate(WeibullFaults(200, 0.7)));
}

TEST(CountFailures, RenewalRate) {
  const WeibullFaults m(10, 0.7);
  RandomStream rng(5, 0);
  const double horizon = 1e6;
  const double count = static_cast<double>(count_failures(m, rng, horizon));
  // Renewal CLT: variance of N(t) is about t sigma^2 / mu^3.
  const double mu = m.mean();
  const double var1 = 100 * boost::math::tgamma(1 + 2 / 0.7) - mu * mu;
  const double sd = std::sqrt(horizon * var1 / (mu * mu * mu));
  EXPECT_LE(std::abs(count - horizon / mu), 3 * sd);
}

TEST(FailureProbabilityProperty, RandomPhaseBoundedByCdf) {
  // A task of length t started at a uniformly random point of a running
  // renewal process fails with probability G(t) <= F(t).
  const WeibullFaults m(10, 0.5);
  const double t = 2.0;
  RandomStream rng(77, 0);
  const int trials = 20000;
  int failed = 0;
  for (int k = 0; k < trials; ++k) {
    const double start = 1000.0 * rng.uniform() + 500.0;
    double clock = 0.0;
    while (clock <= start) clock += sample_time_to_failure(m, rng);
    if (clock <= start + t) ++failed;
  }
  const double p = double(failed) / trials;
  const double f = cdf(m, t);
  EXPECT_LE(p, f + 3 * std::sqrt(f * (1 - f) / trials));
  EXPECT_NEAR(p, random_incidence_cdf(m, t), 3 * std::sqrt(f * (1 - f) / trials));
}

TEST(FailureProbabilityProperty, DecreasingHazard) {
  // P(fail in [s, s+t] | alive at s) shrinks with s for kappa < 1.
  const WeibullFaults m(10, 0.6);
  const double t = 1.0;
  RandomStream rng(99, 0);
  std::vector<double> samples(200000);
  for (auto& x : samples) x = sample_time_to_failure(m, rng);
  double prev = 1.0;
  for (double s : {0.0, 2.0, 8.0, 20.0}) {
    int alive = 0, fail = 0;
    for (double x : samples) {
      if (x > s) {
        ++alive;
        if (x <= s + t) ++fail;
      }
    }
    const double p = double(fail) / alive;
    EXPECT_LE(p, prev + 3 * std::sqrt(p * (1 - p) / alive));
    prev = p;
  }
}

TEST(EpsilonN, Examples) {
  EXPECT_NEAR(epsilon_n(1, 5, 2.0), std::ldexp(1.0, -10) * 2.0 / 9.0, 1e-18);
  EXPECT_GT(epsilon_n(3, 12, 1.0), 0.0);
  EXPECT_LT(epsilon_n(3, 13, 1.0), epsilon_n(3, 12, 1.0));
  for (int n = 2; n < 15; ++n) {
    // The binomial sum grows with n, so one level less costs at most 4x.
    EXPECT_LE(epsilon_n(3, n - 1, 1.0), 4 * epsilon_n(3, n, 1.0) + 1e-300);
  }
}

TEST(Multipliers, OneLayer) {
  const WeibullFaults m(100, 0.7);
  EXPECT_DOUBLE_EQ(expected_error_multiplier_one_layer(m, 0.0), 1.0);
  EXPECT_NEAR(expected_error_multiplier_one_layer(m, 1e9), 4.0, 1e-9);
  EXPECT_NEAR(expected_error_multiplier_one_layer(m, 1.0),
              1 + 3 * (1 - std::exp(-std::pow(0.01, 0.7))), 1e-12);
  double prev = 1.0;
  for (double t : log_grid(1e-3, 1e6, 40)) {
    const double v = expected_error_multiplier_one_layer(m, t);
    EXPECT_GE(v, prev - 1e-15);
    EXPECT_LE(v, 4.0);
    prev = v;
  }
}

TEST(Multipliers, TwoLayer) {
  const WeibullFaults m(100, 0.7);
  EXPECT_NEAR(expected_error_multiplier_two_layer(m, 3, 1.0, 0.5), 1.63, 0.005);
  EXPECT_DOUBLE_EQ(expected_error_multiplier_two_layer(m, 3, 0.0, 0.0), 1.0);
  EXPECT_NEAR(expected_error_multiplier_two_layer(m, 3, 1e12, 1e12), 16.0, 1e-6);
  EXPECT_THROW(expected_error_multiplier_two_layer(m, 3, 0.5, 1.0), std::invalid_argument);
}

TEST(RecomputeRatio, Examples) {
  const WeibullFaults m(100, 0.7);
  const double c = std::ldexp(1.0, -12);
  const double part = expected_recompute_ratio(m, 3, 10, 12, c);
  const double full = expected_recompute_ratio_full(m, 3, 12, c);
  EXPECT_NEAR(part, 2.68e-3, 0.02 * 2.68e-3);
  EXPECT_NEAR(full, 4.23e-2, 0.02 * 4.23e-2);
  EXPECT_NEAR(full / part, 16.0, 0.5);
  EXPECT_DOUBLE_EQ(expected_recompute_ratio_from_time(m, 3, 10, 12, 0.25), part);
  EXPECT_EQ(expected_recompute_ratio(m, 3, 10, 12, 0.0), 0.0);
  EXPECT_LT(expected_recompute_ratio(WeibullFaults(1e12, 0.7), 3, 10, 12, c), 1e-6);
}

TEST(ExpectedRecomputations, Limits) {
  const WeibullFaults m(100, 0.7);
  EXPECT_EQ(expected_recomputations(m, 0.0), 0.0);
  const double s = std::pow(5.0 / 100.0, 0.7);
  EXPECT_NEAR(expected_recomputations(m, 5.0), std::exp(s) * (std::exp(s) - 1), 1e-12);
  EXPECT_LT(expected_recomputations(m, 1.0), expected_recomputations(m, 2.0));
}

}  // namespace
}  // namespace ftct
