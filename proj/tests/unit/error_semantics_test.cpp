#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mlmcq/error_semantics.hpp"
#include "mlmcq/errors.hpp"
#include "mlmcq/mc_engine.hpp"
#include "mlmcq/rng.hpp"

using namespace mlmcq;

TEST(BinomialTail, MatchesExactValues) {
  EXPECT_NEAR(binomial_upper_tail(15, 0.25, 8), 0.017299838364124298096, 1e-15);
  EXPECT_NEAR(binomial_upper_tail(13, 0.25, 7), 0.024290144443511962891, 1e-15);
  EXPECT_NEAR(binomial_upper_tail(11, 0.25, 6), 0.03432750701904296875, 1e-15);
  EXPECT_NEAR(binomial_upper_tail(10, 0.3, 0), 1.0, 1e-14);
  EXPECT_EQ(binomial_upper_tail(5, 0.3, 6), 0.0);
  EXPECT_THROW(binomial_upper_tail(5, 1.5, 1), InvalidArgument);
}

TEST(PoweringRepeats, SmallestOddCountMeetingTheTarget) {
  const unsigned k = powering_repeats(0.25, 0.01);
  EXPECT_EQ(k, 19u);
  EXPECT_LE(binomial_upper_tail(k, 0.25, (k + 1) / 2), 0.01);
  EXPECT_GT(binomial_upper_tail(k - 2, 0.25, (k - 1) / 2), 0.01);
  EXPECT_EQ(powering_repeats(0.0, 0.5), 1u);
  EXPECT_THROW(powering_repeats(0.5, 0.01), InvalidArgument);
  EXPECT_EQ(odd_at_least(14), 15u);
  EXPECT_EQ(odd_at_least(15), 15u);
}

TEST(MseToAdditive, TripleEpsilonAtNinetyNinePercent) {
  const auto g = mse_to_additive(0.05);
  EXPECT_EQ(g.kind, ErrorKind::Additive);
  EXPECT_DOUBLE_EQ(g.epsilon, 0.15);
  EXPECT_EQ(g.confidence, 0.99);
  EXPECT_EQ(g.repeats, 19u);
  EXPECT_EQ(describe(g), "additive 0.15 @ 0.99 (19 runs)");
  EXPECT_THROW(mse_to_additive(0.0), InvalidArgument);
}

TEST(MseToAdditive, DeterministicBiasedEstimator) {
  const double a = 2.0, eps = 0.1, bias = 0.07;
  const auto g = mse_to_additive(eps);
  const double y = boosted(g, [&](std::uint32_t) { return a + bias; });
  EXPECT_LE(std::abs(y - a), g.epsilon);
  EXPECT_DOUBLE_EQ(y, a + bias);
}

TEST(MseToAdditive, GaussianEstimatorQuantile) {
  const double a = 1.0, eps = 0.2;
  std::vector<double> errors;
  for (std::uint64_t t = 0; t < 10000; ++t) {
    const double m = median_boost([&](std::uint32_t r) { return a + eps * RngStream(t, {1, r, 0}).normal(); }, 15);
    errors.push_back(std::abs(m - a));
  }
  std::nth_element(errors.begin(), errors.begin() + 9900, errors.end());
  EXPECT_LE(errors[9900], 3 * eps);
}

TEST(AdditiveToMse, RepeatCountAndInflation) {
  const auto g = additive_to_mse(0.1);
  EXPECT_EQ(g.kind, ErrorKind::Mse);
  EXPECT_EQ(g.repeats, 14u);
  EXPECT_DOUBLE_EQ(g.epsilon, std::sqrt(2.0) * 0.1);
  EXPECT_EQ(additive_to_mse(0.1, 0.99, 8).repeats, 27u);
  EXPECT_THROW(additive_to_mse(1.5), InvalidArgument);
  EXPECT_THROW(additive_to_mse(0.1, 0.4), InvalidArgument);
  EXPECT_THROW(additive_to_mse(0.1, 0.99, 0.0), InvalidArgument);
}

namespace {

double boosted_mse(const ErrorGuarantee& g, double eps, double outlier_probability) {
  double sum = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const double y = boosted(g, [&](std::uint32_t r) {
      RngStream s(static_cast<std::uint64_t>(t), {2, r, 0});
      const double u = s.uniform();
      const double v = 2 * s.uniform() - 1;
      // Bounded outliers of size 50 eps on either side.
      if (u < outlier_probability) return (v < 0 ? -50.0 : 50.0) * eps;
      return eps * v;
    });
    sum += y * y;
  }
  return sum / trials;
}

}  // namespace

TEST(AdditiveToMse, HeavyButBoundedEstimator) {
  const double eps = 0.1;
  const auto g = additive_to_mse(eps);
  EXPECT_LE(boosted_mse(g, eps, 0.01), 2 * eps * eps);
}

TEST(AdditiveToMse, ZeroFailureEstimator) {
  const double eps = 0.1;
  const auto g = additive_to_mse(eps);
  EXPECT_LE(boosted_mse(g, eps, 0.0), eps * eps);
}

TEST(RoundTrip, InflationIsBoundedByConstants) {
  for (double eps : {0.2, 0.01, 1e-4, 1e-8}) {
    const auto add = mse_to_additive(eps);
    const auto back = additive_to_mse(add.epsilon);
    EXPECT_DOUBLE_EQ(add.epsilon / eps, 3.0);
    EXPECT_DOUBLE_EQ(back.epsilon / add.epsilon, std::sqrt(2.0));
    EXPECT_LE(back.epsilon, 3 * std::sqrt(2.0) * eps * (1 + 1e-15));
  }
}

TEST(ErrorKind, Parsing) {
  EXPECT_EQ(parse_error_kind("mse"), ErrorKind::Mse);
  EXPECT_EQ(parse_error_kind("additive"), ErrorKind::Additive);
  EXPECT_EQ(error_kind_name(ErrorKind::Additive), "additive");
  EXPECT_THROW(parse_error_kind("rmse"), InvalidArgument);
  EXPECT_EQ(describe(additive_to_mse(0.1)), "mse 0.141421^2 (14 runs)");
}

TEST(Boosting, FailureDecreasesWithRepeatCount) {
  // Quarter-failure estimator with every failure on the same side, the worst case.
  const int trials = 20000;
  double previous = 1.0, previous_exact = 1.0;
  for (unsigned k = 1; k <= 15; k += 2) {
    int failures = 0;
    for (int t = 0; t < trials; ++t) {
      const double m = median_boost(
          [&](std::uint32_t r) { return RngStream(static_cast<std::uint64_t>(t), {3, r, 0}).uniform() < 0.25 ? 1.0 : 0.0; },
          k);
      if (m > 0.5) ++failures;
    }
    const double rate = static_cast<double>(failures) / trials;
    const double exact = binomial_upper_tail(k, 0.25, (k + 1) / 2);
    EXPECT_LT(rate, previous) << k;
    EXPECT_LT(exact, previous_exact) << k;
    EXPECT_NEAR(rate, exact, 4 * std::sqrt(exact * (1 - exact) / trials) + 1e-9) << k;
    previous = rate;
    previous_exact = exact;
  }
}
