#include <cmath>

#include <gtest/gtest.h>

#include "mlmcq/errors.hpp"
#include "mlmcq/payoffs.hpp"
#include "mlmcq/rng.hpp"

using namespace mlmcq;

TEST(Payoff, Examples) {
  EXPECT_EQ(european(100).evaluate(110.0), 10.0);
  EXPECT_EQ(european(100).evaluate(90.0), 0.0);
  EXPECT_EQ(digital(100).evaluate(100.0), 1.0);
  EXPECT_EQ(digital(100).evaluate(99.999), 0.0);
  EXPECT_EQ(digital_appendix(100).evaluate(100.0), 10.0);
  EXPECT_EQ(digital_appendix(100).evaluate(50.0), 5.0);
  const auto pc = piecewise_constant({90, 110}, {0, 1, 2});
  EXPECT_EQ(pc.evaluate(95.0), 1.0);
  EXPECT_EQ(pc.evaluate(89.0), 0.0);
  EXPECT_EQ(pc.evaluate(90.0), 1.0);
  EXPECT_EQ(pc.evaluate(110.0), 2.0);
}

TEST(Payoff, AsianReadsTheTimeAverage) {
  const auto a = asian(100);
  EXPECT_TRUE(a.needs_time_average());
  EXPECT_EQ(a.evaluate(PathValues{50.0, 104.0, {}}), 4.0);
  EXPECT_THROW(a.evaluate(120.0), InvalidArgument);
}

TEST(Payoff, CustomPayoffFlags) {
  const auto c = custom([](const PathValues& p) { return *p.stoch_integral; }, Smoothness::GloballyLipschitz, false,
                        true);
  EXPECT_TRUE(c.needs_stoch_integral());
  EXPECT_EQ(c.evaluate(PathValues{1.0, {}, 2.5}), 2.5);
  EXPECT_THROW(c.evaluate(1.0), InvalidArgument);
  EXPECT_EQ(c.name(), "custom");
}

TEST(Payoff, SmoothnessTags) {
  EXPECT_EQ(european(1).smoothness(), Smoothness::GloballyLipschitz);
  EXPECT_EQ(asian(1).smoothness(), Smoothness::GloballyLipschitz);
  EXPECT_EQ(digital(1).smoothness(), Smoothness::PiecewiseConstant);
  EXPECT_EQ(digital_appendix(1).smoothness(), Smoothness::PiecewiseConstant);
  EXPECT_EQ(smoothness_name(Smoothness::PiecewiseLipschitz), "piecewise-lipschitz");
}

TEST(Payoff, Validation) {
  EXPECT_THROW(european(0.0), InvalidArgument);
  EXPECT_THROW(digital(-1.0), InvalidArgument);
  EXPECT_THROW(piecewise_constant({}, {1.0}), InvalidArgument);
  EXPECT_THROW(piecewise_constant({1.0, 2.0}, {0.0, 1.0}), InvalidArgument);
  EXPECT_THROW(piecewise_constant({2.0, 1.0}, {0.0, 1.0, 2.0}), InvalidArgument);
  EXPECT_THROW(piecewise_constant({1.0, 1.0}, {0.0, 1.0, 2.0}), InvalidArgument);
  EXPECT_THROW(make_payoff("barrier", 100), InvalidArgument);
  EXPECT_EQ(make_payoff("digital-appendix", 100).name(), "digital-appendix");
  EXPECT_EQ(make_payoff("piecewise-constant", 100, {1.0}, {0.0, 3.0}).evaluate(2.0), 3.0);
}

TEST(Payoff, LipschitzInThePriceArgument) {
  RngStream s(12, {});
  const auto e = european(100);
  const auto a = asian(100);
  for (int i = 0; i < 10000; ++i) {
    const double x = 200 * s.uniform();
    const double y = 200 * s.uniform();
    EXPECT_LE(std::abs(e.evaluate(x) - e.evaluate(y)), std::abs(x - y));
    EXPECT_LE(std::abs(a.evaluate(PathValues{0.0, x, {}}) - a.evaluate(PathValues{0.0, y, {}})), std::abs(x - y));
  }
}

TEST(Payoff, TwoValuedPayoffsTakeOnlyListedValues) {
  RngStream s(13, {});
  const auto pc = piecewise_constant({80, 95, 120}, {7, -1, 3, 0.5});
  for (int i = 0; i < 10000; ++i) {
    const double x = 200 * s.uniform();
    const double d = digital(100).evaluate(x);
    EXPECT_TRUE(d == 0.0 || d == 1.0);
    const double v = pc.evaluate(x);
    EXPECT_TRUE(v == 7 || v == -1 || v == 3 || v == 0.5);
  }
}

TEST(Payoff, DiscountedValueIsMonotoneInTerminal) {
  for (const auto& p : {european(100), digital(100), digital_appendix(100)}) {
    double previous = -1.0;
    for (double x = 50; x <= 150; x += 0.25) {
      const double v = discount(p.evaluate(x), 0.05, 1.0);
      EXPECT_GE(v, previous);
      previous = v;
    }
  }
}

TEST(Discount, Examples) {
  EXPECT_EQ(discount(3.5, 0.0, 2.0), 3.5);
  EXPECT_NEAR(discount(1.0, 0.05, 1.0), 0.951229424500714, 1e-15);
  EXPECT_NEAR(discount(digital_appendix(100).evaluate(120.0), 0.05, 1.0), 9.5122942450071400909, 1e-13);
  EXPECT_THROW(discount(1.0, 0.05, -1.0), InvalidArgument);
}

TEST(PiecewiseTables, DigitalsConvertToTables) {
  const auto d = as_piecewise_constant(digital(100));
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(d->breaks, std::vector<double>{100});
  EXPECT_EQ(d->values, (std::vector<double>{0, 1}));
  const auto a = as_piecewise_constant(digital_appendix(90));
  ASSERT_TRUE(a.has_value());
  EXPECT_EQ(a->values, (std::vector<double>{5, 10}));
  EXPECT_FALSE(as_piecewise_constant(european(100)).has_value());
  for (double x : {50.0, 89.99, 90.0, 200.0})
    EXPECT_EQ(lookup(*a, x), digital_appendix(90).evaluate(x));
}
