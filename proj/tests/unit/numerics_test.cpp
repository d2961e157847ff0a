#include <gtest/gtest.h>

#include <cmath>

#include "immunokinetics/errors.hpp"
#include "immunokinetics/numerics.hpp"

using namespace immunokinetics;

TEST(AdaptiveSimpson, PolynomialIsExact) {
  const double v = adaptive_simpson([](double x) { return 3 * x * x + 1; }, 0.0, 2.0);
  EXPECT_NEAR(v, 10.0, 1e-12);
}

TEST(AdaptiveSimpson, ReversedLimitsFlipSign) {
  const double v = adaptive_simpson([](double x) { return std::exp(x); }, 1.0, 0.0);
  EXPECT_NEAR(v, -(std::exp(1.0) - 1.0), 1e-12);
}

TEST(AdaptiveSimpson, StepAtEndpointConverges) {
  const auto f = [](double x) { return x > 0.0 ? 1.0 : 0.0; };
  EXPECT_NEAR(adaptive_simpson(f, 0.0, 3.0, 1e-12), 3.0, 1e-10);
}

TEST(AdaptiveSimpson, NonFiniteThrows) {
  EXPECT_THROW(adaptive_simpson([](double) { return NAN; }, 0.0, 1.0), QuadratureError);
}

TEST(Bisect, FindsSqrtTwo) {
  const double r = bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-14);
  EXPECT_NEAR(r, std::sqrt(2.0), 1e-13);
}

TEST(Bisect, UnbracketedThrows) {
  EXPECT_THROW(bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12), DomainError);
}

TEST(PiecewiseCubic, HermiteReproducesCubic) {
  auto f = [](double x) { return x * x * x - 2 * x; };
  auto df = [](double x) { return 3 * x * x - 2; };
  std::vector<double> x{0.0, 0.5, 1.7, 3.0}, y, m;
  for (double v : x) {
    y.push_back(f(v));
    m.push_back(df(v));
  }
  const auto c = PiecewiseCubic::hermite(x, y, m);
  for (double t : {0.1, 0.9, 2.2, 2.99}) {
    EXPECT_NEAR(c(t), f(t), 1e-12);
    EXPECT_NEAR(c.derivative(t), df(t), 1e-12);
  }
}

TEST(PiecewiseCubic, MonotoneDataStaysMonotone) {
  const auto c = PiecewiseCubic::monotone({0, 1, 2, 3, 4}, {0, 0.1, 5, 5.1, 5.2});
  double prev = c(0.0);
  for (int k = 1; k <= 400; ++k) {
    const double v = c(k * 0.01);
    EXPECT_GE(v, prev - 1e-15);
    prev = v;
  }
}

TEST(PiecewiseCubic, OutOfRangeThrows) {
  const auto c = PiecewiseCubic::smooth({0, 1, 2}, {0, 1, 4});
  EXPECT_THROW(c(2.5), DomainError);
  EXPECT_NO_THROW(c(2.0));
}
