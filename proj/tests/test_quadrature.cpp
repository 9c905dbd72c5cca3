#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dampex/quadrature.hpp"

namespace quad = dampex::quad;

TEST(Quadrature, PolynomialIsExactOnOnePanel) {
  const auto r = quad::integrate([](double x) { return 3 * x * x - x + 1; }, 0.0, 2.0);
  EXPECT_NEAR(r.value, 8.0 - 2.0 + 2.0, 1e-14);
  EXPECT_TRUE(r.converged);
}

TEST(Quadrature, GaussianIntegral) {
  const auto r = quad::integrate([](double x) { return std::exp(-x * x); }, -10.0, 10.0);
  EXPECT_NEAR(r.value, std::sqrt(std::numbers::pi), 1e-13);
}

TEST(Quadrature, EndpointSingularity) {
  quad::AdaptiveOptions opt;
  opt.relative_tolerance = 1e-10;
  const auto r = quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, opt);
  EXPECT_NEAR(r.value, 2.0, 1e-8);
}

TEST(Quadrature, ExactlyZeroIntegrandConverges) {
  const auto r = quad::integrate([](double x) { return std::sin(x) * std::exp(-x * x); }, -3.0, 3.0);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(std::abs(r.value), 1e-15);
}

TEST(Quadrature, BudgetExhaustionThrowsWithDiagnostics) {
  quad::AdaptiveOptions opt;
  opt.max_subdivisions = 3;
  opt.relative_tolerance = 1e-14;
  try {
    quad::integrate([](double x) { return std::sin(200 * x) * std::sin(200 * x); }, 0.0, 10.0, opt);
    FAIL() << "expected QuadratureError";
  } catch (const dampex::QuadratureError& e) {
    EXPECT_GT(e.achieved_error(), 0.0);
  }
  opt.throw_on_failure = false;
  const auto r =
      quad::integrate([](double x) { return std::sin(200 * x) * std::sin(200 * x); }, 0.0, 10.0, opt);
  EXPECT_FALSE(r.converged);
}

TEST(Quadrature, BoxIntegralOfSeparableGaussian) {
  std::array<std::vector<double>, 3> cuts{std::vector<double>{-9, 0, 9}, {-9, 0, 9}, {-9, 0, 9}};
  const auto r = quad::integrate_box(
      [](std::span<const double> x) { return std::exp(-x[0] * x[0] - 2 * x[1] * x[1] - 0.5 * x[2] * x[2]); }, 3,
      cuts);
  const double pi = std::numbers::pi;
  EXPECT_NEAR(r.value / (std::sqrt(pi) * std::sqrt(pi / 2) * std::sqrt(2 * pi)), 1.0, 1e-10);
}

TEST(Quadrature, GaussLegendreIntegratesDegree2nMinus1) {
  const auto gl = quad::gauss_legendre(8);
  double s = 0, w = 0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    s += gl.weights[i] * std::pow(gl.nodes[i], 14);
    w += gl.weights[i];
  }
  EXPECT_NEAR(w, 2.0, 1e-14);
  EXPECT_NEAR(s, 2.0 / 15.0, 1e-14);
}

TEST(Quadrature, DirectionRulesHaveSphereArea) {
  const double pi = std::numbers::pi;
  const double area[] = {2.0, 2 * pi, 4 * pi};
  for (int n = 1; n <= 3; ++n) {
    const auto rule = quad::direction_rule(n);
    double s = 0;
    for (double w : rule.weights) s += w;
    EXPECT_NEAR(s, area[n - 1], 1e-13) << "n = " << n;
  }
  // int_{S^2} z^4 = 4 pi / 5 and int_{S^2} x^2 y^2 = 4 pi / 15
  const auto rule = quad::direction_rule(3);
  double z4 = 0, x2y2 = 0;
  for (std::size_t i = 0; i < rule.weights.size(); ++i) {
    const auto& d = rule.directions[i];
    z4 += rule.weights[i] * std::pow(d[2], 4);
    x2y2 += rule.weights[i] * d[0] * d[0] * d[1] * d[1];
  }
  EXPECT_NEAR(z4, 4 * pi / 5, 1e-13);
  EXPECT_NEAR(x2y2, 4 * pi / 15, 1e-13);
}

TEST(Quadrature, CompensatedSumRecoversSmallTerms) {
  quad::CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-17);
  s.add(-1.0);
  EXPECT_NEAR(s.value(), 1e-14, 1e-20);
}
