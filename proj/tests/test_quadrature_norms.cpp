#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "dampex/quadrature_norms.hpp"

using namespace dampex;

namespace {

const double pi = std::numbers::pi;

auto gaussian_symbol(double t = 1.0) {
  return [t](std::span<const double> xi) { return Complex(std::exp(-t * squared_norm(xi)), 0.0); };
}

InitialDatum anisotropic_2d() {
  const double c[] = {1.0, 1.0};
  const double d[] = {1.0, 0.5};
  return InitialDatum::gaussian(2, 2.0).dilated(d).translated(c);
}

}  // namespace

TEST(RegionNorm, FullSpaceGaussian) {
  for (int n = 1; n <= 3; ++n) {
    const auto r = region_l2_norm(gaussian_symbol(), FrequencyRegion::full(n));
    EXPECT_NEAR(r.value, std::pow(pi / 2, 0.25 * n), 1e-12) << n;
    EXPECT_GT(r.evaluations, 0u);
  }
}

TEST(RegionNorm, BallMatchesErf) {
  // int_{-R}^{R} e^{-2x^2} = sqrt(pi/2) erf(sqrt(2) R)
  for (double R : {0.5, 1.0, 3.0}) {
    const auto r = region_l2_norm(gaussian_symbol(), FrequencyRegion::ball(1, R));
    EXPECT_NEAR(r.value, std::sqrt(std::sqrt(pi / 2) * std::erf(std::sqrt(2.0) * R)), 1e-12);
  }
  // n = 2: pi/2 (1 - e^{-2R^2})
  const auto r2 = region_l2_norm(gaussian_symbol(), FrequencyRegion::ball(2, 0.5));
  EXPECT_NEAR(r2.value, std::sqrt(pi / 2 * (1 - std::exp(-0.5))), 1e-12);
}

TEST(RegionNorm, PiecesAddUp) {
  auto f = [](std::span<const double> xi) { return Complex(xi[0], xi[1]) * std::exp(-squared_norm(xi)); };
  const double ball = std::pow(region_l2_norm(f, FrequencyRegion::ball(2, 0.7)).value, 2);
  const double ann = std::pow(region_l2_norm(f, FrequencyRegion::annulus(2, 0.7, 3.0)).value, 2);
  const double ext = std::pow(region_l2_norm(f, FrequencyRegion::exterior(2, 3.0)).value, 2);
  const double full = std::pow(region_l2_norm(f, FrequencyRegion::full(2)).value, 2);
  EXPECT_NEAR(ball + ann + ext, full, 1e-11 * full);
}

TEST(RegionNorm, ScalingIdentity) {
  // ||B_k e^{-t|xi|^2}||_2 = t^{-n/4-k/2} ||B_k e^{-|xi|^2}||_2 by homogeneity.
  const auto table = MomentTable::from_datum(anisotropic_2d(), 3);
  for (int k : {0, 1, 2, 3}) {
    const auto b = build(ExpansionKind::B, k, table);
    const double base = polynomial_gaussian_norm(b, FrequencyRegion::full(2)).value;
    for (double t : {1.0, 4.0, 16.0}) {
      const double scaled =
          region_l2_norm([&](std::span<const double> xi) { return b(xi) * std::exp(-t * squared_norm(xi)); },
                         FrequencyRegion::full(2))
              .value;
      EXPECT_NEAR(scaled, std::pow(t, -0.5 - 0.5 * k) * base, 1e-9 * base) << k << " " << t;
    }
  }
}

TEST(RegionNorm, OddCrossTermsCancelOnTheSphereRules) {
  for (int n = 2; n <= 3; ++n) {
    const auto rule = direction_rule_for(n, NormOptions{});
    for (const auto& beta : indices_up_to(n, 7)) {
      if (beta.all_even()) continue;
      double s = 0.0;
      for (std::size_t w = 0; w < rule.weights.size(); ++w)
        s += rule.weights[w] * monomial(beta, std::span<const double>(rule.directions[w].data(), n));
      EXPECT_LE(std::abs(s), 1e-14) << beta.to_string();
    }
  }
}

TEST(RegionNorm, ParseAndFormat) {
  EXPECT_EQ(FrequencyRegion::parse(2, "ball:0.5").to_string(), "ball:0.5");
  EXPECT_EQ(FrequencyRegion::parse(3, "annulus:0.5,2").to_string(), "annulus:0.5,2");
  EXPECT_EQ(FrequencyRegion::parse(1, "ext:2").kind, FrequencyRegion::Kind::Exterior);
  EXPECT_EQ(FrequencyRegion::parse(1, "full").to_string(), "full");
  for (const char* bad : {"ball", "ball:x", "annulus:1", "annulus:2,1", "ext:0", "sphere:1", "ball:-1"})
    EXPECT_THROW(FrequencyRegion::parse(2, bad), ConfigError) << bad;
}

TEST(RegionNorm, UnreachableToleranceThrows) {
  NormOptions o;
  o.max_subdivisions = 2;
  o.geometric_levels = 0;
  o.radial_breakpoints.clear();
  auto wild = [](std::span<const double> xi) { return Complex(std::sin(400 * xi[0]), 0.0); };
  EXPECT_THROW(region_l2_norm(wild, FrequencyRegion::ball(1, 5.0), o), QuadratureError);
}

TEST(ClosedForms, GaussianMonomialIntegrals) {
  // n = 1, int x^2 e^{-2x^2} = sqrt(pi/2) / 4
  EXPECT_NEAR(full_gaussian_monomial(MultiIndex{1}), std::sqrt(pi / 2) / 4, 1e-15);
  EXPECT_NEAR(sphere_even_monomial(MultiIndex{0, 0, 0}), 4 * pi, 1e-13);
  EXPECT_NEAR(sphere_even_monomial(MultiIndex{0, 0}), 2 * pi, 1e-14);
  for (const auto& beta : {MultiIndex{2, 1}, MultiIndex{1, 0, 2}}) {
    const double big = ball_gaussian_monomial(beta, 40.0);
    EXPECT_NEAR(big, full_gaussian_monomial(beta), 1e-14);
    const auto q = region_l2_norm(
        [&](std::span<const double> xi) { return Complex(monomial(beta, xi) * std::exp(-squared_norm(xi)), 0.0); },
        FrequencyRegion::ball(beta.dimension(), 0.5));
    EXPECT_NEAR(q.value * q.value, ball_gaussian_monomial(beta, 0.5), 1e-11 * ball_gaussian_monomial(beta, 0.5));
  }
  EXPECT_NEAR(radial_gaussian_moment(0, std::numeric_limits<double>::infinity()), std::sqrt(pi / 2) / 2, 1e-15);
}

TEST(LowerBounds, RadialFactorOracle) {
  EXPECT_NEAR(prop1_radial_factor(0), std::sqrt(std::sqrt(pi / 2) * std::erf(1 / std::sqrt(2.0))), 1e-15);
  const auto t = MomentTable::from_datum(InitialDatum::gaussian(1, 4.0), 0);
  EXPECT_NEAR(prop1_constant(0, t), 2 * std::sqrt(pi) * prop1_radial_factor(0), 1e-14);
  EXPECT_NEAR(prop1_constant(0, t), 3.2790384589, 1e-9);
}

TEST(LowerBounds, Prop1MatchesQuadrature) {
  const double c = 0.5;
  const auto v = InitialDatum::gaussian(1, 4.0).translated(std::span<const double>(&c, 1)) +
                 InitialDatum::box(1, 1.0, 0.5);
  const auto t = MomentTable::from_datum(v, 6);
  NormOptions o;
  o.tolerance = 1e-13;
  for (int k = 0; k <= 6; ++k) {
    const double closed = prop1_constant(k, t);
    const double q = polynomial_gaussian_norm(build(ExpansionKind::B, k, t), FrequencyRegion::ball(1, 0.5), o).value;
    EXPECT_NEAR(closed, q, 1e-10 * closed) << k;
  }
  EXPECT_THROW(prop1_constant(7, t), InsufficientOrderError);
  EXPECT_THROW(prop1_constant(0, MomentTable::from_datum(anisotropic_2d(), 1)), UnsupportedError);
}

TEST(LowerBounds, Prop2MatchesQuadrature) {
  NormOptions o;
  o.tolerance = 1e-13;
  const double c3[] = {0.5, 0.0, -0.3};
  for (const auto& v : {anisotropic_2d(), InitialDatum::gaussian(3, 2.0).translated(c3) +
                                              InitialDatum::gaussian_monomial(3, 1.0, MultiIndex{1, 1, 0})}) {
    const auto t = MomentTable::from_datum(v, 2);
    for (int k = 0; k <= 2; ++k) {
      const double closed = prop2_norm(k, t);
      const double q =
          polynomial_gaussian_norm(build(ExpansionKind::B, k, t), FrequencyRegion::ball(v.dimension(), 0.5), o)
              .value;
      EXPECT_NEAR(closed, q, 1e-9 * closed) << v.dimension() << " " << k;
    }
  }
  EXPECT_THROW(prop2_norm(3, MomentTable::from_datum(anisotropic_2d(), 3)), UnsupportedError);
}

TEST(LowerBounds, Prop2CrossTermOnly) {
  // V_j = M0 - M_{2e_j} = 0, so only W_12 survives: B_2 = -w xi_1 xi_2.
  const double w = 0.3;
  const auto t = MomentTable::from_normalized(2, 2, {{MultiIndex{0, 0}, 1.0}, {MultiIndex{2, 0}, 1.0},
                                                     {MultiIndex{0, 2}, 1.0}, {MultiIndex{1, 1}, w}});
  const auto c = lower_bound_constants(t);
  EXPECT_EQ(c.v[0], 0.0);
  EXPECT_EQ(c.v[1], 0.0);
  EXPECT_DOUBLE_EQ(c.w[0][1], w);
  EXPECT_NEAR(prop2_norm(2, t), std::sqrt(c.c12) * w, 1e-16);
}

TEST(LowerBounds, GaussianSecondOrderVanishes) {
  for (int n = 1; n <= 3; ++n) {
    const auto t = MomentTable::from_datum(InitialDatum::gaussian(n, 4.0), 2);
    EXPECT_EQ(lower_bound_constant(t, 2), 0.0) << n;
    EXPECT_GT(prop62_norm(2, t), 0.0) << n;
  }
}

TEST(LowerBounds, Prop62) {
  for (int n = 1; n <= 3; ++n) {
    const auto t = MomentTable::from_datum(InitialDatum::gaussian(n, 4.0), 0);
    const double m0 = std::pow(4 * pi, 0.5 * n);
    EXPECT_NEAR(prop62_norm(0, t), m0 * std::pow(pi / 2, 0.25 * n), 1e-12 * m0);
  }
  const auto t = MomentTable::from_datum(anisotropic_2d(), 4);
  for (int k = 0; k <= 4; ++k) {
    const double closed = prop62_norm(k, t);
    const double q = polynomial_gaussian_norm(build(ExpansionKind::C, k, t), FrequencyRegion::full(2)).value;
    EXPECT_NEAR(closed, q, 1e-9 * closed) << k;
    EXPECT_NEAR(closed, canonical_gaussian_norm(build(ExpansionKind::C, k, t).canonical(),
                                                std::numeric_limits<double>::infinity()),
                1e-12 * closed);
  }
}

TEST(LowerBounds, QuadratureFallbackAboveOrderTwo) {
  const auto t = MomentTable::from_datum(anisotropic_2d(), 3);
  const double q = lower_bound_constant(t, 3);
  EXPECT_NEAR(q, canonical_gaussian_norm(build(ExpansionKind::B, 3, t).canonical(), 0.5), 1e-9 * q);
}

TEST(Residuals, HeatResidualOfGaussian) {
  // k = 0: ||e^{-t|xi|^2} (4 pi)^{n/2} e^{-|xi|^2}|| = (4 pi)^{n/2} (pi / (2 (t + 1)))^{n/4}
  for (int n = 1; n <= 3; ++n) {
    const auto v = InitialDatum::gaussian(n, 4.0);
    for (double t : {1.0, 30.0}) {
      const double exact = std::pow(4 * pi, 0.5 * n) * std::pow(pi / (2 * (t + 1)), 0.25 * n);
      EXPECT_NEAR(heat_residual_norm(v, t, 0, FrequencyRegion::full(n)).value, exact, 1e-10 * exact);
    }
  }
}

TEST(Residuals, DampedResidualIsSmallerAtHigherOrder) {
  const SpectralSolution sol(anisotropic_2d(), InitialDatum::zero(2));
  NormOptions o;
  o.tolerance = 1e-8;
  const double r0 = residual_norm(sol, 100.0, 0, FrequencyRegion::full(2), o).value;
  const double r1 = residual_norm(sol, 100.0, 1, FrequencyRegion::full(2), o).value;
  const double r2 = residual_norm(sol, 100.0, 2, FrequencyRegion::full(2), o).value;
  EXPECT_GT(r0, r1);
  EXPECT_GT(r1, r2);
  EXPECT_THROW(residual_norm(sol, 0.0, 0, FrequencyRegion::full(2)), Error);
}

TEST(Remainders, AbsoluteMomentAndSupRatios) {
  const auto g = InitialDatum::gaussian(1, 4.0);
  EXPECT_NEAR(absolute_moment(g, 1.0), 4.0, 1e-10);
  for (double gamma : {0.0, 1.0, 2.0, 2.5, 3.0}) {
    const auto r = taylor_remainder_sup_ratio(g, gamma);
    EXPECT_TRUE(r.passed) << gamma;
    EXPECT_LE(r.sup_fine, 2.0) << gamma;
  }
  for (double k : {0.0, 1.0, 2.0, 2.5, 3.0}) EXPECT_TRUE(symbol_remainder_sup_ratio(g, k).passed) << k;
  EXPECT_EQ(absolute_moment(InitialDatum::zero(2), 1.0), 0.0);
}
