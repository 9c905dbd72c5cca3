#pragma once

// L^2 norms over frequency regions by radial adaptive quadrature times a
// fixed direction rule, and the closed-form lower-bound constants they are
// checked against.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "dampex/error.hpp"
#include "dampex/expansion.hpp"
#include "dampex/initial_data.hpp"
#include "dampex/quadrature.hpp"
#include "dampex/spectral_solution.hpp"

namespace dampex {

struct FrequencyRegion {
  enum class Kind { Ball, Annulus, Exterior, Full };

  Kind kind = Kind::Full;
  double inner = 0.0;
  double outer = std::numeric_limits<double>::infinity();
  int dimension = 1;

  static FrequencyRegion ball(int n, double r) { return make(Kind::Ball, n, 0.0, r); }
  static FrequencyRegion annulus(int n, double a, double b) { return make(Kind::Annulus, n, a, b); }
  static FrequencyRegion exterior(int n, double r) {
    return make(Kind::Exterior, n, r, std::numeric_limits<double>::infinity());
  }
  static FrequencyRegion full(int n) {
    return make(Kind::Full, n, 0.0, std::numeric_limits<double>::infinity());
  }

  /// ball:r | annulus:a,b | ext:r | full
  static FrequencyRegion parse(int n, const std::string& spec) {
    try {
      if (spec == "full") return full(n);
      const auto colon = spec.find(':');
      if (colon == std::string::npos) throw ConfigError("");
      const std::string head = spec.substr(0, colon);
      const std::string tail = spec.substr(colon + 1);
      if (head == "ball") return ball(n, std::stod(tail));
      if (head == "ext") return exterior(n, std::stod(tail));
      if (head == "annulus") {
        const auto comma = tail.find(',');
        if (comma == std::string::npos) throw ConfigError("");
        return annulus(n, std::stod(tail.substr(0, comma)), std::stod(tail.substr(comma + 1)));
      }
    } catch (const std::invalid_argument&) {
    } catch (const ConfigError&) {
    }
    throw ConfigError("bad region '" + spec + "' (expected ball:r|annulus:a,b|ext:r|full)");
  }

  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
      case Kind::Ball: os << "ball:" << outer; break;
      case Kind::Annulus: os << "annulus:" << inner << "," << outer; break;
      case Kind::Exterior: os << "ext:" << inner; break;
      case Kind::Full: os << "full"; break;
    }
    return os.str();
  }

 private:
  static FrequencyRegion make(Kind kind, int n, double a, double b) {
    if (n < 1 || n > kMaxDimension) throw ConfigError("region dimension must be in 1..3");
    if (!(a >= 0.0) || !(b > a)) throw ConfigError("region radii must satisfy 0 <= inner < outer");
    if (kind == Kind::Annulus && !(a > 0.0)) throw ConfigError("annulus inner radius must be positive");
    if (kind == Kind::Exterior && !(a > 0.0)) throw ConfigError("exterior radius must be positive");
    return FrequencyRegion{kind, a, b, n};
  }
};

struct RegionNorm {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  FrequencyRegion region;
};

struct NormOptions {
  /// Relative tolerance on the squared norm.
  double tolerance = 1e-10;
  /// Trapezoid nodes on the circle (n = 2) and in the azimuth (n = 3).
  int circle_points = 64;
  int sphere_azimuth_points = 32;
  /// Gauss-Legendre nodes in cos(theta) (n = 3).
  int sphere_polar_points = 16;
  /// Balls are cut at r 2^{-j}, j = 0..levels, to resolve integrands
  /// concentrated near the origin.
  int geometric_levels = 30;
  /// Full-space norms are ball(split_radius) plus exterior(split_radius).
  double split_radius = 2.0;
  /// Extra radial cut points (used where they fall inside a region).
  std::vector<double> radial_breakpoints{0.5, 1.0};
  /// Exterior doubling stops once a shell contributes less than this
  /// fraction of the running total.
  double truncation = 1e-18;
  double exterior_limit = 1e12;
  std::size_t max_subdivisions = 4000;
  std::size_t exterior_subdivisions = 64;
  /// When false, exterior shells only contribute to error_estimate and never
  /// make the norm throw.
  bool strict_exterior = false;
};

namespace detail {

template <class F>
struct RadialIntegrand {
  const F& f;
  const quad::DirectionRule& rule;
  int n;
  std::size_t* evaluations;

  double operator()(double r) const {
    double sum = 0.0;
    std::array<double, 3> xi{};
    for (std::size_t w = 0; w < rule.weights.size(); ++w) {
      for (int j = 0; j < n; ++j) xi[j] = r * rule.directions[w][j];
      sum += rule.weights[w] * std::norm(static_cast<Complex>(f(std::span<const double>(xi.data(), n))));
    }
    *evaluations += rule.weights.size();
    double jac = 1.0;
    for (int j = 1; j < n; ++j) jac *= r;
    return jac * sum;
  }
};

inline std::vector<double> radial_cuts(double a, double b, const NormOptions& opt) {
  std::vector<double> cuts{a, b};
  if (a == 0.0) {
    double x = b;
    for (int j = 0; j < opt.geometric_levels; ++j) {
      x *= 0.5;
      cuts.push_back(x);
    }
  }
  for (double c : opt.radial_breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

}  // namespace detail

inline quad::DirectionRule direction_rule_for(int n, const NormOptions& opt) {
  return quad::direction_rule(n, n == 2 ? opt.circle_points : opt.sphere_azimuth_points,
                              opt.sphere_polar_points);
}

/// (int_region |f(xi)|^2 dxi)^{1/2}. Throws QuadratureError when the radial
/// rule cannot reach `options.tolerance` within its subdivision budget.
template <class F>
RegionNorm region_l2_norm(const F& f, const FrequencyRegion& region, const NormOptions& options = {}) {
  if (!(options.tolerance > 0.0)) throw Error("region_l2_norm: tolerance must be positive");
  const int n = region.dimension;
  const quad::DirectionRule rule = direction_rule_for(n, options);
  std::size_t evaluations = 0;
  detail::RadialIntegrand<F> g{f, rule, n, &evaluations};

  quad::AdaptiveOptions adaptive;
  adaptive.relative_tolerance = options.tolerance;
  adaptive.max_subdivisions = options.max_subdivisions;

  double total = 0.0, error = 0.0, exterior_error = 0.0;
  auto bounded = [&](double a, double b) {
    const auto cuts = detail::radial_cuts(a, b, options);
    const auto r = quad::integrate(g, std::span<const double>(cuts), adaptive);
    total += r.value;
    error += r.error;
  };
  auto unbounded = [&](double a) {
    // Doubling shells with a capped budget each; the remainder beyond the
    // last shell is estimated by the last shell's contribution.
    quad::AdaptiveOptions shell = adaptive;
    shell.throw_on_failure = false;
    shell.max_subdivisions = options.exterior_subdivisions;
    double lo = a, last = 0.0;
    bool truncated = false;
    while (lo < options.exterior_limit) {
      shell.absolute_tolerance = options.tolerance * std::max(total, 0.0);
      const auto r = quad::integrate(g, lo, 2.0 * lo, shell);
      total += r.value;
      exterior_error += r.error;
      last = std::abs(r.value);
      lo *= 2.0;
      if (last <= options.truncation * std::abs(total)) {
        truncated = true;
        break;
      }
    }
    if (!truncated) exterior_error += last;
  };

  switch (region.kind) {
    case FrequencyRegion::Kind::Ball:
    case FrequencyRegion::Kind::Annulus:
      bounded(region.inner, region.outer);
      break;
    case FrequencyRegion::Kind::Exterior:
      unbounded(region.inner);
      break;
    case FrequencyRegion::Kind::Full:
      bounded(0.0, options.split_radius);
      unbounded(options.split_radius);
      break;
  }
  if (options.strict_exterior) error += exterior_error;
  if (error > options.tolerance * std::abs(total) && error > 1e-300) {
    std::ostringstream os;
    os.precision(3);
    os << "region_l2_norm on " << region.to_string() << " missed tolerance " << options.tolerance
       << " (relative error estimate " << error / std::max(std::abs(total), 1e-300) << ")";
    throw QuadratureError(os.str(), error, total);
  }
  RegionNorm out;
  out.region = region;
  out.evaluations = evaluations;
  out.value = std::sqrt(std::max(total, 0.0));
  if (!options.strict_exterior) error += exterior_error;
  out.error_estimate = out.value > 0.0 ? error / (2.0 * out.value) : std::sqrt(error);
  return out;
}

// ---------------------------------------------------------------------------
// Gaussian moment integrals

/// int_0^R r^m e^{-2 r^2} dr  (R may be +infinity).
inline double radial_gaussian_moment(int m, double radius) {
  const double a = 0.5 * (m + 1);
  const double scale = 0.5 * std::pow(2.0, -a);
  if (std::isinf(radius)) return scale * std::tgamma(a);
  return scale * boost::math::tgamma_lower(a, 2.0 * radius * radius);
}

/// int_{S^{n-1}} omega^{2 beta} d omega = 2 prod Gamma(beta_j + 1/2) / Gamma(|beta| + n/2).
inline double sphere_even_monomial(const MultiIndex& beta) {
  double num = 2.0;
  for (int j = 0; j < beta.dimension(); ++j) num *= std::tgamma(beta[j] + 0.5);
  return num / std::tgamma(beta.order() + 0.5 * beta.dimension());
}

/// int_{|xi| <= R} xi^{2 beta} e^{-2|xi|^2} dxi
inline double ball_gaussian_monomial(const MultiIndex& beta, double radius) {
  const int n = beta.dimension();
  return sphere_even_monomial(beta) * radial_gaussian_moment(2 * beta.order() + n - 1, radius);
}

/// int_{R^n} xi^{2 beta} e^{-2|xi|^2} dxi = prod Gamma(beta_j + 1/2) / 2^{beta_j + 1/2}
inline double full_gaussian_monomial(const MultiIndex& beta) {
  double r = 1.0;
  for (int j = 0; j < beta.dimension(); ++j)
    r *= std::tgamma(beta[j] + 0.5) / std::pow(2.0, beta[j] + 0.5);
  return r;
}

/// Constants of the closed form of ||B_2 e^{-|xi|^2}||_{L^2(|xi| <= 1/2)}, n >= 2.
struct LowerBoundConstants {
  /// int_{|xi|<=1/2} xi_1^4 e^{-2|xi|^2}
  double c1 = 0.0;
  /// int_{|xi|<=1/2} xi_1^2 xi_2^2 e^{-2|xi|^2}
  double c12 = 0.0;
  /// V_j = int v - (1/2) int x_j^2 v
  std::vector<double> v;
  /// W[j][k] = int x_j x_k v for j < k; zero on and below the diagonal.
  std::vector<std::vector<double>> w;
};

inline LowerBoundConstants lower_bound_constants(const MomentTable& table) {
  const int n = table.dimension();
  if (n < 2) throw UnsupportedError("lower_bound_constants need n >= 2");
  if (table.order() < 2) throw InsufficientOrderError("lower_bound_constants need moments to order 2");
  LowerBoundConstants c;
  c.c1 = ball_gaussian_monomial(MultiIndex::unit(n, 0, 2), 0.5);
  c.c12 = ball_gaussian_monomial(MultiIndex::unit(n, 0) + MultiIndex::unit(n, 1), 0.5);
  const double mass = table.raw(MultiIndex(n));
  c.v.resize(n);
  c.w.assign(n, std::vector<double>(n, 0.0));
  for (int j = 0; j < n; ++j) {
    c.v[j] = mass - 0.5 * table.raw(MultiIndex::unit(n, j, 2));
    for (int k = j + 1; k < n; ++k)
      c.w[j][k] = table.raw(MultiIndex::unit(n, j) + MultiIndex::unit(n, k));
  }
  return c;
}

/// (2 int_0^{1/2} xi^{2k} e^{-2 xi^2} dxi)^{1/2}
inline double prop1_radial_factor(int k) {
  return std::sqrt(2.0 * radial_gaussian_moment(2 * k, 0.5));
}

/// ||B_k e^{-|xi|^2}||_{L^2(|xi| <= 1/2)} in one dimension, where
/// B_k(xi) = (sum_j (-1)^j M_{2j}) xi^k  (k even)
///         = i (sum_j (-1)^j M_{2j+1}) xi^k  (k odd).
inline double prop1_constant(int k, const MomentTable& table) {
  if (table.dimension() != 1) throw UnsupportedError("prop1_constant is one-dimensional");
  if (k < 0) throw Error("prop1_constant: k must be nonnegative");
  if (table.order() < k) throw InsufficientOrderError("prop1_constant: moment table order too low");
  const int odd = k % 2;
  double alternating = 0.0;
  for (int j = 0; 2 * j + odd <= k; ++j) {
    const double m = table.value(MultiIndex{2 * j + odd});
    alternating += (j % 2 == 0) ? m : -m;
  }
  return prop1_radial_factor(k) * std::abs(alternating);
}

/// ||B_k e^{-|xi|^2}||_{L^2(|xi| <= 1/2)} for n >= 2 and k <= 2.
inline double prop2_norm(int k, const MomentTable& table) {
  const int n = table.dimension();
  if (n < 2) throw UnsupportedError("prop2_norm needs n >= 2");
  if (k < 0 || k > 2) throw UnsupportedError("prop2_norm has closed forms for k = 0, 1, 2 only");
  if (table.order() < k) throw InsufficientOrderError("prop2_norm: moment table order too low");
  switch (k) {
    case 0:
      return std::sqrt(ball_gaussian_monomial(MultiIndex(n), 0.5)) * std::abs(table.value(MultiIndex(n)));
    case 1: {
      double sum = 0.0;
      for (int j = 0; j < n; ++j) {
        const double m = table.value(MultiIndex::unit(n, j));
        sum += m * m;
      }
      return std::sqrt(ball_gaussian_monomial(MultiIndex::unit(n, 0), 0.5) * sum);
    }
    default: {
      const LowerBoundConstants c = lower_bound_constants(table);
      double diag = 0.0, cross = 0.0;
      for (int j = 0; j < n; ++j) {
        diag += c.v[j] * c.v[j];
        for (int k2 = j + 1; k2 < n; ++k2) cross += 2.0 * c.v[j] * c.v[k2] + c.w[j][k2] * c.w[j][k2];
      }
      return std::sqrt(std::max(0.0, c.c1 * diag + c.c12 * cross));
    }
  }
}

/// ||C_k e^{-|xi|^2}||_{L^2(R^n)} from
///   sum_{|g|=k} (int xi^{2g} e^{-2|xi|^2}) sum_{b1 + b2 = 2g, |b1|=|b2|=k} M_b1 M_b2.
inline double prop62_norm(int k, const MomentTable& table) {
  const int n = table.dimension();
  if (k < 0) throw Error("prop62_norm: k must be nonnegative");
  if (table.order() < k) throw InsufficientOrderError("prop62_norm: moment table order too low");
  const auto level = indices_of_order(n, k);
  double total = 0.0;
  for (const auto& g : level) {
    const MultiIndex twice = g.doubled();
    double pair_sum = 0.0;
    for (const auto& b1 : level) {
      if (!b1.fits_in(twice)) continue;
      MultiIndex b2(n);
      for (int j = 0; j < n; ++j) b2.set(j, twice[j] - b1[j]);
      pair_sum += table.value(b1) * table.value(b2);
    }
    total += full_gaussian_monomial(g) * pair_sum;
  }
  return std::sqrt(std::max(0.0, total));
}

/// ||P e^{-|xi|^2}||_{L^2(|xi| <= radius)} from the monomial form of P,
/// pairing coefficients whose exponents sum to an all-even index.
inline double canonical_gaussian_norm(const CanonicalPolynomial& p, double radius) {
  const int n = p.dimension();
  double total = 0.0;
  for (const auto& [b1, c1] : p.coefficients()) {
    for (const auto& [b2, c2] : p.coefficients()) {
      const MultiIndex sum = b1 + b2;
      if (!sum.all_even()) continue;
      MultiIndex half(n);
      for (int j = 0; j < n; ++j) half.set(j, sum[j] / 2);
      const double w = std::isinf(radius) ? full_gaussian_monomial(half)
                                          : ball_gaussian_monomial(half, radius);
      total += (c1 * std::conj(c2)).real() * w;
    }
  }
  return std::sqrt(std::max(0.0, total));
}

/// ||P e^{-|xi|^2}|| over a region, by quadrature. A structurally zero P
/// gives exactly 0: its terms cancel only up to rounding pointwise.
inline RegionNorm polynomial_gaussian_norm(const ExpansionPolynomial& p, const FrequencyRegion& region,
                                           const NormOptions& options = {}) {
  if (p.is_structurally_zero()) return RegionNorm{0.0, 0.0, 0, region};
  return region_l2_norm(
      [&](std::span<const double> xi) { return p(xi) * std::exp(-squared_norm(xi)); }, region,
      options);
}

/// L = ||B_k e^{-|xi|^2}||_{L^2(|xi| <= 1/2)}: closed form where one exists
/// (n = 1; n >= 2 with k <= 2), quadrature otherwise.
inline double lower_bound_constant(const MomentTable& table, int k, const NormOptions& options = {}) {
  const int n = table.dimension();
  if (n == 1) return prop1_constant(k, table);
  if (k <= 2) return prop2_norm(k, table);
  return polynomial_gaussian_norm(build(ExpansionKind::B, k, table), FrequencyRegion::ball(n, 0.5),
                                  options)
      .value;
}

/// ||u^(t) - A_{k-1} e^{-t|xi|^2}|| over the region.
inline RegionNorm residual_norm(const SpectralSolution& sol, double t, int k,
                                const FrequencyRegion& region, const NormOptions& options = {}) {
  if (!(t > 0.0)) throw Error("residual_norm: t must be positive");
  if (k < 0) throw Error("residual_norm: k must be nonnegative");
  const MomentTable table = MomentTable::from_datum(sol.v(), std::max(k - 1, 0));
  const ExpansionPolynomial a = build(ExpansionKind::A, k - 1, table);
  return region_l2_norm(
      [&](std::span<const double> xi) { return residual_vs_expansion(sol, t, xi, a); }, region,
      options);
}

/// ||e^{-t|xi|^2} (v^ - sum_{|alpha| <= k-1} M_alpha (i xi)^alpha)|| over the region.
inline RegionNorm heat_residual_norm(const InitialDatum& v, double t, int k,
                                     const FrequencyRegion& region, const NormOptions& options = {}) {
  if (!(t > 0.0)) throw Error("heat_residual_norm: t must be positive");
  const MomentTable table = MomentTable::from_datum(v, std::max(k - 1, 0));
  const bool any = k >= 1;
  const ExpansionPolynomial taylor =
      any ? build(ExpansionKind::Taylor, k - 1, table) : ExpansionPolynomial(ExpansionKind::Taylor, -1, v.dimension());
  return region_l2_norm(
      [&](std::span<const double> xi) {
        return std::exp(-t * squared_norm(xi)) * (v.fourier(xi) - taylor(xi));
      },
      region, options);
}

// ---------------------------------------------------------------------------
// Pointwise remainder bounds

/// int |x|^gamma |v(x)| dx by nested quadrature.
inline double absolute_moment(const InitialDatum& v, double gamma,
                              const quad::AdaptiveOptions& options = {}) {
  if (v.is_zero()) return 0.0;
  const auto cuts = v.support_breakpoints(gamma);
  return quad::integrate_box(
             [&](std::span<const double> x) {
               const double r = std::sqrt(squared_norm(x));
               return (gamma == 0.0 ? 1.0 : std::pow(r, gamma)) * std::abs(v.value(x));
             },
             v.dimension(), cuts, options)
      .value;
}

struct SupRatioReport {
  double gamma = 0.0;
  double sup_coarse = 0.0;
  double sup_fine = 0.0;
  double relative_change = 0.0;
  bool finite = true;
  bool stable = true;
  bool passed = true;
};

namespace detail {

/// sup over xi = r omega, r in (0, R] on `radii` points, omega from a
/// direction rule, of |numerator(xi)| / |xi|^gamma.
template <class F>
double sup_over_grid(const F& numerator, int n, double radius, int radii, int directions,
                     double gamma) {
  const auto rule = quad::direction_rule(n, directions, std::max(2, directions / 2));
  double sup = 0.0;
  std::array<double, 3> xi{};
  for (int i = 1; i <= radii; ++i) {
    const double r = radius * i / radii;
    for (const auto& d : rule.directions) {
      for (int j = 0; j < n; ++j) xi[j] = r * d[j];
      const double val = std::abs(numerator(std::span<const double>(xi.data(), n)));
      sup = std::max(sup, val / std::pow(r, gamma));
    }
  }
  return sup;
}

inline SupRatioReport finish_sup(double gamma, double coarse, double fine, double stability) {
  SupRatioReport rep;
  rep.gamma = gamma;
  rep.sup_coarse = coarse;
  rep.sup_fine = fine;
  rep.finite = std::isfinite(coarse) && std::isfinite(fine);
  rep.relative_change = fine > 0.0 ? std::abs(fine - coarse) / fine : 0.0;
  rep.stable = rep.relative_change <= stability;
  rep.passed = rep.finite && rep.stable;
  return rep;
}

}  // namespace detail

/// sup |v^(xi) - sum_{|alpha| <= [gamma]} M_alpha (i xi)^alpha| / (|xi|^gamma int |x|^gamma |v|)
/// on |xi| <= radius, evaluated on a grid and on its refinement.
inline SupRatioReport taylor_remainder_sup_ratio(const InitialDatum& v, double gamma,
                                                 double radius = 2.0, int radii = 200,
                                                 double stability = 0.05) {
  const int n = v.dimension();
  const int m = integer_part(gamma);
  const auto taylor = build(ExpansionKind::Taylor, m, MomentTable::from_datum(v, m));
  const double weight = absolute_moment(v, gamma);
  if (weight == 0.0) return detail::finish_sup(gamma, 0.0, 0.0, stability);
  auto numerator = [&](std::span<const double> xi) { return v.fourier(xi) - taylor(xi); };
  const double coarse = detail::sup_over_grid(numerator, n, radius, radii, 16, gamma) / weight;
  const double fine = detail::sup_over_grid(numerator, n, radius, 2 * radii, 32, gamma) / weight;
  return detail::finish_sup(gamma, coarse, fine, stability);
}

/// sup |F^v(xi) - A_{[gamma]}(xi)| / (|xi|^gamma ||v||_{1,gamma}) on |xi| <= 1/2.
inline SupRatioReport symbol_remainder_sup_ratio(const InitialDatum& v, double gamma,
                                                 int radii = 200, double stability = 0.05) {
  const int n = v.dimension();
  const int m = integer_part(gamma);
  const auto a = build(ExpansionKind::A, m, MomentTable::from_datum(v, m));
  const double weight = weighted_l1_norm(v, gamma);
  if (weight == 0.0) return detail::finish_sup(gamma, 0.0, 0.0, stability);
  const SymbolFv symbol(v);
  auto numerator = [&](std::span<const double> xi) { return symbol(xi) - a(xi); };
  const double coarse = detail::sup_over_grid(numerator, n, 0.5, radii, 16, gamma) / weight;
  const double fine = detail::sup_over_grid(numerator, n, 0.5, 2 * radii, 32, gamma) / weight;
  return detail::finish_sup(gamma, coarse, fine, stability);
}

}  // namespace dampex
