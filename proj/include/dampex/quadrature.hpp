#pragma once

// One-dimensional adaptive Gauss-Kronrod integration, nested box integration
// and fixed direction rules on the unit sphere S^{n-1}.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "dampex/error.hpp"

namespace dampex::quad {

struct AdaptiveOptions {
  double relative_tolerance = 1e-10;
  double absolute_tolerance = 0.0;
  std::size_t max_subdivisions = 4000;
  bool throw_on_failure = true;
};

struct IntegrationResult {
  double value = 0.0;
  double error = 0.0;
  /// Integral of |f|, used as a cancellation scale.
  double abs_integral = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

/// Compensated (Neumaier) summation.
namespace detail {

inline std::string failure_message(const char* what, const IntegrationResult& r) {
  std::ostringstream os;
  os.precision(3);
  os << what << " did not reach tolerance (value " << r.value << ", error estimate " << r.error
     << ", " << r.evaluations << " evaluations)";
  return os.str();
}

}  // namespace detail

class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {

// 15-point Kronrod nodes on [0,1] (symmetric), with the embedded 7-point
// Gauss weights at the odd positions.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
  double abs_value = 0.0;
};

template <class F>
Panel kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  double abs_sum = std::abs(kronrod);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double pair = f1[j] + f2[j];
    kronrod += kKronrodWeights[j] * pair;
    abs_sum += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    asc += kKronrodWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  Panel p{a, b, kronrod * half, std::abs((kronrod - gauss) * half),
          abs_sum * std::abs(half)};
  asc *= std::abs(half);
  if (asc != 0.0 && p.error != 0.0)
    p.error = asc * std::min(1.0, std::pow(200.0 * p.error / asc, 1.5));
  constexpr double eps = 2.220446049250313e-16;
  if (p.abs_value > std::numeric_limits<double>::min() / (50.0 * eps))
    p.error = std::max(p.error, 50.0 * eps * p.abs_value);
  return p;
}

}  // namespace detail

/// Global adaptive Gauss-Kronrod (7/15) integration of f over the interval
/// spanned by `breakpoints` (sorted, at least two). Panels with the largest
/// error estimate are bisected until the total estimate satisfies
/// err <= max(abs_tol, rel_tol * |I|) or reaches the roundoff floor. The
/// result is summed in left-to-right panel order so repeated calls are
/// bitwise reproducible.
template <class F>
IntegrationResult integrate(F&& f, std::span<const double> breakpoints,
                            const AdaptiveOptions& options = {}) {
  using detail::Panel;
  if (breakpoints.size() < 2) throw Error("integrate: need two breakpoints");

  auto by_error = [](const Panel& x, const Panel& y) {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;
  };

  std::vector<Panel> heap;
  heap.reserve(breakpoints.size() + 64);
  std::size_t evaluations = 0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i] < breakpoints[i + 1])) continue;
    heap.push_back(detail::kronrod15(f, breakpoints[i], breakpoints[i + 1]));
    evaluations += 15;
  }
  std::make_heap(heap.begin(), heap.end(), by_error);

  auto totals = [&heap]() {
    double value = 0.0, error = 0.0, abs_value = 0.0;
    for (const auto& p : heap) {
      value += p.value;
      error += p.error;
      abs_value += p.abs_value;
    }
    return std::array<double, 3>{value, error, abs_value};
  };

  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::size_t subdivisions = 0;
  bool converged = false;
  while (true) {
    const std::array<double, 3> t = totals();
    // The last term is the roundoff floor: cancelling integrands cannot be
    // resolved below a few ulps of the integral of |f|.
    const double target =
        std::max({options.absolute_tolerance,
                  options.relative_tolerance * std::abs(t[0]),
                  100.0 * eps * t[2]});
    if (t[1] <= target || heap.empty()) {
      converged = true;
      break;
    }
    if (subdivisions >= options.max_subdivisions) break;
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Panel worst = heap.back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      // Interval exhausted at machine resolution.
      std::push_heap(heap.begin(), heap.end(), by_error);
      break;
    }
    heap.pop_back();
    heap.push_back(detail::kronrod15(f, worst.a, mid));
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(detail::kronrod15(f, mid, worst.b));
    std::push_heap(heap.begin(), heap.end(), by_error);
    evaluations += 30;
    ++subdivisions;
  }

  std::sort(heap.begin(), heap.end(),
            [](const Panel& x, const Panel& y) { return x.a < y.a; });
  CompensatedSum value, error, abs_value;
  for (const auto& p : heap) {
    value.add(p.value);
    error.add(p.error);
    abs_value.add(p.abs_value);
  }
  IntegrationResult r{value.value(), error.value(), abs_value.value(),
                      evaluations, converged};
  if (!converged && options.throw_on_failure) {
    throw QuadratureError(detail::failure_message("adaptive quadrature", r), r.error, r.value);
  }
  return r;
}

template <class F>
IntegrationResult integrate(F&& f, double a, double b,
                            const AdaptiveOptions& options = {}) {
  const std::array<double, 2> ends{a, b};
  return integrate(std::forward<F>(f), std::span<const double>(ends), options);
}

/// Nested adaptive integration of f(x) over an axis-aligned box in R^n
/// (n <= 3). `breakpoints[j]` lists the sorted cut points of axis j, its first
/// and last entries being the box bounds.
template <class F>
IntegrationResult integrate_box(F&& f, int dimension,
                                const std::array<std::vector<double>, 3>& breakpoints,
                                const AdaptiveOptions& options = {}) {
  std::array<double, 3> x{};
  std::size_t evaluations = 0;
  bool converged = true;
  AdaptiveOptions inner = options;
  inner.throw_on_failure = false;
  inner.absolute_tolerance = 0.0;

  auto level = [&](auto&& self, int axis) -> IntegrationResult {
    auto integrand = [&](double xa) {
      x[axis] = xa;
      if (axis == dimension - 1) {
        ++evaluations;
        return static_cast<double>(f(std::span<const double>(x.data(), dimension)));
      }
      const IntegrationResult r = self(self, axis + 1);
      if (!r.converged) converged = false;
      return r.value;
    };
    const AdaptiveOptions& opts = axis == 0 ? options : inner;
    AdaptiveOptions local = opts;
    local.throw_on_failure = false;
    return integrate(integrand, std::span<const double>(breakpoints[axis]), local);
  };
  IntegrationResult r = level(level, 0);
  r.evaluations = evaluations;
  r.converged = r.converged && converged;
  if (!r.converged && options.throw_on_failure) {
    throw QuadratureError(detail::failure_message("nested box quadrature", r), r.error, r.value);
  }
  return r;
}

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussLegendre gauss_legendre(int points) {
  if (points < 1) throw Error("gauss_legendre: need at least one point");
  GaussLegendre rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  const int half = (points + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= points; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = points * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= points; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = points * (z * p0 - p1) / (z * z - 1.0);
    rule.nodes[i] = -z;
    rule.nodes[points - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.weights[i] = w;
    rule.weights[points - 1 - i] = w;
  }
  if (points % 2 == 1) rule.nodes[points / 2] = 0.0;
  return rule;
}

/// Quadrature on the unit sphere S^{n-1}: sum_w weight_w g(direction_w)
/// approximates the surface integral of g. The weights sum to |S^{n-1}|.
struct DirectionRule {
  int dimension = 1;
  std::vector<std::array<double, 3>> directions;
  std::vector<double> weights;
};

/// n = 1: the two points {+1, -1}. n = 2: trapezoid rule with
/// `circle_points` nodes, exact for trigonometric polynomials of degree
/// < circle_points. n = 3: Gauss-Legendre in cos(theta) with `polar_points`
/// nodes times a trapezoid in the azimuth, exact for spherical polynomials
/// of degree < min(2 * polar_points, circle_points).
inline DirectionRule direction_rule(int dimension, int circle_points = 64,
                                    int polar_points = 16) {
  DirectionRule rule;
  rule.dimension = dimension;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  switch (dimension) {
    case 1:
      rule.directions = {{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}};
      rule.weights = {1.0, 1.0};
      break;
    case 2:
      for (int k = 0; k < circle_points; ++k) {
        const double phi = two_pi * (k + 0.5) / circle_points;
        rule.directions.push_back({std::cos(phi), std::sin(phi), 0.0});
        rule.weights.push_back(two_pi / circle_points);
      }
      break;
    case 3: {
      const GaussLegendre gl = gauss_legendre(polar_points);
      for (int i = 0; i < polar_points; ++i) {
        const double mu = gl.nodes[i];
        const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        for (int k = 0; k < circle_points; ++k) {
          const double phi = two_pi * (k + 0.5) / circle_points;
          rule.directions.push_back({s * std::cos(phi), s * std::sin(phi), mu});
          rule.weights.push_back(gl.weights[i] * two_pi / circle_points);
        }
      }
      break;
    }
    default:
      throw Error("direction_rule: dimension must be 1, 2 or 3");
  }
  return rule;
}

}  // namespace dampex::quad
