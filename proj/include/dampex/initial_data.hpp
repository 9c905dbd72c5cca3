#pragma once

// Catalog of initial data on R^n (n <= 3) with closed-form Fourier transforms
// and moments, plus the moment table consumed by the expansion polynomials.
//
// Conventions:
//   Fourier transform   v^(xi) = int e^{-i x.xi} v(x) dx
//   normalized moment   M_alpha(v) = (-1)^{|alpha|} / alpha! int x^alpha v(x) dx
//   weighted L1 norm    ||v||_{1,gamma} = int (1 + |x|)^gamma |v(x)| dx

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dampex/error.hpp"
#include "dampex/multi_index.hpp"
#include "dampex/quadrature.hpp"

namespace dampex {

using Complex = std::complex<double>;

enum class Family {
  Gaussian,          // exp(-|y|^2 / scale)
  GaussianMonomial,  // y^beta exp(-|y|^2 / scale)
  Box,               // indicator of [-h, h]^n
};

inline std::string to_string(Family f) {
  switch (f) {
    case Family::Gaussian: return "gaussian";
    case Family::GaussianMonomial: return "gaussian_monomial";
    case Family::Box: return "box";
  }
  return "unknown";
}

/// One separable catalog term  weight * base((x - center) / dilation),
/// with the division taken per axis.
struct Component {
  Family family = Family::Gaussian;
  double weight = 1.0;
  double scale = 4.0;
  std::array<int, kMaxDimension> beta{};
  double half_width = 1.0;
  std::array<double, kMaxDimension> center{};
  std::array<double, kMaxDimension> dilation{1.0, 1.0, 1.0};
};

namespace detail {

inline double double_factorial_odd(int m) {  // (m)!! for odd m, 1 for m <= 0
  double r = 1.0;
  for (int k = m; k > 1; k -= 2) r *= k;
  return r;
}

inline double binomial(int m, int q) {
  double r = 1.0;
  for (int k = 1; k <= q; ++k) r = r * (m - q + k) / k;
  return r;
}

/// int y^m exp(-y^2/s) dy
inline double gaussian_moment_1d(int m, double s) {
  if (m % 2 == 1) return 0.0;
  const int q = m / 2;
  return std::sqrt(std::numbers::pi * s) * double_factorial_odd(2 * q - 1) *
         std::pow(s / 2.0, q);
}

inline double hermite(int m, double x) {
  double h0 = 1.0;
  if (m == 0) return h0;
  double h1 = 2.0 * x;
  for (int k = 1; k < m; ++k) {
    const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

/// Axis parity of the undilated, untranslated base: +1 even, -1 odd.
inline int base_parity(const Component& c, int axis) {
  if (c.family == Family::GaussianMonomial && c.beta[axis] % 2 == 1) return -1;
  return 1;
}

inline double base_value_1d(const Component& c, int axis, double y) {
  switch (c.family) {
    case Family::Gaussian:
      return std::exp(-y * y / c.scale);
    case Family::GaussianMonomial:
      return std::pow(y, c.beta[axis]) * std::exp(-y * y / c.scale);
    case Family::Box:
      return std::abs(y) <= c.half_width ? 1.0 : 0.0;
  }
  return 0.0;
}

inline double base_moment_1d(const Component& c, int axis, int m) {
  switch (c.family) {
    case Family::Gaussian:
      return gaussian_moment_1d(m, c.scale);
    case Family::GaussianMonomial:
      return gaussian_moment_1d(m + c.beta[axis], c.scale);
    case Family::Box:
      if (m % 2 == 1) return 0.0;
      return 2.0 * std::pow(c.half_width, m + 1) / (m + 1);
  }
  return 0.0;
}

inline Complex base_fourier_1d(const Component& c, int axis, double w) {
  switch (c.family) {
    case Family::Gaussian:
      return std::sqrt(std::numbers::pi * c.scale) * std::exp(-c.scale * w * w / 4.0);
    case Family::GaussianMonomial: {
      // F[y^m g] = i^m d^m/dw^m g^  and  d^m/dw^m e^{-a w^2}
      //          = (-1)^m a^{m/2} H_m(sqrt(a) w) e^{-a w^2}.
      const int m = c.beta[axis];
      const double root_a = std::sqrt(c.scale) / 2.0;
      const double mag = std::sqrt(std::numbers::pi * c.scale) * std::pow(root_a, m) *
                         hermite(m, root_a * w) * std::exp(-c.scale * w * w / 4.0);
      return i_power(3 * m) * mag;
    }
    case Family::Box:
      if (w == 0.0) return 2.0 * c.half_width;
      return 2.0 * std::sin(c.half_width * w) / w;
  }
  return 0.0;
}

/// int x^m base((x - c)/d) dx along one axis.
inline double component_moment_1d(const Component& comp, int axis, int m) {
  const double c = comp.center[axis];
  const double d = comp.dilation[axis];
  if (c == 0.0) return std::pow(d, m + 1) * base_moment_1d(comp, axis, m);
  double sum = 0.0;
  for (int q = 0; q <= m; ++q) {
    const double mu = base_moment_1d(comp, axis, q);
    if (mu == 0.0) continue;
    sum += binomial(m, q) * std::pow(c, m - q) * std::pow(d, q) * mu;
  }
  return d * sum;
}

/// Half-length of the base support along one axis, truncated where a
/// polynomial factor of degree `power` times the base drops below 1e-16 of
/// its peak.
inline double base_radius(const Component& c, int axis, double power) {
  if (c.family == Family::Box) return c.half_width;
  const double p = power + (c.family == Family::GaussianMonomial ? c.beta[axis] : 0);
  return std::sqrt(c.scale) * (6.2 + std::sqrt(std::max(0.0, p)));
}

}  // namespace detail

/// A finite sum of catalog components on R^n. The empty sum is the zero
/// function. Immutable after construction.
class InitialDatum {
 public:
  explicit InitialDatum(int dimension = 1) : dim_(dimension) {
    if (dimension < 1 || dimension > kMaxDimension)
      throw Error("initial datum dimension must be in 1..3, got " +
                  std::to_string(dimension));
  }

  static InitialDatum zero(int dimension) { return InitialDatum(dimension); }

  static InitialDatum gaussian(int dimension, double scale, double weight = 1.0) {
    Component c;
    c.family = Family::Gaussian;
    c.scale = scale;
    c.weight = weight;
    return single(dimension, c);
  }

  static InitialDatum gaussian_monomial(int dimension, double scale, const MultiIndex& beta,
                                        double weight = 1.0) {
    if (beta.dimension() != dimension) throw Error("gaussian_monomial: beta dimension mismatch");
    Component c;
    c.family = Family::GaussianMonomial;
    c.scale = scale;
    c.weight = weight;
    for (int j = 0; j < dimension; ++j) c.beta[j] = beta[j];
    return single(dimension, c);
  }

  static InitialDatum box(int dimension, double half_width, double weight = 1.0) {
    Component c;
    c.family = Family::Box;
    c.half_width = half_width;
    c.weight = weight;
    return single(dimension, c);
  }

  /// Heat kernel G(t, x) = (4 pi t)^{-n/2} exp(-|x|^2 / (4t)), whose transform
  /// is exp(-t |xi|^2).
  static InitialDatum gauss_kernel(int dimension, double t) {
    return gaussian(dimension, 4.0 * t, std::pow(4.0 * std::numbers::pi * t, -0.5 * dimension));
  }

  /// x -> v(x - shift)
  InitialDatum translated(std::span<const double> shift) const {
    check_point(shift);
    InitialDatum r = *this;
    for (auto& c : r.components_)
      for (int j = 0; j < dim_; ++j) c.center[j] += shift[j];
    return r;
  }

  /// x -> v(x / factor), per axis.
  InitialDatum dilated(std::span<const double> factor) const {
    check_point(factor);
    InitialDatum r = *this;
    for (auto& c : r.components_) {
      for (int j = 0; j < dim_; ++j) {
        if (!(factor[j] > 0.0)) throw Error("dilation factors must be positive");
        c.center[j] *= factor[j];
        c.dilation[j] *= factor[j];
      }
    }
    return r;
  }

  InitialDatum dilated(double factor) const {
    const std::array<double, 3> f{factor, factor, factor};
    return dilated(std::span<const double>(f.data(), dim_));
  }

  InitialDatum scaled(double weight) const {
    InitialDatum r = *this;
    for (auto& c : r.components_) c.weight *= weight;
    return r;
  }

  InitialDatum operator+(const InitialDatum& other) const {
    if (other.dim_ != dim_) throw Error("cannot add initial data of different dimensions");
    InitialDatum r = *this;
    r.components_.insert(r.components_.end(), other.components_.begin(),
                         other.components_.end());
    return r;
  }

  InitialDatum& add(const Component& c) {
    if (c.family == Family::GaussianMonomial || c.family == Family::Gaussian) {
      if (!(c.scale > 0.0)) throw Error("gaussian scale must be positive");
    }
    if (c.family == Family::Box && !(c.half_width > 0.0))
      throw Error("box half-width must be positive");
    for (int j = 0; j < dim_; ++j)
      if (!(c.dilation[j] > 0.0)) throw Error("dilation factors must be positive");
    components_.push_back(c);
    return *this;
  }

  int dimension() const noexcept { return dim_; }
  const std::vector<Component>& components() const noexcept { return components_; }

  bool is_zero() const noexcept {
    return std::all_of(components_.begin(), components_.end(),
                       [](const Component& c) { return c.weight == 0.0; });
  }

  double value(std::span<const double> x) const {
    check_point(x);
    double sum = 0.0;
    for (const auto& c : components_) {
      double term = c.weight;
      for (int j = 0; j < dim_; ++j)
        term *= detail::base_value_1d(c, j, (x[j] - c.center[j]) / c.dilation[j]);
      sum += term;
    }
    return sum;
  }

  Complex fourier(std::span<const double> xi) const {
    check_point(xi);
    Complex sum = 0.0;
    for (const auto& c : components_) {
      Complex term = c.weight;
      for (int j = 0; j < dim_; ++j) {
        const double d = c.dilation[j];
        Complex factor = d * detail::base_fourier_1d(c, j, d * xi[j]);
        if (c.center[j] != 0.0) factor *= std::polar(1.0, -c.center[j] * xi[j]);
        term *= factor;
      }
      sum += term;
    }
    return sum;
  }

  /// int x^alpha v(x) dx in closed form.
  double raw_moment(const MultiIndex& alpha) const {
    check_index(alpha);
    double sum = 0.0;
    for (const auto& c : components_) {
      if (component_moment_vanishes(c, alpha)) continue;
      double term = c.weight;
      for (int j = 0; j < dim_; ++j) term *= detail::component_moment_1d(c, j, alpha[j]);
      sum += term;
    }
    return sum;
  }

  /// True when symmetry alone forces int x^alpha v = 0.
  bool moment_is_exact_zero(const MultiIndex& alpha) const {
    check_index(alpha);
    return std::all_of(components_.begin(), components_.end(), [&](const Component& c) {
      return c.weight == 0.0 || component_moment_vanishes(c, alpha);
    });
  }

  /// Per-axis sorted cut points covering the (truncated) support. `power` is
  /// the degree of any polynomial weight multiplying v.
  std::array<std::vector<double>, 3> support_breakpoints(double power) const {
    std::array<std::vector<double>, 3> cuts;
    for (int j = 0; j < dim_; ++j) {
      double lo = 0.0, hi = 0.0;
      bool first = true;
      std::vector<double>& axis_cuts = cuts[j];
      axis_cuts.push_back(0.0);
      for (const auto& c : components_) {
        if (c.weight == 0.0) continue;
        const double r = c.dilation[j] * detail::base_radius(c, j, power);
        const double a = c.center[j] - r, b = c.center[j] + r;
        lo = first ? a : std::min(lo, a);
        hi = first ? b : std::max(hi, b);
        first = false;
        axis_cuts.push_back(c.center[j]);
        if (c.family == Family::Box) {
          axis_cuts.push_back(a);
          axis_cuts.push_back(b);
        }
      }
      if (first) {
        lo = -1.0;
        hi = 1.0;
      }
      axis_cuts.push_back(lo);
      axis_cuts.push_back(hi);
      std::sort(axis_cuts.begin(), axis_cuts.end());
      axis_cuts.erase(std::unique(axis_cuts.begin(), axis_cuts.end()), axis_cuts.end());
      std::erase_if(axis_cuts, [&](double x) { return x < lo || x > hi; });
    }
    return cuts;
  }

 private:
  static InitialDatum single(int dimension, const Component& c) {
    InitialDatum d(dimension);
    d.add(c);
    return d;
  }

  bool component_moment_vanishes(const Component& c, const MultiIndex& alpha) const {
    for (int j = 0; j < dim_; ++j) {
      if (c.center[j] != 0.0) continue;
      const int parity = detail::base_parity(c, j);
      const bool odd = alpha[j] % 2 == 1;
      if ((parity == 1 && odd) || (parity == -1 && !odd)) return true;
    }
    return false;
  }

  void check_point(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_)
      throw Error("point dimension " + std::to_string(x.size()) + " does not match datum dimension " +
                  std::to_string(dim_));
  }

  void check_index(const MultiIndex& alpha) const {
    if (alpha.dimension() != dim_) throw Error("multi-index dimension does not match datum");
  }

  int dim_;
  std::vector<Component> components_;
};

inline double normalize_moment(const MultiIndex& alpha, double raw) {
  const double sign = alpha.order() % 2 == 0 ? 1.0 : -1.0;
  return sign * raw / alpha.factorial();
}

inline double denormalize_moment(const MultiIndex& alpha, double normalized) {
  const double sign = alpha.order() % 2 == 0 ? 1.0 : -1.0;
  return sign * normalized * alpha.factorial();
}

inline Complex fourier_transform(const InitialDatum& v, std::span<const double> xi) {
  return v.fourier(xi);
}

inline double raw_moment(const InitialDatum& v, const MultiIndex& alpha) {
  if (alpha.dimension() != v.dimension()) throw Error("multi-index dimension does not match datum");
  if (v.moment_is_exact_zero(alpha)) return 0.0;
  return v.raw_moment(alpha);
}

/// M_alpha(v), closed form. Every catalog family admits one.
inline double moment(const InitialDatum& v, const MultiIndex& alpha) {
  return normalize_moment(alpha, raw_moment(v, alpha));
}

/// int x^alpha v(x) dx by nested adaptive Gauss-Kronrod over the truncated
/// support. Independent of the closed forms above.
inline quad::IntegrationResult raw_moment_by_quadrature(const InitialDatum& v,
                                                        const MultiIndex& alpha,
                                                        const quad::AdaptiveOptions& options = {}) {
  const auto cuts = v.support_breakpoints(alpha.order());
  return quad::integrate_box(
      [&](std::span<const double> x) { return monomial(alpha, x) * v.value(x); }, v.dimension(),
      cuts, options);
}

/// ||v||_{1,gamma} by nested quadrature.
inline double weighted_l1_norm(const InitialDatum& v, double gamma,
                               const quad::AdaptiveOptions& options = {}) {
  if (gamma < 0.0) throw Error("weighted_l1_norm: gamma must be nonnegative");
  if (v.is_zero()) return 0.0;
  const auto cuts = v.support_breakpoints(gamma);
  return quad::integrate_box(
             [&](std::span<const double> x) {
               return std::pow(1.0 + std::sqrt(squared_norm(x)), gamma) * std::abs(v.value(x));
             },
             v.dimension(), cuts, options)
      .value;
}

/// Normalized moments M_alpha for |alpha| <= order, with symmetry zeros
/// stored as exact zeros, plus optional weighted L1 norms.
class MomentTable {
 public:
  struct Entry {
    double value = 0.0;  // normalized M_alpha
    double raw = 0.0;    // int x^alpha v
    bool exact_zero = true;
  };

  MomentTable(int dimension, int order) : dim_(dimension), order_(order) {
    if (order < 0) throw Error("moment table order must be nonnegative");
    for (const auto& a : indices_up_to(dimension, order)) entries_[a] = Entry{};
  }

  static MomentTable from_datum(const InitialDatum& v, int order) {
    MomentTable t(v.dimension(), order);
    for (auto& [alpha, e] : t.entries_) {
      e.exact_zero = v.moment_is_exact_zero(alpha);
      e.raw = e.exact_zero ? 0.0 : v.raw_moment(alpha);
      e.value = normalize_moment(alpha, e.raw);
      if (e.raw == 0.0) e.exact_zero = true;
    }
    return t;
  }

  /// Table from explicit normalized values; unlisted and zero entries are
  /// exact zeros.
  static MomentTable from_normalized(int dimension, int order,
                                     const std::map<MultiIndex, double>& values) {
    MomentTable t(dimension, order);
    for (const auto& [alpha, value] : values) {
      auto it = t.entries_.find(alpha);
      if (it == t.entries_.end())
        throw InsufficientOrderError("moment " + alpha.to_string() + " outside table order");
      it->second.value = value;
      it->second.raw = denormalize_moment(alpha, value);
      it->second.exact_zero = value == 0.0;
    }
    return t;
  }

  int dimension() const noexcept { return dim_; }
  int order() const noexcept { return order_; }

  double value(const MultiIndex& alpha) const { return entry(alpha).value; }
  double operator()(const MultiIndex& alpha) const { return value(alpha); }
  double raw(const MultiIndex& alpha) const { return entry(alpha).raw; }
  bool is_exact_zero(const MultiIndex& alpha) const { return entry(alpha).exact_zero; }

  const std::map<MultiIndex, Entry>& entries() const noexcept { return entries_; }

  void set_weighted_norm(double gamma, double norm) { weighted_norms_[gamma] = norm; }
  std::optional<double> weighted_norm(double gamma) const {
    auto it = weighted_norms_.find(gamma);
    if (it == weighted_norms_.end()) return std::nullopt;
    return it->second;
  }
  const std::map<double, double>& weighted_norms() const noexcept { return weighted_norms_; }

  /// True when every stored moment is an exact zero.
  bool all_zero() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const auto& kv) { return kv.second.exact_zero; });
  }

 private:
  const Entry& entry(const MultiIndex& alpha) const {
    if (alpha.dimension() != dim_) throw Error("multi-index dimension does not match moment table");
    auto it = entries_.find(alpha);
    if (it == entries_.end())
      throw InsufficientOrderError("moment " + alpha.to_string() + " exceeds table order " +
                                   std::to_string(order_));
    return it->second;
  }

  int dim_;
  int order_;
  std::map<MultiIndex, Entry> entries_;
  std::map<double, double> weighted_norms_;
};

inline MomentTable moment_table(const InitialDatum& v, int order,
                                std::span<const double> gammas = {},
                                const quad::AdaptiveOptions& options = {}) {
  MomentTable t = MomentTable::from_datum(v, order);
  for (double g : gammas) t.set_weighted_norm(g, weighted_l1_norm(v, g, options));
  return t;
}

}  // namespace dampex
