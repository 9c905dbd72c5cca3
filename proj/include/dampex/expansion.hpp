#pragma once

// Moment-built expansion polynomials in xi:
//
//   A_k(xi) = sum_j |xi|^{k-2j}   sum_{|alpha| <= 2j}   M_alpha (i xi)^alpha   (k even)
//           = sum_j |xi|^{k-1-2j} sum_{|alpha| <= 2j+1} M_alpha (i xi)^alpha   (k odd)
//   B_k     = the same sums restricted to |alpha| = 2j (resp. 2j+1)
//   C_k     = sum_{|alpha| = k} M_alpha (i xi)^alpha
//
// with A_{-1} = 0. A_k e^{-t|xi|^2} is the k-th order profile of the damped
// solution, B_k its increment and C_k the increment of the pure heat flow.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "dampex/error.hpp"
#include "dampex/initial_data.hpp"
#include "dampex/multi_index.hpp"

namespace dampex {

enum class ExpansionKind {
  A,
  B,
  C,
  /// sum_{|alpha| <= k} M_alpha (i xi)^alpha, the Taylor polynomial of v^ at 0
  Taylor,
};

inline std::string to_string(ExpansionKind kind) {
  switch (kind) {
    case ExpansionKind::A: return "A";
    case ExpansionKind::B: return "B";
    case ExpansionKind::C: return "C";
    case ExpansionKind::Taylor: return "T";
  }
  return "?";
}

inline ExpansionKind expansion_kind_from_string(const std::string& s) {
  if (s == "A") return ExpansionKind::A;
  if (s == "B") return ExpansionKind::B;
  if (s == "C") return ExpansionKind::C;
  if (s == "T") return ExpansionKind::Taylor;
  throw ConfigError("unknown expansion kind '" + s + "' (expected A|B|C)");
}

/// coefficient * |xi|^radial_power * xi^alpha, where the coefficient already
/// carries the factor i^{|alpha|}, i.e. coefficient = M_alpha i^{|alpha|}.
struct Term {
  Complex coefficient;
  int radial_power = 0;
  MultiIndex alpha;

  /// The real moment M_alpha behind the coefficient.
  double moment() const {
    return (coefficient * std::conj(i_power(alpha.order()))).real();
  }
};

/// Pure monomial form sum_beta c_beta xi^beta with exact zeros removed.
class CanonicalPolynomial {
 public:
  explicit CanonicalPolynomial(int dimension) : dim_(dimension) {}

  int dimension() const noexcept { return dim_; }
  const std::map<MultiIndex, Complex>& coefficients() const noexcept { return coeffs_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }

  void add(const MultiIndex& beta, Complex c) { coeffs_[beta] += c; }

  void prune() {
    std::erase_if(coeffs_, [](const auto& kv) { return kv.second == Complex(0.0, 0.0); });
  }

  Complex operator()(std::span<const double> xi) const {
    Complex sum = 0.0;
    for (const auto& [beta, c] : coeffs_) sum += c * monomial(beta, xi);
    return sum;
  }

  CanonicalPolynomial operator+(const CanonicalPolynomial& other) const {
    CanonicalPolynomial r = *this;
    for (const auto& [beta, c] : other.coeffs_) r.add(beta, c);
    r.prune();
    return r;
  }

  /// Largest coefficient deviation, relative to max(1, largest coefficient).
  double distance(const CanonicalPolynomial& other) const {
    double scale = 1.0, dev = 0.0;
    std::map<MultiIndex, Complex> diff = coeffs_;
    for (const auto& [beta, c] : coeffs_) scale = std::max(scale, std::abs(c));
    for (const auto& [beta, c] : other.coeffs_) {
      scale = std::max(scale, std::abs(c));
      diff[beta] -= c;
    }
    for (const auto& [beta, c] : diff) dev = std::max(dev, std::abs(c));
    return dev / scale;
  }

 private:
  int dim_;
  std::map<MultiIndex, Complex> coeffs_;
};

class ExpansionPolynomial {
 public:
  ExpansionPolynomial(ExpansionKind kind, int order, int dimension)
      : kind_(kind), order_(order), dim_(dimension) {}

  ExpansionKind kind() const noexcept { return kind_; }
  int order() const noexcept { return order_; }
  int dimension() const noexcept { return dim_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  void push(Term term) { terms_.push_back(std::move(term)); }

  Complex operator()(std::span<const double> xi) const {
    if (static_cast<int>(xi.size()) != dim_)
      throw Error("expansion evaluated at a point of the wrong dimension");
    if (terms_.empty()) return 0.0;
    const double r2 = squared_norm(xi);
    Complex sum = 0.0;
    for (const auto& t : terms_) sum += t.coefficient * radial(r2, t.radial_power) * monomial(t.alpha, xi);
    return sum;
  }

  /// sum |coefficient| |xi|^p |xi^alpha|, the rounding scale of operator().
  double magnitude(std::span<const double> xi) const {
    const double r2 = squared_norm(xi);
    double sum = 0.0;
    for (const auto& t : terms_)
      sum += std::abs(t.coefficient) * radial(r2, t.radial_power) * std::abs(monomial(t.alpha, xi));
    return sum;
  }

  /// Expands every |xi|^p = (sum_j xi_j^2)^{p/2} into monomials and merges.
  CanonicalPolynomial canonical() const {
    CanonicalPolynomial out(dim_);
    for (const auto& t : terms_) {
      const int half = t.radial_power / 2;
      const double half_factorial = MultiIndex::unit(dim_, 0, half).factorial();
      for (const auto& g : indices_of_order(dim_, half)) {
        const double multinomial = half_factorial / g.factorial();
        out.add(t.alpha + g.doubled(), t.coefficient * multinomial);
      }
    }
    out.prune();
    return out;
  }

  /// Zero after canonical merging, not just numerically small.
  bool is_structurally_zero() const { return canonical().is_zero(); }

 private:
  static double radial(double r2, int p) {
    double r = 1.0;
    for (int m = 0; m < p / 2; ++m) r *= r2;
    return r;
  }

  ExpansionKind kind_;
  int order_;
  int dim_;
  std::vector<Term> terms_;
};

/// Builds A_k, B_k, C_k or the Taylor polynomial of order k from a moment
/// table. Exact-zero moments contribute no term.
inline ExpansionPolynomial build(ExpansionKind kind, int k, const MomentTable& table) {
  const int n = table.dimension();
  if (kind == ExpansionKind::A && k < -1) throw Error("A_k requires k >= -1");
  if (kind != ExpansionKind::A && k < 0) throw Error("expansion order must be nonnegative");
  ExpansionPolynomial p(kind, k, n);
  if (k < 0) return p;
  if (table.order() < k)
    throw InsufficientOrderError("expansion of order " + std::to_string(k) +
                                 " needs moments to order " + std::to_string(k) + ", table has " +
                                 std::to_string(table.order()));

  auto append = [&](int radial_power, int min_order, int max_order) {
    for (int m = min_order; m <= max_order; ++m) {
      for (const auto& alpha : indices_of_order(n, m)) {
        if (table.is_exact_zero(alpha)) continue;
        p.push(Term{table.value(alpha) * i_power(m), radial_power, alpha});
      }
    }
  };

  switch (kind) {
    case ExpansionKind::A:
    case ExpansionKind::B: {
      const bool cumulative = kind == ExpansionKind::A;
      const int odd = k % 2;
      for (int j = 0; j <= (k - odd) / 2; ++j) {
        const int top = 2 * j + odd;
        append(k - odd - 2 * j, cumulative ? 0 : top, top);
      }
      break;
    }
    case ExpansionKind::C:
      append(0, k, k);
      break;
    case ExpansionKind::Taylor:
      append(0, 0, k);
      break;
  }
  return p;
}

inline Complex eval(const ExpansionPolynomial& p, std::span<const double> xi) { return p(xi); }

/// B_k and C_k contain only total degrees p + |alpha| of the parity of k.
inline bool has_order_parity(const ExpansionPolynomial& p) {
  return std::all_of(p.terms().begin(), p.terms().end(), [&](const Term& t) {
    return (t.radial_power + t.alpha.order()) % 2 == p.order() % 2;
  });
}

/// p + |alpha| <= k for every term.
inline bool has_bounded_degree(const ExpansionPolynomial& p) {
  return std::all_of(p.terms().begin(), p.terms().end(), [&](const Term& t) {
    return t.radial_power + t.alpha.order() <= p.order();
  });
}

/// Every term has p + |alpha| = k exactly (the source of B_k homogeneity).
inline bool is_homogeneous(const ExpansionPolynomial& p) {
  return std::all_of(p.terms().begin(), p.terms().end(), [&](const Term& t) {
    return t.radial_power + t.alpha.order() == p.order();
  });
}

struct PropertyReport {
  std::string name;
  int order = 0;
  std::size_t samples = 0;
  double max_abs_deviation = 0.0;
  /// Deviation divided by the magnitude scale of the terms involved.
  double max_scaled_deviation = 0.0;
  /// Coefficient distance between the two sides in canonical form.
  double structural_deviation = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

namespace detail {

inline void record(PropertyReport& rep, Complex lhs, Complex rhs, double scale) {
  const double dev = std::abs(lhs - rhs);
  rep.max_abs_deviation = std::max(rep.max_abs_deviation, dev);
  const double scaled = scale > 0.0 ? dev / scale : dev;
  rep.max_scaled_deviation = std::max(rep.max_scaled_deviation, scaled);
  ++rep.samples;
}

inline void finish(PropertyReport& rep) {
  rep.passed = rep.max_scaled_deviation <= rep.tolerance && rep.structural_deviation <= rep.tolerance;
}

}  // namespace detail

/// A_k = A_{k-1} + B_k, pointwise on the sample and term-by-term.
inline PropertyReport check_property_A(const MomentTable& table, int k,
                                       std::span<const std::vector<double>> sample,
                                       double tolerance = 1e-13) {
  PropertyReport rep{"A", k};
  rep.tolerance = tolerance;
  const auto a = build(ExpansionKind::A, k, table);
  const auto prev = build(ExpansionKind::A, k - 1, table);
  const auto b = build(ExpansionKind::B, k, table);
  for (const auto& xi : sample) {
    detail::record(rep, a(xi), prev(xi) + b(xi),
                   a.magnitude(xi) + prev.magnitude(xi) + b.magnitude(xi));
  }
  rep.structural_deviation = a.canonical().distance(prev.canonical() + b.canonical());
  detail::finish(rep);
  return rep;
}

/// B_k = |xi|^2 B_{k-2} + C_k for k >= 2.
inline PropertyReport check_property_B(const MomentTable& table, int k,
                                       std::span<const std::vector<double>> sample,
                                       double tolerance = 1e-13) {
  if (k < 2) throw Error("property B is stated for k >= 2");
  PropertyReport rep{"B", k};
  rep.tolerance = tolerance;
  const auto b = build(ExpansionKind::B, k, table);
  const auto b2 = build(ExpansionKind::B, k - 2, table);
  const auto c = build(ExpansionKind::C, k, table);
  for (const auto& xi : sample) {
    const double r2 = squared_norm(xi);
    detail::record(rep, b(xi), r2 * b2(xi) + c(xi),
                   b.magnitude(xi) + r2 * b2.magnitude(xi) + c.magnitude(xi));
  }
  // |xi|^2 B_{k-2} as a polynomial: raise every radial power by two.
  ExpansionPolynomial shifted(ExpansionKind::B, k, table.dimension());
  for (auto t : b2.terms()) {
    t.radial_power += 2;
    shifted.push(t);
  }
  rep.structural_deviation = b.canonical().distance(shifted.canonical() + c.canonical());
  detail::finish(rep);
  return rep;
}

/// B_k(xi / c) = c^{-k} B_k(xi).
inline PropertyReport check_property_C(const ExpansionPolynomial& b, double c,
                                       std::span<const std::vector<double>> sample,
                                       double tolerance = 1e-12) {
  if (b.kind() != ExpansionKind::B) throw Error("property C applies to B-kind polynomials");
  if (!(c > 0.0)) throw Error("property C needs c > 0");
  PropertyReport rep{"C", b.order()};
  rep.tolerance = tolerance;
  const double factor = std::pow(c, -b.order());
  std::vector<double> scaled_xi;
  for (const auto& xi : sample) {
    scaled_xi.assign(xi.begin(), xi.end());
    for (double& x : scaled_xi) x /= c;
    detail::record(rep, b(scaled_xi), factor * b(xi),
                   b.magnitude(scaled_xi) + factor * b.magnitude(xi));
  }
  rep.structural_deviation = is_homogeneous(b) ? 0.0 : 1.0;
  detail::finish(rep);
  return rep;
}

/// One term M_alpha (-Lap)^{laplacian_power} d^alpha G(t, x) of the
/// physical-space profile.
struct KernelTerm {
  double moment = 0.0;
  int laplacian_power = 0;
  MultiIndex derivative;
};

/// P(xi) e^{-t|xi|^2} as a sum of Gauss-kernel derivatives. Radial powers are
/// always even, so only integer Laplacian powers occur.
struct KernelSum {
  double t = 0.0;
  std::vector<KernelTerm> terms;

  std::string to_string() const {
    if (terms.empty()) return "0";
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const auto& k = terms[i];
      if (i) os << " + ";
      os << k.moment;
      if (k.laplacian_power > 0) os << " (-Lap)^" << k.laplacian_power;
      if (k.derivative.order() > 0) os << " d^" << k.derivative.to_string();
      os << " G(" << t << ",x)";
    }
    return os.str();
  }
};

inline KernelSum inverse_transform_description(const ExpansionPolynomial& p, double t) {
  if (!(t > 0.0)) throw Error("inverse_transform_description: t must be positive");
  KernelSum out{t, {}};
  for (const auto& term : p.terms())
    out.terms.push_back(KernelTerm{term.moment(), term.radial_power / 2, term.alpha});
  return out;
}

}  // namespace dampex
