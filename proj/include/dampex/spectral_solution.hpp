#pragma once

// Fourier-space solution of  u_tt - Lap u + u_t - Lap u_t = 0,
//   u(0) = u0, u_t(0) = u1,
// which for every xi solves  U'' + (1 + r) U' + r U = 0  with r = |xi|^2 and
// has characteristic roots -r and -1.

#include <cmath>
#include <complex>
#include <span>
#include <string>

#include "dampex/error.hpp"
#include "dampex/expansion.hpp"
#include "dampex/initial_data.hpp"

namespace dampex {

/// Closed forms of u^(t, xi). All four coincide where defined; only
/// `Regularized` is defined on the sphere |xi| = 1.
enum class Representation {
  Auto,
  /// [e^{-tr}(u0^ + u1^) - e^{-t}(r u0^ + u1^)] / (1 - r)
  ModeSplit,
  /// coefficients of u0^ and u1^ grouped separately over (1 - r)
  DataSplit,
  /// ModeSplit written over (r - 1), the natural form for r > 1
  ModeSplitHigh,
  /// e^{-t} u0^ + (e^{-t} int_0^t e^{-s(r-1)} ds)(u0^ + u1^)
  Regularized,
};

inline std::string to_string(Representation rep) {
  switch (rep) {
    case Representation::Auto: return "auto";
    case Representation::ModeSplit: return "mode_split";
    case Representation::DataSplit: return "data_split";
    case Representation::ModeSplitHigh: return "mode_split_high";
    case Representation::Regularized: return "regularized";
  }
  return "auto";
}

/// Accepts the names above and the numeric CLI spellings 2.1 .. 2.4, in
/// enum order.
inline Representation representation_from_string(const std::string& s) {
  if (s == "auto") return Representation::Auto;
  if (s == "mode_split" || s == "2.1") return Representation::ModeSplit;
  if (s == "data_split" || s == "2.2") return Representation::DataSplit;
  if (s == "mode_split_high" || s == "2.3") return Representation::ModeSplitHigh;
  if (s == "regularized" || s == "2.4") return Representation::Regularized;
  throw ConfigError("unknown representation '" + s +
                    "' (expected auto|mode_split|data_split|mode_split_high|regularized or 2.1..2.4)");
}

/// phi(z) = (e^z - 1) / z, with phi(0) = 1. Taylor series for |z| < 1e-2.
inline double phi(double z) {
  if (std::abs(z) < 1e-2) {
    // Terms through z^7/8!; the first omitted term is below 1e-21.
    double term = 1.0, sum = 1.0;
    for (int k = 2; k <= 8; ++k) {
      term *= z / k;
      sum += term;
    }
    return sum;
  }
  return std::expm1(z) / z;
}

/// (e^{-t r} - e^{-t}) / (1 - r), continuous through r = 1 where it equals
/// t e^{-t}. Written as t e^{-t min(r,1)} phi(-t |1 - r|) so that no
/// subtraction of nearly equal exponentials occurs and nothing overflows.
inline double damped_heat_kernel(double t, double r) {
  return t * std::exp(-t * std::min(r, 1.0)) * phi(-t * std::abs(1.0 - r));
}

struct SpectralOptions {
  /// Inner / outer radii of the middle-frequency annulus.
  double r_lo = 0.5;
  double r_hi = 2.0;
  /// Half-width of the band around |xi| = 1 where the regularized form is
  /// used by the automatic policy.
  double band = 1e-3;
  /// Forced singular forms are refused when | |xi|^2 - 1 | <= this.
  double singular_threshold = 1e-12;
};

/// Solution u^(t, xi) for data (u0, u1). Immutable; evaluation is pure.
class SpectralSolution {
 public:
  SpectralSolution(InitialDatum u0, InitialDatum u1, SpectralOptions options = {})
      : u0_(std::move(u0)), u1_(std::move(u1)), v_(u0_ + u1_), options_(options) {
    if (u0_.dimension() != u1_.dimension())
      throw Error("u0 and u1 must have the same dimension");
    if (!(options_.r_lo > 0.0 && options_.r_lo < 1.0 && options_.r_hi > 1.0))
      throw ConfigError("region thresholds must satisfy 0 < r_lo < 1 < r_hi");
    if (!(options_.band > 0.0 && options_.band < 1.0))
      throw ConfigError("band half-width must lie in (0, 1)");
  }

  int dimension() const noexcept { return u0_.dimension(); }
  const InitialDatum& u0() const noexcept { return u0_; }
  const InitialDatum& u1() const noexcept { return u1_; }
  /// v = u0 + u1
  const InitialDatum& v() const noexcept { return v_; }
  const SpectralOptions& options() const noexcept { return options_; }

  /// The representation the automatic policy picks at xi.
  Representation select(std::span<const double> xi) const {
    const double rho = std::sqrt(squared_norm(xi));
    if (rho <= 1.0 - options_.band) return Representation::ModeSplit;
    if (rho >= 1.0 + options_.band) return Representation::ModeSplitHigh;
    return Representation::Regularized;
  }

  Complex evaluate(double t, std::span<const double> xi,
                   Representation rep = Representation::Auto) const {
    if (t < 0.0) throw Error("evaluate: t must be nonnegative");
    if (rep == Representation::Auto) rep = select(xi);
    const Complex a = u0_.fourier(xi);
    const Complex b = u1_.fourier(xi);
    return combine(t, squared_norm(xi), a, b, rep);
  }

  /// Same as evaluate() with the data transforms already known.
  Complex combine(double t, double r, Complex a, Complex b, Representation rep) const {
    if (rep == Representation::Auto) {
      const double rho = std::sqrt(r);
      rep = rho <= 1.0 - options_.band   ? Representation::ModeSplit
            : rho >= 1.0 + options_.band ? Representation::ModeSplitHigh
                                         : Representation::Regularized;
    }
    if (rep != Representation::Regularized && std::abs(r - 1.0) <= options_.singular_threshold) {
      throw SingularEvaluationError(
          "representation " + to_string(rep) + " is singular at |xi| = " +
              std::to_string(std::sqrt(r)),
          std::sqrt(r));
    }
    const double heat = std::exp(-t * r);
    const double damp = std::exp(-t);
    switch (rep) {
      case Representation::ModeSplit:
        return (heat * (a + b) - damp * (r * a + b)) / (1.0 - r);
      case Representation::DataSplit:
        return ((heat - r * damp) / (1.0 - r)) * a + ((heat - damp) / (1.0 - r)) * b;
      case Representation::ModeSplitHigh:
        return (damp * (r * a + b) - heat * (a + b)) / (r - 1.0);
      case Representation::Regularized:
      case Representation::Auto:
        break;
    }
    return damp * a + damped_heat_kernel(t, r) * (a + b);
  }

 private:
  InitialDatum u0_;
  InitialDatum u1_;
  InitialDatum v_;
  SpectralOptions options_;
};

/// F^v(xi) = v^(xi) / (1 - |xi|^2), off the unit sphere.
class SymbolFv {
 public:
  explicit SymbolFv(InitialDatum v, double singular_threshold = 1e-12)
      : v_(std::move(v)), threshold_(singular_threshold) {}

  const InitialDatum& datum() const noexcept { return v_; }

  Complex operator()(std::span<const double> xi) const {
    const double r = squared_norm(xi);
    if (std::abs(r - 1.0) <= threshold_) {
      throw SingularEvaluationError(
          "F^v is undefined on |xi| = 1 (|xi| = " + std::to_string(std::sqrt(r)) + ")",
          std::sqrt(r));
    }
    return v_.fourier(xi) / (1.0 - r);
  }

 private:
  InitialDatum v_;
  double threshold_;
};

inline Complex evaluate(const SpectralSolution& sol, double t, std::span<const double> xi,
                        Representation rep = Representation::Auto) {
  return sol.evaluate(t, xi, rep);
}

inline Complex evaluate_symbol_Fv(const SymbolFv& sym, std::span<const double> xi) {
  return sym(xi);
}

/// Heat flow e^{-t|xi|^2} v^(xi).
inline Complex evaluate_heat(const InitialDatum& v, double t, std::span<const double> xi) {
  if (t < 0.0) throw Error("evaluate_heat: t must be nonnegative");
  return std::exp(-t * squared_norm(xi)) * v.fourier(xi);
}

/// u^(t, xi) - P(xi) e^{-t|xi|^2}, the integrand of every residual norm.
inline Complex residual_vs_expansion(const SpectralSolution& sol, double t,
                                     std::span<const double> xi, const ExpansionPolynomial& p) {
  if (p.dimension() != sol.dimension()) throw Error("expansion dimension does not match solution");
  return sol.evaluate(t, xi) - p(xi) * std::exp(-t * squared_norm(xi));
}

}  // namespace dampex
