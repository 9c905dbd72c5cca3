#pragma once

#include <array>
#include <cmath>
#include <cassert>
#include <compare>
#include <complex>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dampex/error.hpp"

namespace dampex {

inline constexpr int kMaxDimension = 3;

/// alpha in N_0^n for n <= 3.
class MultiIndex {
 public:
  MultiIndex() = default;

  explicit MultiIndex(int dimension) : dim_(dimension) {
    if (dimension < 1 || dimension > kMaxDimension) {
      throw Error("multi-index dimension must be in 1..3, got " +
                  std::to_string(dimension));
    }
  }

  MultiIndex(std::initializer_list<int> entries)
      : MultiIndex(static_cast<int>(entries.size())) {
    int j = 0;
    for (int e : entries) set(j++, e);
  }

  static MultiIndex from_span(std::span<const int> entries) {
    MultiIndex a(static_cast<int>(entries.size()));
    for (int j = 0; j < a.dim_; ++j) a.set(j, entries[j]);
    return a;
  }

  static MultiIndex unit(int dimension, int axis, int power = 1) {
    MultiIndex a(dimension);
    a.set(axis, power);
    return a;
  }

  int dimension() const noexcept { return dim_; }
  int operator[](int j) const noexcept { return idx_[j]; }

  void set(int j, int value) {
    if (value < 0) throw Error("multi-index entries must be nonnegative");
    idx_[j] = value;
  }

  /// |alpha|
  int order() const noexcept {
    return std::accumulate(idx_.begin(), idx_.begin() + dim_, 0);
  }

  /// alpha!
  double factorial() const noexcept {
    double f = 1.0;
    for (int j = 0; j < dim_; ++j)
      for (int m = 2; m <= idx_[j]; ++m) f *= m;
    return f;
  }

  bool all_even() const noexcept {
    for (int j = 0; j < dim_; ++j)
      if (idx_[j] % 2 != 0) return false;
    return true;
  }

  MultiIndex operator+(const MultiIndex& other) const {
    assert(dim_ == other.dim_);
    MultiIndex r(dim_);
    for (int j = 0; j < dim_; ++j) r.idx_[j] = idx_[j] + other.idx_[j];
    return r;
  }

  MultiIndex doubled() const { return *this + *this; }

  /// Componentwise alpha <= other.
  bool fits_in(const MultiIndex& other) const noexcept {
    for (int j = 0; j < dim_; ++j)
      if (idx_[j] > other.idx_[j]) return false;
    return true;
  }

  std::vector<int> to_vector() const {
    return {idx_.begin(), idx_.begin() + dim_};
  }

  std::string to_string() const {
    std::string s = "(";
    for (int j = 0; j < dim_; ++j) {
      if (j) s += ",";
      s += std::to_string(idx_[j]);
    }
    return s + ")";
  }

  auto operator<=>(const MultiIndex&) const = default;

 private:
  std::array<int, kMaxDimension> idx_{};
  int dim_ = 0;
};

/// Every alpha with |alpha| = order, in descending lexicographic order.
inline std::vector<MultiIndex> indices_of_order(int dimension, int order) {
  std::vector<MultiIndex> out;
  if (order < 0) return out;
  MultiIndex a(dimension);
  // Recursive fill over axes.
  auto fill = [&](auto&& self, int axis, int remaining) -> void {
    if (axis == dimension - 1) {
      a.set(axis, remaining);
      out.push_back(a);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      a.set(axis, e);
      self(self, axis + 1, remaining - e);
    }
  };
  fill(fill, 0, order);
  return out;
}

/// Every alpha with |alpha| <= order, graded by |alpha|.
inline std::vector<MultiIndex> indices_up_to(int dimension, int order) {
  std::vector<MultiIndex> out;
  for (int m = 0; m <= order; ++m) {
    auto level = indices_of_order(dimension, m);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

/// x^alpha
inline double monomial(const MultiIndex& alpha, std::span<const double> x) {
  double r = 1.0;
  for (int j = 0; j < alpha.dimension(); ++j)
    for (int m = 0; m < alpha[j]; ++m) r *= x[j];
  return r;
}

/// i^m, exact.
inline std::complex<double> i_power(int m) {
  switch (((m % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

inline double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

/// Floor of a real exponent, the integer part used to pick expansion orders.
inline int integer_part(double gamma) {
  return static_cast<int>(std::floor(gamma));
}

}  // namespace dampex
