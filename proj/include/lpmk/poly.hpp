#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "lpmk/rational.hpp"

/// Dense polynomials in 1-3 variables over an arbitrary commutative ring
/// (double, Rational, QuadExt). Coefficients are stored for every monomial of
/// total degree <= deg in a canonical order with closed-form indexing, so
/// products and compositions never need hash lookups.
///
/// Homogeneous polynomials (solid harmonics, simplex witnesses) are the
/// special case where only the top-degree block is populated; harmonicity and
/// symmetry decisions are made on Rational/QuadExt instances, after which the
/// polynomial is converted to double for grid evaluation.
namespace lpmk {

using Exponent = std::array<int, 3>;  // trailing entries zero for dim < 3

inline int exponent_degree(const Exponent& e) { return e[0] + e[1] + e[2]; }

/// Number of monomials of total degree <= deg in `dim` variables.
inline std::size_t monomial_count(int dim, int deg) {
  const std::size_t k = static_cast<std::size_t>(deg);
  switch (dim) {
    case 1: return k + 1;
    case 2: return (k + 1) * (k + 2) / 2;
    case 3: return (k + 1) * (k + 2) * (k + 3) / 6;
    default: throw std::invalid_argument("monomial_count: dim must be 1..3");
  }
}

/// Canonical index of a monomial: blocks by total degree m, then a fixed
/// within-block order (first exponent descending, then second descending).
inline std::size_t monomial_index(int dim, const Exponent& e) {
  const int a = e[0], b = e[1], c = e[2];
  switch (dim) {
    case 1:
      return static_cast<std::size_t>(a);
    case 2: {
      const int m = a + b;
      return static_cast<std::size_t>(m) * (m + 1) / 2 + b;
    }
    case 3: {
      const int m = a + b + c;
      const int t = b + c;
      return static_cast<std::size_t>(m) * (m + 1) * (m + 2) / 6 +
             static_cast<std::size_t>(t) * (t + 1) / 2 + (t - b);
    }
    default:
      throw std::invalid_argument("monomial_index: dim must be 1..3");
  }
}

/// Exponent tuples for all monomials with degree <= deg, in index order.
inline std::vector<Exponent> monomial_exponents(int dim, int deg) {
  std::vector<Exponent> out;
  out.reserve(monomial_count(dim, deg));
  for (int m = 0; m <= deg; ++m) {
    if (dim == 1) {
      out.push_back({m, 0, 0});
    } else if (dim == 2) {
      for (int a = m; a >= 0; --a) out.push_back({a, m - a, 0});
    } else {
      for (int a = m; a >= 0; --a)
        for (int b = m - a; b >= 0; --b) out.push_back({a, b, m - a - b});
    }
  }
  return out;
}

template <class T>
class Poly {
 public:
  Poly() : dim_(1), deg_(0), c_(1, T(0)) {}
  Poly(int dim, int deg)
      : dim_(dim), deg_(deg), c_(monomial_count(dim, deg), T(0)) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("Poly: dim must be 1..3");
    if (deg < 0) throw std::invalid_argument("Poly: negative degree");
  }

  static Poly constant(int dim, T value) {
    Poly p(dim, 0);
    p.c_[0] = std::move(value);
    return p;
  }
  static Poly monomial(int dim, const Exponent& e, T coeff) {
    Poly p(dim, exponent_degree(e));
    p.set(e, std::move(coeff));
    return p;
  }

  int dim() const { return dim_; }
  int degree() const { return deg_; }
  const std::vector<T>& coefficients() const { return c_; }

  const T& get(const Exponent& e) const {
    if (exponent_degree(e) > deg_) {
      static const T zero(0);
      return zero;
    }
    return c_[monomial_index(dim_, e)];
  }
  void set(const Exponent& e, T v) {
    if (exponent_degree(e) > deg_)
      throw std::invalid_argument("Poly::set: exponent exceeds degree bound");
    c_[monomial_index(dim_, e)] = std::move(v);
  }
  void add_term(const Exponent& e, const T& v) {
    if (exponent_degree(e) > deg_)
      throw std::invalid_argument("Poly::add_term: exponent exceeds degree bound");
    c_[monomial_index(dim_, e)] += v;
  }

  /// Iterate (exponent, coefficient) pairs, skipping exact zeros.
  template <class F>
  void for_each_term(F&& fn) const {
    const auto exps = monomial_exponents(dim_, deg_);
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (FieldTraits<T>::is_zero(c_[i])) continue;
      fn(exps[i], c_[i]);
    }
  }

  bool is_zero() const {
    for (const auto& v : c_)
      if (!FieldTraits<T>::is_zero(v)) return false;
    return true;
  }

  /// True if every nonzero monomial has full degree == degree().
  bool is_homogeneous() const {
    bool ok = true;
    for_each_term([&](const Exponent& e, const T&) {
      if (exponent_degree(e) != deg_) ok = false;
    });
    return ok;
  }

  T eval(const std::array<T, 3>& x) const {
    // Horner-free dense evaluation via cached power tables; degrees stay
    // small enough (<= ~48) that this is both fast and accurate.
    std::array<std::vector<T>, 3> pw;
    for (int v = 0; v < dim_; ++v) {
      pw[v].resize(deg_ + 1);
      pw[v][0] = T(1);
      for (int k = 1; k <= deg_; ++k) pw[v][k] = pw[v][k - 1] * x[v];
    }
    T acc(0);
    for_each_term([&](const Exponent& e, const T& coeff) {
      T term = coeff;
      for (int v = 0; v < dim_; ++v)
        if (e[v] > 0) term *= pw[v][e[v]];
      acc += term;
    });
    return acc;
  }

  Poly derivative(int axis) const {
    if (axis < 0 || axis >= dim_) throw std::invalid_argument("Poly::derivative: bad axis");
    Poly out(dim_, deg_ > 0 ? deg_ - 1 : 0);
    for_each_term([&](const Exponent& e, const T& coeff) {
      if (e[axis] == 0) return;
      Exponent d = e;
      d[axis] -= 1;
      out.add_term(d, coeff * T(e[axis]));
    });
    return out;
  }

  Poly laplacian() const {
    Poly out(dim_, deg_ > 1 ? deg_ - 2 : 0);
    for (int v = 0; v < dim_; ++v) {
      const Poly second = derivative(v).derivative(v);
      second.for_each_term([&](const Exponent& e, const T& coeff) { out.add_term(e, coeff); });
    }
    return out;
  }

  friend Poly operator+(const Poly& p, const Poly& q) {
    if (p.dim_ != q.dim_) throw std::invalid_argument("Poly+: dimension mismatch");
    Poly out(p.dim_, std::max(p.deg_, q.deg_));
    p.for_each_term([&](const Exponent& e, const T& c) { out.add_term(e, c); });
    q.for_each_term([&](const Exponent& e, const T& c) { out.add_term(e, c); });
    return out;
  }
  friend Poly operator-(const Poly& p, const Poly& q) { return p + (q * T(-1)); }
  friend Poly operator*(const Poly& p, const T& s) {
    Poly out = p;
    for (auto& v : out.c_) v *= s;
    return out;
  }
  friend Poly operator*(const T& s, const Poly& p) { return p * s; }
  friend Poly operator*(const Poly& p, const Poly& q) {
    if (p.dim_ != q.dim_) throw std::invalid_argument("Poly*: dimension mismatch");
    Poly out(p.dim_, p.deg_ + q.deg_);
    p.for_each_term([&](const Exponent& ep, const T& cp) {
      q.for_each_term([&](const Exponent& eq, const T& cq) {
        const Exponent e{ep[0] + eq[0], ep[1] + eq[1], ep[2] + eq[2]};
        out.add_term(e, cp * cq);
      });
    });
    return out;
  }

  /// P(M y): substitute x_i = sum_j M[i][j] y_j (square dim x dim matrix).
  Poly compose_linear(const std::vector<std::vector<T>>& m) const {
    if (static_cast<int>(m.size()) != dim_)
      throw std::invalid_argument("compose_linear: matrix dimension mismatch");
    std::vector<Poly> rows;
    rows.reserve(dim_);
    for (int i = 0; i < dim_; ++i) {
      Poly row(dim_, 1);
      for (int j = 0; j < dim_; ++j) {
        Exponent e{0, 0, 0};
        e[j] = 1;
        row.add_term(e, m[i][j]);
      }
      rows.push_back(std::move(row));
    }
    Poly out(dim_, deg_);
    for_each_term([&](const Exponent& e, const T& coeff) {
      Poly term = Poly::constant(dim_, coeff);
      for (int v = 0; v < dim_; ++v)
        for (int k = 0; k < e[v]; ++k) term = term * rows[v];
      term.for_each_term([&](const Exponent& te, const T& tc) { out.add_term(te, tc); });
    });
    return out;
  }

  /// Substitute the last variable by the constant `value`, producing a
  /// polynomial in dim-1 variables (the chart dehomogenization step).
  Poly substitute_last(const T& value) const {
    if (dim_ < 2) throw std::invalid_argument("substitute_last: need dim >= 2");
    Poly out(dim_ - 1, deg_);
    std::vector<T> pw(deg_ + 1);
    pw[0] = T(1);
    for (int k = 1; k <= deg_; ++k) pw[k] = pw[k - 1] * value;
    const int last = dim_ - 1;
    for_each_term([&](const Exponent& e, const T& coeff) {
      Exponent r = e;
      const int k = r[last];
      r[last] = 0;
      out.add_term(r, coeff * pw[k]);
    });
    return out;
  }

  template <class U>
  Poly<U> convert() const {
    Poly<U> out(dim_, deg_);
    const auto exps = monomial_exponents(dim_, deg_);
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (FieldTraits<T>::is_zero(c_[i])) continue;
      out.add_term(exps[i], static_cast<U>(to_double(c_[i])));
    }
    return out;
  }

 private:
  int dim_;
  int deg_;
  std::vector<T> c_;
};

// double coefficients convert trivially.
template <>
template <>
inline Poly<double> Poly<double>::convert<double>() const {
  return *this;
}

inline double to_double(double v) { return v; }

/// Exact normalized sphere average of a monomial: (1/alpha_n) * integral over
/// S^{dim-1} of y^e dsigma. Zero when any exponent is odd; otherwise
/// prod_i (e_i - 1)!! / prod_{k=0}^{|e|/2-1} (dim + 2k).
inline Rational sphere_monomial_average(int dim, const Exponent& e) {
  for (int v = 0; v < 3; ++v)
    if (e[v] % 2 != 0) return Rational(0);
  Rational num = 1;
  for (int v = 0; v < 3; ++v) num *= double_factorial_odd(e[v] / 2);
  Rational den = 1;
  const int half = exponent_degree(e) / 2;
  for (int k = 0; k < half; ++k) den *= dim + 2 * k;
  return num / den;
}

/// Exact normalized sphere average of a polynomial with exact coefficients.
template <class T>
T sphere_average(const Poly<T>& p) {
  T acc(0);
  const int dim = p.dim();
  p.for_each_term([&](const Exponent& e, const T& coeff) {
    const Rational w = sphere_monomial_average(dim, e);
    if (w == 0) return;
    acc += coeff * T(w);
  });
  return acc;
}

// For QuadExt, Rational weights need lifting into the extension field.
template <>
inline QuadExt sphere_average<QuadExt>(const Poly<QuadExt>& p) {
  QuadExt acc;
  const int dim = p.dim();
  p.for_each_term([&](const Exponent& e, const QuadExt& coeff) {
    const Rational w = sphere_monomial_average(dim, e);
    if (w == 0) return;
    acc += coeff * QuadExt(w);
  });
  return acc;
}

}  // namespace lpmk
