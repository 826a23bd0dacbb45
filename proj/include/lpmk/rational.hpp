#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <stdexcept>
#include <vector>

/// Exact arithmetic layer: arbitrary-precision rationals, the quadratic
/// extension Q[sqrt(3)], and dense Gaussian elimination over any field.
/// Harmonicity, group closure, and rank decisions are made here so they do
/// not depend on floating-point tolerances.
namespace lpmk {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

/// Element a + b*sqrt(3) of Q[sqrt(3)]. A field: (a+b√3)(a−b√3) = a²−3b² ≠ 0
/// for nonzero elements since 3 is not a rational square.
struct QuadExt {
  Rational a{0};
  Rational b{0};

  QuadExt() = default;
  QuadExt(int v) : a(v) {}  // NOLINT: implicit by design, mirrors Rational
  QuadExt(Rational av) : a(std::move(av)) {}
  QuadExt(Rational av, Rational bv) : a(std::move(av)), b(std::move(bv)) {}

  static QuadExt sqrt3() { return QuadExt(Rational(0), Rational(1)); }

  bool is_zero() const { return a == 0 && b == 0; }

  friend QuadExt operator+(const QuadExt& x, const QuadExt& y) {
    return QuadExt(x.a + y.a, x.b + y.b);
  }
  friend QuadExt operator-(const QuadExt& x, const QuadExt& y) {
    return QuadExt(x.a - y.a, x.b - y.b);
  }
  friend QuadExt operator-(const QuadExt& x) { return QuadExt(-x.a, -x.b); }
  friend QuadExt operator*(const QuadExt& x, const QuadExt& y) {
    return QuadExt(x.a * y.a + 3 * x.b * y.b, x.a * y.b + x.b * y.a);
  }
  QuadExt inverse() const {
    const Rational norm = a * a - 3 * b * b;
    if (norm == 0) throw std::invalid_argument("QuadExt: division by zero");
    return QuadExt(a / norm, -b / norm);
  }
  friend QuadExt operator/(const QuadExt& x, const QuadExt& y) { return x * y.inverse(); }
  friend bool operator==(const QuadExt& x, const QuadExt& y) {
    return x.a == y.a && x.b == y.b;
  }
  friend bool operator!=(const QuadExt& x, const QuadExt& y) { return !(x == y); }

  QuadExt& operator+=(const QuadExt& y) { return *this = *this + y; }
  QuadExt& operator-=(const QuadExt& y) { return *this = *this - y; }
  QuadExt& operator*=(const QuadExt& y) { return *this = *this * y; }
};

inline double to_double(const QuadExt& q) {
  return to_double(q.a) + to_double(q.b) * 1.7320508075688772935;
}

template <class T>
struct FieldTraits {
  static bool is_zero(const T& v) { return v == T(0); }
};
template <>
struct FieldTraits<QuadExt> {
  static bool is_zero(const QuadExt& v) { return v.is_zero(); }
};

/// Dense matrix over a field, row-major.
template <class T>
using ExactMatrix = std::vector<std::vector<T>>;

/// Reduce M to row echelon form in place; returns pivot column indices.
template <class T>
std::vector<std::size_t> row_reduce(ExactMatrix<T>& m) {
  std::vector<std::size_t> pivots;
  if (m.empty()) return pivots;
  const std::size_t rows = m.size(), cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t sel = r;
    while (sel < rows && FieldTraits<T>::is_zero(m[sel][c])) ++sel;
    if (sel == rows) continue;
    std::swap(m[r], m[sel]);
    const T inv = T(1) / m[r][c];
    for (std::size_t j = c; j < cols; ++j) m[r][j] = m[r][j] * inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || FieldTraits<T>::is_zero(m[i][c])) continue;
      const T f = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] = m[i][j] - f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

/// Basis of the right nullspace of M (each vector has length = #cols).
template <class T>
ExactMatrix<T> nullspace(ExactMatrix<T> m) {
  if (m.empty()) return {};
  const std::size_t cols = m[0].size();
  const std::vector<std::size_t> pivots = row_reduce(m);
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : pivots) is_pivot[c] = true;
  ExactMatrix<T> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<T> v(cols, T(0));
    v[free] = T(1);
    for (std::size_t r = 0; r < pivots.size(); ++r) {
      v[pivots[r]] = -m[r][free];
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Exact inverse via Gauss-Jordan; throws on singular input.
template <class T>
ExactMatrix<T> invert(ExactMatrix<T> m) {
  const std::size_t d = m.size();
  for (auto& row : m) {
    if (row.size() != d) throw std::invalid_argument("invert: non-square matrix");
    row.resize(2 * d, T(0));
  }
  for (std::size_t i = 0; i < d; ++i) m[i][d + i] = T(1);
  const auto pivots = row_reduce(m);
  if (pivots.size() != d || pivots.back() != d - 1)
    throw std::invalid_argument("invert: singular matrix");
  ExactMatrix<T> out(d, std::vector<T>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out[i][j] = m[i][d + j];
  return out;
}

/// Matrix product.
template <class T>
ExactMatrix<T> matmul(const ExactMatrix<T>& x, const ExactMatrix<T>& y) {
  const std::size_t r = x.size(), k = y.size(), c = y.empty() ? 0 : y[0].size();
  ExactMatrix<T> out(r, std::vector<T>(c, T(0)));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (FieldTraits<T>::is_zero(x[i][l])) continue;
      for (std::size_t j = 0; j < c; ++j) out[i][j] += x[i][l] * y[l][j];
    }
  return out;
}

/// Exact determinant by fraction-free-ish elimination over the field.
template <class T>
T determinant(ExactMatrix<T> m) {
  const std::size_t d = m.size();
  T det = T(1);
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t sel = c;
    while (sel < d && FieldTraits<T>::is_zero(m[sel][c])) ++sel;
    if (sel == d) return T(0);
    if (sel != c) {
      std::swap(m[c], m[sel]);
      det = -det;
    }
    det *= m[c][c];
    const T inv = T(1) / m[c][c];
    for (std::size_t i = c + 1; i < d; ++i) {
      const T f = m[i][c] * inv;
      if (FieldTraits<T>::is_zero(f)) continue;
      for (std::size_t j = c; j < d; ++j) m[i][j] = m[i][j] - f * m[c][j];
    }
  }
  return det;
}

/// (2k-1)!! as an exact rational (k >= 0; empty product = 1).
inline Rational double_factorial_odd(int k) {
  Rational out = 1;
  for (int i = 1; i <= k; ++i) out *= 2 * i - 1;
  return out;
}

}  // namespace lpmk
