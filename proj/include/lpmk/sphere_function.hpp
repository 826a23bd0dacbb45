#pragma once

#include <array>

#include "lpmk/poly.hpp"

/// Scalar fields on S^n with tangential gradients, the common currency of the
/// Monge-Ampere right-hand sides: constants, polynomial restrictions, and the
/// specially constructed insolvability weights.
namespace lpmk {

class SphereFunction {
 public:
  virtual ~SphereFunction() = default;
  virtual int n() const = 0;
  /// Value at a unit vector X (n+1 components).
  virtual double value(const double* X) const = 0;
  /// Tangential gradient at X, written as n+1 ambient components.
  virtual void gradient(const double* X, double* out) const = 0;
};

class ConstantFunction final : public SphereFunction {
 public:
  ConstantFunction(int n, double value) : n_(n), value_(value) {}
  int n() const override { return n_; }
  double value(const double*) const override { return value_; }
  void gradient(const double*, double* out) const override {
    for (int v = 0; v <= n_; ++v) out[v] = 0.0;
  }

 private:
  int n_;
  double value_;
};

/// Restriction of a polynomial in n+1 ambient variables; the tangential
/// gradient is the ambient gradient minus its radial component.
class PolynomialFunction final : public SphereFunction {
 public:
  explicit PolynomialFunction(Poly<double> p);
  int n() const override { return p_.dim() - 1; }
  double value(const double* X) const override;
  void gradient(const double* X, double* out) const override;

 private:
  Poly<double> p_;
  std::array<Poly<double>, 3> dp_;
};

}  // namespace lpmk
