#pragma once

#include <array>

#include "helm/stencil.hpp"

namespace helm {

// u = phi(x) phi(y) phi(z), phi(x) = exp(i k0 (x - a)) + exp(-i k0 (x - b)) - 2,
// which satisfies the Sommerfeld-like condition at x = a and x = b.
struct AnalyticSeparable {
  double k0_sq = 439.2;
  double a = 0.0;
  double b = 1.0;

  AnalyticSeparable() = default;
  AnalyticSeparable(double k0_sq, double a = 0.0, double b = 1.0);

  double k0() const;
  cplx phi(double x, int derivative = 0) const;
  cplx u(double x, double y, double z) const;
  // Derivative d^qx/dx d^qy/dy d^qz/dz of f = grad^2 u + k0^2 u.
  cplx f_derivative(double x, double y, double z, int qx, int qy, int qz) const;
  // max over both faces of |phi'(a) + i k0 phi(a)| and |phi'(b) - i k0 phi(b)|, scaled by k0.
  double boundary_residual() const;
};

struct AnalyticFields {
  Field3 u_exact;
  Medium medium;
  Source source;
  PointFn exact;
};

AnalyticFields analytic_fields(const AnalyticSeparable& p, const Grid3& grid);

// k^2 = k_inside inside the ball, k0^2 outside; source -(k^2 - k0^2) exp(i k0 z).
struct SphericalInclusion {
  std::array<double, 3> center{0.5, 0.5, 0.7};
  double radius = 0.1;
  cplx k_sq_inside{1050.0, 2.26};
  double k0_sq = 439.2;

  double k0() const;
  bool inside(double x, double y, double z) const;
  cplx k_sq(double x, double y, double z) const;
  cplx f(double x, double y, double z) const;
};

struct InclusionFields {
  Medium medium;
  Source source;
};

InclusionFields inclusion_fields(const SphericalInclusion& p, const Grid3& grid);

}  // namespace helm
