#include "helm/problems.hpp"

#include <cmath>

namespace helm {

namespace {
const cplx I(0.0, 1.0);
}

AnalyticSeparable::AnalyticSeparable(double k0_sq_, double a_, double b_) : k0_sq(k0_sq_), a(a_), b(b_) {
  if (!(k0_sq > 0.0)) throw Error("AnalyticSeparable: k0^2 must be positive");
  if (boundary_residual() > 1e-12) throw Error("AnalyticSeparable: phi violates the boundary condition");
}

double AnalyticSeparable::k0() const { return std::sqrt(k0_sq); }

cplx AnalyticSeparable::phi(double x, int m) const {
  const double k = k0();
  const cplx ep = std::exp(I * k * (x - a)), em = std::exp(-I * k * (x - b));
  if (m == 0) return ep + em - 2.0;
  return std::pow(I * k, m) * ep + std::pow(-I * k, m) * em;
}

cplx AnalyticSeparable::u(double x, double y, double z) const { return phi(x) * phi(y) * phi(z); }

cplx AnalyticSeparable::f_derivative(double x, double y, double z, int qx, int qy, int qz) const {
  // f = phi'' phi phi + phi phi'' phi + phi phi phi'' + k0^2 phi phi phi
  const int terms[4][3] = {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}, {0, 0, 0}};
  const double coef[4] = {1.0, 1.0, 1.0, k0_sq};
  cplx s = 0.0;
  for (int t = 0; t < 4; ++t)
    s += coef[t] * phi(x, terms[t][0] + qx) * phi(y, terms[t][1] + qy) * phi(z, terms[t][2] + qz);
  return s;
}

double AnalyticSeparable::boundary_residual() const {
  const double k = k0();
  const double left = std::abs(phi(a, 1) + I * k * phi(a)) / k;
  const double right = std::abs(phi(b, 1) - I * k * phi(b)) / k;
  return std::max(left, right);
}

AnalyticFields analytic_fields(const AnalyticSeparable& p, const Grid3& grid) {
  const double k0 = p.k0();
  AnalyticFields out{Field3(grid), Medium::uniform(grid, k0), Source(grid), {}};
  out.exact = [p](double x, double y, double z) { return p.u(x, y, z); };
  out.u_exact = Field3::sample(grid, out.exact);
  Source& s = out.source;
  s.value = [p](double x, double y, double z) { return p.f_derivative(x, y, z, 0, 0, 0); };
  s.f = Field3::sample(grid, s.value);
  s.grad = [p](double x, double y, double z) {
    return std::array<cplx, 3>{p.f_derivative(x, y, z, 1, 0, 0), p.f_derivative(x, y, z, 0, 1, 0),
                               p.f_derivative(x, y, z, 0, 0, 1)};
  };
  s.laplacian = [p](double x, double y, double z) {
    return p.f_derivative(x, y, z, 2, 0, 0) + p.f_derivative(x, y, z, 0, 2, 0) + p.f_derivative(x, y, z, 0, 0, 2);
  };
  s.pure_fourth = [p](double x, double y, double z) {
    return p.f_derivative(x, y, z, 4, 0, 0) + p.f_derivative(x, y, z, 0, 4, 0) + p.f_derivative(x, y, z, 0, 0, 4);
  };
  s.mixed_fourth = [p](double x, double y, double z) {
    return p.f_derivative(x, y, z, 2, 2, 0) + p.f_derivative(x, y, z, 2, 0, 2) + p.f_derivative(x, y, z, 0, 2, 2);
  };
  return out;
}

double SphericalInclusion::k0() const { return std::sqrt(k0_sq); }

bool SphericalInclusion::inside(double x, double y, double z) const {
  const double dx = x - center[0], dy = y - center[1], dz = z - center[2];
  return dx * dx + dy * dy + dz * dz <= radius * radius;
}

cplx SphericalInclusion::k_sq(double x, double y, double z) const {
  return inside(x, y, z) ? k_sq_inside : cplx(k0_sq);
}

cplx SphericalInclusion::f(double x, double y, double z) const {
  return -(k_sq(x, y, z) - k0_sq) * std::exp(I * k0() * z);
}

InclusionFields inclusion_fields(const SphericalInclusion& p, const Grid3& grid) {
  InclusionFields out{Medium(grid), Source(grid)};
  out.medium.k0 = p.k0();
  out.medium.constant = false;
  out.medium.k_sq_at = [p](double x, double y, double z) { return p.k_sq(x, y, z); };
  out.medium.k_sq = Field3::sample(grid, out.medium.k_sq_at);
  out.source.value = [p](double x, double y, double z) { return p.f(x, y, z); };
  out.source.f = Field3::sample(grid, out.source.value);
  return out;
}

}  // namespace helm
