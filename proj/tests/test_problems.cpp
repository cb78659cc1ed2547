#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "helm/problems.hpp"

using namespace helm;

namespace {
const cplx I(0.0, 1.0);
}

TEST(Problems, PhiAtOrigin) {
  const AnalyticSeparable p;
  EXPECT_NEAR(std::abs(p.phi(0.0) - (std::exp(I * p.k0() * p.b) - 1.0)), 0.0, 1e-14);
  EXPECT_NEAR(p.k0(), std::sqrt(439.2), 1e-15);
}

TEST(Problems, ContinuumBoundaryCondition) {
  const AnalyticSeparable p;
  EXPECT_LT(p.boundary_residual(), 1e-12);
  // Outward normal derivative minus i k0 u on all six faces of the cube, at a few surface points.
  const double k = p.k0();
  for (double s : {0.13, 0.5, 0.91})
    for (double t : {0.07, 0.44}) {
      auto du = [&](int axis, double x, double y, double z) {
        const double c[3] = {x, y, z};
        cplx v = 1.0;
        for (int a = 0; a < 3; ++a) v *= p.phi(c[a], a == axis ? 1 : 0);
        return v;
      };
      for (int axis = 0; axis < 3; ++axis)
        for (double face : {0.0, 1.0}) {
          double c[3] = {s, t, s};
          c[axis] = face;
          const double sign = face == 0.0 ? -1.0 : 1.0;
          const cplx r = sign * du(axis, c[0], c[1], c[2]) - I * k * p.u(c[0], c[1], c[2]);
          EXPECT_LT(std::abs(r) / k, 1e-12);
        }
    }
}

TEST(Problems, SourceMatchesFiniteDifferences) {
  const AnalyticSeparable p;
  const double x = 0.31, y = 0.57, z = 0.72, e = 1e-3;
  // f = lap u + k0^2 u by a fourth-order difference of u.
  auto d2 = [&](int a) {
    auto u = [&](double s) {
      double c[3] = {x, y, z};
      c[a] += s;
      return p.u(c[0], c[1], c[2]);
    };
    return (-u(2 * e) + 16.0 * u(e) - 30.0 * u(0) + 16.0 * u(-e) - u(-2 * e)) / (12 * e * e);
  };
  const cplx f = d2(0) + d2(1) + d2(2) + p.k0_sq * p.u(x, y, z);
  EXPECT_LT(std::abs(f - p.f_derivative(x, y, z, 0, 0, 0)) / std::abs(f), 1e-6);
  // d/dx of f.
  const cplx fx = (p.f_derivative(x + e, y, z, 0, 0, 0) - p.f_derivative(x - e, y, z, 0, 0, 0)) / (2 * e);
  EXPECT_LT(std::abs(fx - p.f_derivative(x, y, z, 1, 0, 0)) / std::abs(fx), 1e-4);
}

TEST(Problems, AnalyticFieldsCallbacksAgreeWithSamples) {
  const AnalyticSeparable p;
  const auto g = Grid3::cube(9, Placement::Collocated);
  const auto f = analytic_fields(p, g);
  for (int l = 0; l < 9; l += 4)
    for (int j = 0; j < 9; j += 4)
      for (int i = 0; i < 9; i += 4) {
        const double x = g.coord(0, i), y = g.coord(1, j), z = g.coord(2, l);
        EXPECT_NEAR(std::abs(f.source.f(i, j, l) - f.source.value(x, y, z)), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(f.u_exact(i, j, l) - p.u(x, y, z)), 0.0, 1e-12);
      }
  EXPECT_TRUE(f.medium.constant);
  EXPECT_TRUE(f.source.laplacian && f.source.pure_fourth && f.source.mixed_fourth && f.source.grad);
}

TEST(Problems, RejectsInvalidWavenumber) { EXPECT_THROW(AnalyticSeparable(-1.0), Error); }

TEST(Problems, InclusionPointValues) {
  const SphericalInclusion p;
  EXPECT_EQ(p.k_sq(0.1, 0.1, 0.1), cplx(439.2));
  EXPECT_EQ(p.f(0.1, 0.1, 0.1), cplx(0.0));
  EXPECT_EQ(p.k_sq(0.5, 0.5, 0.7), cplx(1050.0, 2.26));
  EXPECT_TRUE(p.inside(0.6, 0.5, 0.7));   // on the sphere: inclusive comparison
  EXPECT_NE(p.f(0.5, 0.5, 0.7), cplx(0.0));
}

TEST(Problems, InclusionVolumeFraction) {
  const SphericalInclusion p;
  const auto g = Grid3::cube(100, Placement::Staggered);
  const auto f = inclusion_fields(p, g);
  std::size_t inside = 0, nonzero_f = 0;
  for (int l = 0; l < 100; ++l)
    for (int j = 0; j < 100; ++j)
      for (int i = 0; i < 100; ++i) {
        const bool in = p.inside(g.coord(0, i), g.coord(1, j), g.coord(2, l));
        inside += in;
        nonzero_f += f.source.f(i, j, l) != cplx(0.0);
        EXPECT_EQ(f.medium.k_sq(i, j, l), in ? p.k_sq_inside : cplx(439.2));
      }
  EXPECT_EQ(inside, nonzero_f);
  const double frac = double(inside) / g.size();
  const double ref = 4.0 / 3.0 * std::numbers::pi * 1e-3;
  EXPECT_NEAR(frac / ref, 1.0, 0.1);
  EXPECT_FALSE(f.medium.constant);
}
