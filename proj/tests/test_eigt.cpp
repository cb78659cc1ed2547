#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "helm/eigt.hpp"
#include "test_util.hpp"

using namespace helm;
using helm::testing::from_vec;
using helm::testing::random_field;
using helm::testing::to_vec;
using Mat = Eigen::MatrixXcd;

namespace {

const double kK0 = std::sqrt(439.2);

std::vector<Grid3> small_grids(Placement p) {
  return {Grid3::cube(4, p), Grid3::cube(5, p), Grid3::cube(6, p), Grid3::box(4, 5, 6, p)};
}

Field3 dense_solve(const Grid3& g, const BoundaryCoeffs& bc, cplx k0, const Field3& y) {
  const Mat A = assemble_dense(SchemeOrder::Second, Medium::uniform(g, k0), bc);
  return from_vec(g, A.partialPivLu().solve(to_vec(y)));
}

}  // namespace

TEST(EigT, ConstructionAndDeterminism) {
  const auto g = Grid3::cube(16, Placement::Staggered);
  const auto bc = BoundaryCoeffs::staggered(g, kK0);
  const EigTPrecond a(g, bc, k0_profile_constant(16, kK0)), b(g, bc, k0_profile_constant(16, kK0));
  EXPECT_EQ(a.lines().fallback_lines(), 0u);
  EXPECT_TRUE(a.eig_x().V == b.eig_x().V);
  const Field3 y = random_field(g, 4);
  EXPECT_EQ(norms(a.solve(y), b.solve(y)).linf_abs, 0.0);
  EXPECT_EQ(a.name(), "eigt2");
}

TEST(EigT, BbarMatchesDefinition) {
  const auto g = Grid3::box(5, 6, 7, Placement::Collocated);
  const auto bc = BoundaryCoeffs::collocated(g, kK0);
  const EigTPrecond p(g, bc, k0_profile_constant(7, kK0));
  const double hz2 = g.h(2) * g.h(2);
  for (int i : {0, 2, 4})
    for (int j : {0, 5})
      for (int l : {0, 3, 6}) {
        const cplx expected = p.alpha(0) * p.eig_x().D(i) + p.alpha(1) * p.eig_y().D(j) + hz2 * kK0 * kK0 -
                              2.0 * (p.alpha(0) + p.alpha(1) + 1.0);
        EXPECT_NEAR(std::abs(p.bbar(i, j, l) - expected), 0.0, 1e-10);
      }
}

TEST(EigT, DirichletLimitUsesSineEigenvalues) {
  const auto g = Grid3::cube(6, Placement::Collocated);
  const EigTPrecond p(g, BoundaryCoeffs::dirichlet(), k0_profile_constant(6, 0.0));
  for (int i = 0; i < 6; ++i)
    EXPECT_NEAR(std::abs(p.eig_x().D(i) - 2.0 * std::cos(std::numbers::pi * (i + 1) / 7.0)), 0.0, 1e-14);
}

TEST(EigT, TransformsMatchKronecker) {
  const auto g = Grid3::box(4, 4, 3, Placement::Staggered);
  const EigTPrecond p(g, BoundaryCoeffs::staggered(g, kK0), k0_profile_constant(3, kK0));
  const Field3 y = random_field(g, 9);
  const Field3 yb = p.forward_transform(y);
  const Mat K = helm::testing::kron(p.eig_y().V_inv, p.eig_x().V_inv);
  for (int l = 0; l < 3; ++l) {
    Eigen::VectorXcd s(16);
    for (int k = 0; k < 16; ++k) s(k) = y.slice(l)[k];
    const Eigen::VectorXcd ref = K * s;
    for (int k = 0; k < 16; ++k) EXPECT_NEAR(std::abs(yb.slice(l)[k] - ref(k)), 0.0, 1e-12);
  }
  EXPECT_EQ(norm_inf(p.forward_transform(Field3(g)).values()), 0.0);
}

TEST(EigT, TransformRoundTrip) {
  const auto g = Grid3::cube(32, Placement::Collocated);
  const EigTPrecond p(g, BoundaryCoeffs::collocated(g, kK0), k0_profile_constant(32, kK0));
  const Field3 y = random_field(g, 2);
  EXPECT_LT(norms(p.inverse_transform(p.forward_transform(y)), y).linf_rel, 1e-10);
}

TEST(EigT, VerticalSolveResidual) {
  const auto g = Grid3::cube(8, Placement::Staggered);
  const EigTPrecond p(g, BoundaryCoeffs::staggered(g, kK0), k0_profile_constant(8, kK0));
  const Field3 y = random_field(g, 3);
  const Field3 u = p.vertical_solve(y);
  Field3 back(g);
  p.lines().multiply(u.values(), back.values());
  EXPECT_LT(norms(back, y).linf_rel, 1e-12);
}

TEST(EigT, SingleLayerVerticalSolve) {
  const auto g = Grid3::box(4, 5, 1, Placement::Staggered);
  const auto bc = BoundaryCoeffs::staggered(g, 3.0);
  const EigTPrecond p(g, bc, k0_profile_constant(1, 3.0));
  const Field3 y = random_field(g, 5);
  const Field3 u = p.vertical_solve(y);
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 4; ++i)
      EXPECT_NEAR(std::abs(u(i, j, 0) - y(i, j, 0) / (p.gamma(2) + p.bbar(i, j, 0))), 0.0, 1e-12);
}

TEST(EigT, LinesAreIndependent) {
  // Swapping the data of two lines swaps their solutions when the lines share coefficients.
  const std::size_t nl = 6;
  LineSystems ls(nl, 7, cplx(0.3, 0.1), 2.0, [](std::size_t, std::span<cplx> c) {
    std::fill(c.begin(), c.end(), cplx(-1.7, 0.2));
    return cplx(1.0);
  });
  const auto g = Grid3::box(6, 1, 7, Placement::Staggered);
  Field3 a = random_field(g, 1);
  Field3 b = a;
  for (int l = 0; l < 7; ++l) std::swap(b(1, 0, l), b(4, 0, l));
  ls.solve(a.values());
  ls.solve(b.values());
  for (int l = 0; l < 7; ++l) {
    EXPECT_EQ(a(1, 0, l), b(4, 0, l));
    EXPECT_EQ(a(4, 0, l), b(1, 0, l));
    EXPECT_EQ(a(0, 0, l), b(0, 0, l));
  }
}

TEST(EigT, ResonantLineIsReported) {
  // w = 1, c = 0 with gamma = 0, zeta = 1 on n = 3 is singular (eigenvalue 0 of the Dirichlet matrix).
  EXPECT_THROW(LineSystems(1, 3, 0.0, 1.0, [](std::size_t, std::span<cplx> c) {
                 std::fill(c.begin(), c.end(), cplx(0.0));
                 return cplx(1.0);
               }),
               ResonanceError);
}

TEST(EigT, MatchesDenseSolve) {
  for (auto place : {Placement::Staggered, Placement::Collocated})
    for (const auto& g : small_grids(place)) {
      const auto bc = BoundaryCoeffs::absorbing(g, kK0);
      const EigTPrecond p(g, bc, k0_profile_constant(g.nz(), kK0));
      const Field3 y = random_field(g, 6);
      EXPECT_LT(norms(p.solve(y), dense_solve(g, bc, kK0, y)).linf_rel, 1e-10);
    }
}

TEST(EigT, TwoSidedInverseOfSecondOrderOperator) {
  for (int n : {12, 33, 64}) {
    const auto g = Grid3::cube(n, n % 2 ? Placement::Collocated : Placement::Staggered);
    const auto bc = BoundaryCoeffs::absorbing(g, kK0);
    const auto m = Medium::uniform(g, kK0);
    const EigTPrecond p(g, bc, k0_profile_constant(n, kK0));
    const HelmholtzOperator A(SchemeOrder::Second, m, bc);
    const Field3 y = random_field(g, 8);
    EXPECT_LT(norms(A.apply(p.solve(y)), y).linf_rel, 1e-10);
    EXPECT_LT(norms(p.solve(A.apply(y)), y).linf_rel, 1e-10);
  }
}

TEST(EigT, HighOrderSymbolInvertsConstantCompactOperator) {
  for (auto order : {SchemeOrder::Fourth, SchemeOrder::Sixth}) {
    const auto g = Grid3::cube(9, Placement::Collocated);
    const auto bc = BoundaryCoeffs::collocated(g, 5.0);
    const EigTPrecond p(g, bc, k0_profile_constant(9, 5.0), order);
    const HelmholtzOperator A(order, Medium::uniform(g, 5.0), bc);
    const Field3 y = random_field(g, 10);
    EXPECT_LT(norms(A.apply(p.solve(y)), y).linf_rel, 1e-10);
  }
  const auto gb = Grid3::box(6, 7, 8, Placement::Staggered);
  const auto bcb = BoundaryCoeffs::staggered(gb, 4.0);
  const EigTPrecond p4(gb, bcb, k0_profile_constant(8, 4.0), SchemeOrder::Fourth);
  const HelmholtzOperator A4(SchemeOrder::Fourth, Medium::uniform(gb, 4.0), bcb);
  const Field3 y = random_field(gb, 12);
  EXPECT_LT(norms(A4.apply(p4.solve(y)), y).linf_rel, 1e-10);
}

TEST(EigT, LayeredProfileMatchesDense) {
  const auto g = Grid3::box(4, 5, 6, Placement::Staggered);
  std::vector<cplx> prof(6);
  for (int l = 0; l < 6; ++l) prof[l] = 3.0 + 0.5 * l;
  const auto bc = BoundaryCoeffs::staggered(g, 3.0);
  const EigTPrecond p(g, bc, prof);
  Medium m(g);
  m.k0 = 3.0;
  for (int l = 0; l < 6; ++l)
    for (int j = 0; j < 5; ++j)
      for (int i = 0; i < 4; ++i) m.k_sq(i, j, l) = prof[l] * prof[l];
  const Mat A = assemble_dense(SchemeOrder::Second, m, bc);
  const Field3 y = random_field(g, 13);
  EXPECT_LT(norms(p.solve(y), from_vec(g, A.partialPivLu().solve(to_vec(y)))).linf_rel, 1e-10);
}

TEST(EigT, TransformOpCountScaling) {
  std::vector<double> c;
  for (int n : {16, 32, 64}) {
    const auto g = Grid3::cube(n, Placement::Staggered);
    const EigTPrecond p(g, BoundaryCoeffs::staggered(g, kK0), k0_profile_constant(n, kK0));
    const double model = double(n) * n * n * (2.0 * n);
    c.push_back(double(p.transform_ops()) / model);
  }
  for (double v : c) EXPECT_NEAR(v / c[0], 1.0, 0.25);
}
