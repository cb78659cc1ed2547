#include <gtest/gtest.h>

#include <cmath>

#include "helm/problems.hpp"
#include "helm/stencil.hpp"
#include "test_util.hpp"

using namespace helm;
using helm::testing::random_field;
using helm::testing::kron;
using helm::testing::to_vec;

namespace {

using Mat = Eigen::MatrixXcd;

// Closed 1D second difference with ghost U_{-1} = gamma U_0 + (zeta - 1) U_1.
Mat second_1d(int n, double h, cplx gamma, cplx zeta) {
  Mat m = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = -2.0;
    if (i > 0) m(i, i - 1) = 1.0;
    if (i + 1 < n) m(i, i + 1) = 1.0;
  }
  m(0, 0) += gamma;
  m(n - 1, n - 1) += gamma;
  m(0, 1) += zeta - 1.0;
  m(n - 1, n - 2) += zeta - 1.0;
  return m / (h * h);
}

Mat first_1d(int n, double h, cplx gamma, cplx zeta) {
  Mat m = Mat::Zero(n, n);
  for (int i = 1; i + 1 < n; ++i) {
    m(i, i - 1) = -1.0;
    m(i, i + 1) = 1.0;
  }
  m(0, 0) = -gamma;
  m(0, 1) = 2.0 - zeta;
  m(n - 1, n - 1) = gamma;
  m(n - 1, n - 2) = zeta - 2.0;
  return m / (2.0 * h);
}

struct Kron3 {
  Mat Dx, Dy, Dz, dx, dy, dz, I;
};

Kron3 kron_ops(const Grid3& g, const BoundaryCoeffs& bc) {
  const int nx = g.nx(), ny = g.ny(), nz = g.nz();
  auto Ix = Mat::Identity(nx, nx), Iy = Mat::Identity(ny, ny), Iz = Mat::Identity(nz, nz);
  Kron3 k;
  k.Dx = kron(Iz, kron(Iy, second_1d(nx, g.h(0), bc.gamma[0], bc.zeta[0])));
  k.Dy = kron(Iz, kron(second_1d(ny, g.h(1), bc.gamma[1], bc.zeta[1]), Ix));
  k.Dz = kron(second_1d(nz, g.h(2), bc.gamma[2], bc.zeta[2]), kron(Iy, Ix));
  k.dx = kron(Iz, kron(Iy, first_1d(nx, g.h(0), bc.gamma[0], bc.zeta[0])));
  k.dy = kron(Iz, kron(first_1d(ny, g.h(1), bc.gamma[1], bc.zeta[1]), Ix));
  k.dz = kron(first_1d(nz, g.h(2), bc.gamma[2], bc.zeta[2]), kron(Iy, Ix));
  k.I = Mat::Identity(g.size(), g.size());
  return k;
}

Mat diag_of(const Field3& f) { return helm::testing::to_vec(f).asDiagonal(); }

// Independent Kronecker-algebra assembly of the three schemes.
Mat kron_operator(SchemeOrder order, const Medium& med, const BoundaryCoeffs& bc) {
  const Grid3& g = med.grid();
  const auto k = kron_ops(g, bc);
  const Mat K = diag_of(med.k_sq);
  const double hx2 = g.h(0) * g.h(0), hy2 = g.h(1) * g.h(1), hz2 = g.h(2) * g.h(2);
  const Mat S = k.Dx + k.Dy + k.Dz;
  if (order == SchemeOrder::Second) return hz2 * (S + K);
  if (order == SchemeOrder::Fourth)
    return hz2 * (S + (hx2 + hy2) / 12.0 * k.Dx * k.Dy + (hx2 + hz2) / 12.0 * k.Dx * k.Dz +
                  (hy2 + hz2) / 12.0 * k.Dy * k.Dz + (k.I + hx2 / 12.0 * k.Dx + hy2 / 12.0 * k.Dy + hz2 / 12.0 * k.Dz) * K);
  const double h2 = hx2, h4 = h2 * h2;
  const Mat P = k.Dx * k.Dy + k.Dx * k.Dz + k.Dy * k.Dz;
  Mat A = (k.I + h2 / 30.0 * K) * S + h4 / 30.0 * k.Dx * k.Dy * k.Dz + K + h2 / 6.0 * (k.I + h2 / 15.0 * K) * P -
          h2 / 20.0 * K * K;
  if (!med.constant) {
    Field3 gx(g), gy(g), gz(g), lap(g);
    for (int l = 0; l < g.nz(); ++l)
      for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
          const double x = g.coord(0, i), y = g.coord(1, j), z = g.coord(2, l);
          const auto d = med.grad_k_sq(x, y, z);
          gx(i, j, l) = d[0];
          gy(i, j, l) = d[1];
          gz(i, j, l) = d[2];
          lap(i, j, l) = med.lap_k_sq(x, y, z);
        }
    const Mat G[3] = {diag_of(gx), diag_of(gy), diag_of(gz)};
    const Mat* d1[3] = {&k.dx, &k.dy, &k.dz};
    const Mat* d2[3] = {&k.Dx, &k.Dy, &k.Dz};
    Mat corr = diag_of(lap);
    for (int a = 0; a < 3; ++a)
      corr += 2.0 * G[a] * ((k.I + h2 / 6.0 * K) * (*d1[a]) + h2 / 6.0 * (*d1[a]) * (S - *d2[a]));
    A += h2 / 20.0 * corr;
  }
  return h2 * A;
}

Medium smooth_medium(const Grid3& g) {
  Medium m(g);
  m.k0 = 3.0;
  m.constant = false;
  m.k_sq_at = [](double x, double y, double z) { return cplx(9.0 + x * x + 2.0 * y - z * z * z, 0.5 * x * z); };
  m.grad_k_sq = [](double x, double, double z) {
    return std::array<cplx, 3>{cplx(2.0 * x, 0.5 * z), cplx(2.0, 0.0), cplx(-3.0 * z * z, 0.5 * x)};
  };
  m.lap_k_sq = [](double, double, double z) { return cplx(2.0 - 6.0 * z, 0.0); };
  m.k_sq = Field3::sample(g, m.k_sq_at);
  return m;
}

std::vector<BoundaryCoeffs> closures(const Grid3& g) {
  return {BoundaryCoeffs::staggered(g, 3.0), BoundaryCoeffs::collocated(g, 3.0), BoundaryCoeffs::dirichlet(),
          BoundaryCoeffs::custom({cplx(0.3, 0.1), cplx(-0.2, 0.4), cplx(0.1, -0.5)}, {cplx(1.5), cplx(2.0), cplx(0.7, 0.2)})};
}

}  // namespace

TEST(Stencil, ZeroFieldMapsToZero) {
  const auto g = Grid3::cube(5, Placement::Collocated);
  const auto m = Medium::uniform(g, 4.0);
  for (auto o : {SchemeOrder::Second, SchemeOrder::Fourth, SchemeOrder::Sixth}) {
    const Field3 out = apply_operator(o, m, BoundaryCoeffs::staggered(g, 4.0), Field3(g));
    EXPECT_EQ(norm_inf(out.values()), 0.0);
  }
}

TEST(Stencil, SecondDifferenceOfQuadraticIsExact) {
  const auto g = Grid3::cube(7, Placement::Collocated);
  const auto m = Medium::uniform(g, 0.0);
  const Field3 u = Field3::sample(g, [](double x, double, double) { return cplx(x * x); });
  const Field3 out = apply_operator(SchemeOrder::Second, m, BoundaryCoeffs::dirichlet(), u);
  const double hz2 = g.h(2) * g.h(2);
  for (int l = 1; l < 6; ++l)
    for (int j = 1; j < 6; ++j)
      for (int i = 1; i < 6; ++i) EXPECT_NEAR(std::abs(out(i, j, l) / hz2 - 2.0), 0.0, 1e-10);
}

TEST(Stencil, MatchesKroneckerOracleConstantK) {
  for (const auto& g : {Grid3::box(4, 5, 6, Placement::Collocated), Grid3::cube(5, Placement::Staggered)}) {
    const auto m = Medium::uniform(g, cplx(4.0, 0.2));
    for (auto o : {SchemeOrder::Second, SchemeOrder::Fourth, SchemeOrder::Sixth}) {
      if (o == SchemeOrder::Sixth && !g.uniform()) continue;
      for (const auto& bc : closures(g)) {
        const HelmholtzOperator op(o, m, bc);
        const Mat A = kron_operator(o, m, bc);
        for (unsigned s = 0; s < 5; ++s) {
          const Field3 u = random_field(g, s);
          const Eigen::VectorXcd ref = A * to_vec(u);
          const Eigen::VectorXcd got = to_vec(op.apply(u));
          EXPECT_LT((got - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff(), 1e-13) << "order " << int(o);
        }
      }
    }
  }
}

TEST(Stencil, MatchesKroneckerOracleVariableK) {
  for (const auto& g : {Grid3::box(4, 5, 6, Placement::Staggered), Grid3::cube(5, Placement::Collocated)}) {
    const auto m = smooth_medium(g);
    for (auto o : {SchemeOrder::Second, SchemeOrder::Fourth, SchemeOrder::Sixth}) {
      if (o == SchemeOrder::Sixth && !g.uniform()) continue;
      for (const auto& bc : closures(g)) {
        const HelmholtzOperator op(o, m, bc);
        const Mat A = kron_operator(o, m, bc);
        const Field3 u = random_field(g, 11);
        const Eigen::VectorXcd ref = A * to_vec(u);
        const Eigen::VectorXcd got = to_vec(op.apply(u));
        EXPECT_LT((got - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff(), 1e-13) << "order " << int(o);
      }
    }
  }
}

TEST(Stencil, DenseAssemblyMatchesMatrixFree) {
  for (int n : {4, 5, 6}) {
    const auto g = Grid3::cube(n, Placement::Collocated);
    const auto m = smooth_medium(g);
    for (auto o : {SchemeOrder::Second, SchemeOrder::Fourth, SchemeOrder::Sixth}) {
      const auto bc = BoundaryCoeffs::collocated(g, 3.0);
      const Mat A = assemble_dense(o, m, bc);
      const HelmholtzOperator op(o, m, bc);
      for (unsigned s = 0; s < (n == 5 ? 100u : 5u); ++s) {
        const Field3 u = random_field(g, s);
        const Eigen::VectorXcd ref = A * to_vec(u);
        EXPECT_LT((to_vec(op.apply(u)) - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff(), 1e-13);
      }
    }
  }
}

TEST(Stencil, Linearity) {
  const auto g = Grid3::cube(6, Placement::Staggered);
  const auto m = smooth_medium(g);
  const HelmholtzOperator op(SchemeOrder::Sixth, m, BoundaryCoeffs::staggered(g, 3.0));
  const Field3 u = random_field(g, 1), v = random_field(g, 2);
  const cplx a(0.3, -1.2), b(-2.0, 0.7);
  const Field3 lhs = op.apply(a * u + b * v);
  const Field3 rhs = a * op.apply(u) + b * op.apply(v);
  EXPECT_LT(norms(lhs, rhs).linf_rel, 1e-12);
}

TEST(Stencil, DirichletSecondOrderIsSymmetric) {
  const auto g = Grid3::cube(2, Placement::Collocated);
  const Mat A = assemble_dense(SchemeOrder::Second, Medium::uniform(g, 0.0), BoundaryCoeffs::dirichlet());
  EXPECT_LT((A - A.transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Stencil, StaggeredClosureIsNotHermitian) {
  const auto g = Grid3::cube(4, Placement::Staggered);
  const Mat A = assemble_dense(SchemeOrder::Second, Medium::uniform(g, 5.0), BoundaryCoeffs::staggered(g, 5.0));
  EXPECT_GT((A - A.adjoint()).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Stencil, AssemblyGuard) {
  const auto g = Grid3::cube(17, Placement::Collocated);
  EXPECT_THROW(assemble_dense(SchemeOrder::Second, Medium::uniform(g, 1.0), BoundaryCoeffs::dirichlet()), Error);
}

TEST(Stencil, SixthOrderNeedsUniformGrid) {
  const auto g = Grid3::box(4, 5, 6, Placement::Collocated);
  EXPECT_THROW(HelmholtzOperator(SchemeOrder::Sixth, Medium::uniform(g, 1.0), BoundaryCoeffs::dirichlet()),
               GridMismatch);
}

TEST(Stencil, BoundaryRowCarriesGammaAndZeta) {
  const auto g = Grid3::box(5, 6, 7, Placement::Collocated);
  const cplx k0 = 2.0;
  const auto bc = BoundaryCoeffs::collocated(g, k0);
  const Mat A = assemble_dense(SchemeOrder::Second, Medium::uniform(g, k0), bc);
  const double ax = g.h(2) * g.h(2) / (g.h(0) * g.h(0));
  const auto r = g.offset(0, 2, 3), r1 = g.offset(1, 2, 3);
  const cplx expected_diag = ax * (bc.gamma[0] - 2.0) + g.h(2) * g.h(2) * (-2.0 / (g.h(1) * g.h(1)) - 2.0 / (g.h(2) * g.h(2)) + k0 * k0);
  EXPECT_NEAR(std::abs(A(r, r) - expected_diag), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(A(r, r1) - ax * bc.zeta[0]), 0.0, 1e-12);
}

TEST(Stencil, RhsTrivialCases) {
  const auto g = Grid3::cube(6, Placement::Collocated);
  const auto m = Medium::uniform(g, 0.0);
  Source zero(g);
  zero.value = [](double, double, double) { return cplx(0.0); };
  for (auto o : {SchemeOrder::Second, SchemeOrder::Fourth})
    EXPECT_EQ(norm_inf(build_rhs(o, m, zero).values()), 0.0);
  Source one(g);
  one.value = [](double, double, double) { return cplx(1.0); };
  one.f.fill(1.0);
  const Field3 r = build_rhs(SchemeOrder::Fourth, m, one);
  const double hz2 = g.h(2) * g.h(2);
  for (auto v : r.values()) EXPECT_NEAR(std::abs(v / hz2 - 1.0), 0.0, 1e-14);
}

TEST(Stencil, RhsFallbackCanBeDisabled) {
  const auto g = Grid3::cube(6, Placement::Collocated);
  Source s(g);
  EXPECT_THROW(build_rhs(SchemeOrder::Sixth, Medium::uniform(g, 1.0), s, {.allow_fallback = false}), Error);
  EXPECT_THROW(build_rhs(SchemeOrder::Fourth, Medium::uniform(g, 1.0), s, {.allow_fallback = false}), Error);
  EXPECT_NO_THROW(build_rhs(SchemeOrder::Sixth, Medium::uniform(g, 1.0), s));
}

TEST(Stencil, SixthOrderFallbackMatchesCallbacks) {
  // Point-evaluator differences agree with analytic derivative callbacks to the expected order.
  const AnalyticSeparable p(25.0);
  double prev = 0.0;
  for (int n : {17, 33}) {
    const auto g = Grid3::cube(n, Placement::Collocated);
    auto fields = analytic_fields(p, g);
    const Field3 exact = build_rhs(SchemeOrder::Sixth, fields.medium, fields.source);
    Source only_value = fields.source;
    only_value.laplacian = nullptr;
    only_value.pure_fourth = nullptr;
    only_value.mixed_fourth = nullptr;
    const Field3 approx = build_rhs(SchemeOrder::Sixth, fields.medium, only_value);
    const double h2 = g.h(0) * g.h(0);
    const double err = norms(approx, exact).linf_abs / h2;
    if (prev > 0.0) {
      EXPECT_GT(std::log2(prev / err), 3.5);
    }
    prev = err;
  }
}

TEST(Stencil, ResidualOfDenseSolution) {
  const auto g = Grid3::cube(5, Placement::Staggered);
  const auto m = smooth_medium(g);
  const auto bc = BoundaryCoeffs::staggered(g, 3.0);
  const Mat A = assemble_dense(SchemeOrder::Fourth, m, bc);
  const Field3 rhs = random_field(g, 5);
  const Field3 u = helm::testing::from_vec(g, A.partialPivLu().solve(to_vec(rhs)));
  EXPECT_LT(residual(SchemeOrder::Fourth, m, bc, u, rhs).l2_rel, 1e-12);
  EXPECT_DOUBLE_EQ(residual(SchemeOrder::Fourth, m, bc, Field3(g), rhs).l2_rel, 1.0);
}

// Truncation error of the full discrete system with the analytic ghost layer.
class TruncationOrder : public ::testing::TestWithParam<int> {};

TEST_P(TruncationOrder, SlopeMatchesNominalOrder) {
  const int ord = GetParam();
  const AnalyticSeparable p(25.0);
  std::vector<double> hs, errs;
  for (int n : {17, 33, 65}) {
    const auto g = Grid3::cube(n, Placement::Collocated);
    auto f = analytic_fields(p, g);
    const auto bc = BoundaryCoeffs::oracle(f.exact);
    const HelmholtzOperator op(order_from_int(ord), f.medium, bc);
    const Field3 rhs = system_rhs(op, f.medium, bc, f.source);
    const Field3 au = op.apply(f.u_exact);
    const double h2 = g.h(2) * g.h(2);
    hs.push_back(g.h(0));
    errs.push_back(norms(au, rhs).linf_abs / h2);
  }
  // Least-squares slope of log err against log h.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    const double x = std::log(hs[k]), y = std::log(errs[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = double(hs.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  EXPECT_NEAR(slope, double(ord), 0.4) << "errors " << errs[0] << ' ' << errs[1] << ' ' << errs[2];
}

INSTANTIATE_TEST_SUITE_P(Orders, TruncationOrder, ::testing::Values(2, 4, 6));
