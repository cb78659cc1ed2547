#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helm/eig.hpp"

using namespace helm;
using Mat = Eigen::MatrixXcd;

namespace {

double rel_reconstruction(const TridiagSpec& s, const TridiagEig& e) {
  const Mat A = tridiag_matrix(s);
  return (A * e.V - e.V * e.D.asDiagonal()).cwiseAbs().maxCoeff() / A.cwiseAbs().maxCoeff();
}

// Sorted (real, imag) copy.
std::vector<cplx> sorted(std::vector<cplx> v) {
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  return v;
}

}  // namespace

TEST(Eig, MatrixShape) {
  const Mat A = tridiag_matrix({4, cplx(0.5, 1.0), cplx(2.0)});
  EXPECT_EQ(A(0, 0), cplx(0.5, 1.0));
  EXPECT_EQ(A(0, 1), cplx(2.0));
  EXPECT_EQ(A(1, 0), cplx(1.0));
  EXPECT_EQ(A(1, 1), cplx(0.0));
  EXPECT_EQ(A(1, 2), cplx(1.0));
  EXPECT_EQ(A(3, 2), cplx(2.0));
  EXPECT_EQ(A(3, 3), cplx(0.5, 1.0));
  EXPECT_EQ(A(0, 2), cplx(0.0));
}

TEST(Eig, SineSystemSmallCases) {
  const auto e1 = sine_eigensystem(1);
  EXPECT_NEAR(std::abs(e1.D(0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(e1.V(0, 0)), 1.0, 1e-15);
  const auto e3 = sine_eigensystem(3);
  std::vector<double> d{e3.D(0).real(), e3.D(1).real(), e3.D(2).real()};
  std::sort(d.begin(), d.end());
  EXPECT_NEAR(d[0], -std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(d[1], 0.0, 1e-14);
  EXPECT_NEAR(d[2], std::sqrt(2.0), 1e-14);
}

TEST(Eig, SineSystemResidualAndUnitarity) {
  for (int n : {64, 512}) {
    const auto e = sine_eigensystem(n);
    const TridiagSpec s{n, 0.0, 1.0};
    EXPECT_LT(rel_reconstruction(s, e) * 2.0, 1e-12);
    EXPECT_LT((e.V.adjoint() * e.V - Mat::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((e.V_inv - e.V.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Eig, DecomposeReducesToSineCase) {
  const int n = 9;
  const auto e = decompose({n, 0.0, 1.0});
  const auto s = sine_eigensystem(n);
  std::vector<cplx> a(e.D.data(), e.D.data() + n), b(s.D.data(), s.D.data() + n);
  a = sorted(a);
  b = sorted(b);
  for (int k = 0; k < n; ++k) EXPECT_NEAR(std::abs(a[k] - b[k]), 0.0, 1e-12);
  // Columns agree up to a unit scalar.
  for (int k = 0; k < n; ++k) {
    int m = 0;
    for (int q = 0; q < n; ++q)
      if (std::abs(s.D(q) - e.D(k)) < 1e-10) m = q;
    const Eigen::VectorXcd v = e.V.col(k) / e.V.col(k).norm();
    EXPECT_NEAR(std::abs(v.dot(s.V.col(m))), 1.0, 1e-10);
  }
}

TEST(Eig, FourByFourCharacteristicPolynomial) {
  // det(lambda I - A) for A = [[g,1,0,0],[1,0,1,0],[0,1,0,1],[0,0,1,g]] with zeta = 1:
  // lambda^4 - 2g lambda^3 + (g^2 - 3) lambda^2 + 4g lambda + (1 - g^2).
  const cplx g(0.0, 1.0);
  const auto e = decompose({4, g, 1.0});
  for (int k = 0; k < 4; ++k) {
    const cplx x = e.D(k);
    const cplx p = std::pow(x, 4) - 2.0 * g * std::pow(x, 3) + (g * g - 3.0) * x * x + 4.0 * g * x + (1.0 - g * g);
    EXPECT_LT(std::abs(p), 1e-10);
  }
}

TEST(Eig, StaggeredAndCollocatedCases) {
  const double k0 = std::sqrt(439.2);
  {
    const double h = 1.0 / 100;
    const cplx gamma = (2.0 + cplx(0, 1) * k0 * h) / (2.0 - cplx(0, 1) * k0 * h);
    const TridiagSpec s{100, gamma, 1.0};
    const auto e = decompose(s);
    EXPECT_LT(rel_reconstruction(s, e), 1e-10);
    EXPECT_LT(e.inverse_error, 1e-8);
  }
  {
    const double h = 1.0 / 126;
    const TridiagSpec s{127, cplx(0, 2.0 * k0 * h), 2.0};
    const auto e = decompose(s);
    EXPECT_LT(rel_reconstruction(s, e), 1e-10);
    EXPECT_LT((e.V * e.V_inv - Mat::Identity(127, 127)).cwiseAbs().maxCoeff(), 1e-8);
    const Mat A = tridiag_matrix(s);
    EXPECT_LT((e.V * e.D.asDiagonal() * e.V_inv - A).cwiseAbs().maxCoeff() / A.cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Eig, OrderingAndDeterminism) {
  const TridiagSpec s{40, cplx(0.9, 0.3), 1.0};
  const auto a = decompose(s), b = decompose(s);
  for (int k = 0; k + 1 < 40; ++k) {
    const cplx x = a.D(k), y = a.D(k + 1);
    EXPECT_TRUE(x.real() < y.real() || (x.real() == y.real() && x.imag() <= y.imag()));
  }
  EXPECT_TRUE(a.D == b.D);
  EXPECT_TRUE(a.V == b.V);
}

TEST(Eig, DirichletSpectrumIsSymmetric) {
  const auto e = decompose({12, 0.0, 1.0});
  for (int k = 0; k < 12; ++k) EXPECT_NEAR(std::abs(e.D(k) + e.D(11 - k)), 0.0, 1e-12);
}

TEST(Eig, InvertEigenvectors) {
  const auto s = sine_eigensystem(20);
  double err = 1.0;
  const Mat inv = invert_eigenvectors(s.V, &err);
  EXPECT_LT((inv - s.V.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(err, 1e-12);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(-1, 1);
  Mat V = Mat::Identity(16, 16) * 4.0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) V(i, j) += cplx(d(rng), d(rng));
  const Mat Vi = invert_eigenvectors(V, &err);
  EXPECT_LT((V * Vi - Mat::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-12);

  Mat singular = Mat::Zero(3, 3);
  singular(0, 0) = 1.0;
  EXPECT_THROW(invert_eigenvectors(singular), DiagonalizabilityError);
}

TEST(Eig, DecomposeRejectsDefectiveMatrix) {
  // gamma = zeta = 0, n = 3: rows (0,0,0), (1,0,1), (0,0,0) form a nilpotent matrix of rank 1.
  EXPECT_THROW(decompose({3, 0.0, 0.0}), DiagonalizabilityError);
  EXPECT_THROW(decompose({1, 0.0, 1.0}), Error);
}
