#include "helm/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace helm {

namespace {

constexpr double kMaxCond = 1e12;

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

Eigen::MatrixXcd tridiag_matrix(const TridiagSpec& spec) {
  const int n = spec.n;
  if (n < 1) throw Error("tridiag_matrix: n must be positive");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  if (n == 1) {
    m(0, 0) = spec.gamma;
    return m;
  }
  for (int i = 0; i + 1 < n; ++i) {
    m(i, i + 1) = 1.0;
    m(i + 1, i) = 1.0;
  }
  m(0, 0) = spec.gamma;
  m(n - 1, n - 1) = spec.gamma;
  m(0, 1) = spec.zeta;
  m(n - 1, n - 2) = spec.zeta;
  return m;
}

TridiagEig sine_eigensystem(int n) {
  if (n < 1) throw Error("sine_eigensystem: n must be positive");
  const double h = 1.0 / (n + 1);
  const double scale = std::sqrt(2.0 * h);
  TridiagEig e;
  e.V.resize(n, n);
  e.D.resize(n);
  for (int i = 0; i < n; ++i) {
    e.D(i) = 2.0 * std::cos(std::numbers::pi * h * (i + 1));
    for (int l = 0; l < n; ++l) e.V(l, i) = scale * std::sin(std::numbers::pi * h * (i + 1) * (l + 1));
  }
  e.V_inv = e.V.transpose();
  e.cond_V = 1.0;
  e.inverse_error = max_abs(e.V * e.V_inv - Eigen::MatrixXcd::Identity(n, n));
  return e;
}

Eigen::MatrixXcd invert_eigenvectors(const Eigen::MatrixXcd& V, double* error) {
  const auto n = V.rows();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(V);
  const double rcond = lu.rcond();
  if (!(rcond > 1.0 / kMaxCond))
    throw DiagonalizabilityError("invert_eigenvectors: eigenvector matrix is numerically singular");
  Eigen::MatrixXcd inv = lu.inverse();
  if (!inv.allFinite()) throw DiagonalizabilityError("invert_eigenvectors: non-finite inverse");
  if (error) *error = max_abs(V * inv - Eigen::MatrixXcd::Identity(n, n));
  return inv;
}

TridiagEig decompose(const TridiagSpec& spec) {
  if (spec.n < 2) throw Error("decompose: n must be at least 2");
  const Eigen::MatrixXcd A = tridiag_matrix(spec);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(A, true);
  if (solver.info() != Eigen::Success) throw DiagonalizabilityError("decompose: eigensolver did not converge");

  const int n = spec.n;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& ev = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (ev(a).real() != ev(b).real()) return ev(a).real() < ev(b).real();
    return ev(a).imag() < ev(b).imag();
  });

  TridiagEig e;
  e.V.resize(n, n);
  e.D.resize(n);
  for (int k = 0; k < n; ++k) {
    e.D(k) = ev(order[k]);
    e.V.col(k) = solver.eigenvectors().col(order[k]);
  }
  e.V_inv = invert_eigenvectors(e.V, &e.inverse_error);
  e.cond_V = e.V.cwiseAbs().colwise().sum().maxCoeff() * e.V_inv.cwiseAbs().colwise().sum().maxCoeff();
  if (!(e.cond_V <= kMaxCond))
    throw DiagonalizabilityError("decompose: eigenvector condition number " + std::to_string(e.cond_V) +
                                 " exceeds 1e12");
  return e;
}

}  // namespace helm
