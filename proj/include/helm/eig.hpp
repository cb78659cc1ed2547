#pragma once

#include <Eigen/Dense>

#include "helm/core.hpp"

namespace helm {

// Tridiagonal n x n matrix with zero diagonal and unit off-diagonals except
// the first and last rows, which read (gamma, zeta, 0, ...) and (..., 0, zeta, gamma).
struct TridiagSpec {
  int n = 0;
  cplx gamma = 0.0;
  cplx zeta = 1.0;
};

struct TridiagEig {
  Eigen::MatrixXcd V;      // columns are eigenvectors
  Eigen::MatrixXcd V_inv;
  Eigen::VectorXcd D;
  double cond_V = 1.0;          // ||V||_1 ||V^-1||_1
  double inverse_error = 0.0;   // ||V V^-1 - I||_max
};

Eigen::MatrixXcd tridiag_matrix(const TridiagSpec& spec);

// Closed-form eigensystem of the Dirichlet matrix (gamma = 0, zeta = 1):
// V(l, i) = sqrt(2h) sin(pi h (i+1)(l+1)), lambda_i = 2 cos(pi h (i+1)), h = 1/(n+1).
TridiagEig sine_eigensystem(int n);

// Full eigendecomposition, eigenvalues sorted by (real, imag).
// Throws DiagonalizabilityError when cond_V exceeds 1e12.
TridiagEig decompose(const TridiagSpec& spec);

// Explicit inverse by partial-pivot LU. If `error` is given it receives ||V V^-1 - I||_max.
Eigen::MatrixXcd invert_eigenvectors(const Eigen::MatrixXcd& V, double* error = nullptr);

}  // namespace helm
