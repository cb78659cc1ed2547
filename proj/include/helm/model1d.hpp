#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "helm/core.hpp"
#include "helm/krylov.hpp"

namespace helm {

// u'' + k^2 u = f on (0, 1) with Dirichlet ends, N interior nodes,
// compact scheme of order 2r: U_{i-1} - 2 d_r U_i + U_{i+1} = F_i.
struct Model1D {
  int N = 0;
  double k = 0.0;
  int r = 1;

  double h() const { return 1.0 / (N + 1); }
  double tau() const { return k * h(); }
};

// sum_{j=0}^{r} (-1)^j tau^{2j} / (2j)!
double coefficient_d(int r, double tau);

// F_i = 2 h^2 sum_{j<r} f^{(2j)}_i h^{2j} sum_{l<r-j} (-1)^l tau^{2l} / (2(l+j+1))!.
// even_derivs[j] holds samples of f^{(2j)} at the N interior nodes, j = 0..r-1.
std::vector<cplx> build_rhs_1d(const Model1D& model, const std::vector<std::vector<cplx>>& even_derivs);

Eigen::MatrixXd model_matrix(const Model1D& model);            // A = Lambda - 2 d_r I
Eigen::MatrixXd model_preconditioner(const Model1D& model);    // A_p = Lambda - 2 d_1 I

struct SpectrumReport {
  std::vector<double> lambda_A;
  std::vector<double> lambda_Ap;
  std::vector<double> lambda_ratio;   // lambda(A A_p^{-1}) = lambda(A) / lambda(A_p)
  std::vector<double> d_ii;           // lambda_ratio = 1 + h^2 d_ii
  double delta0 = 0.0;
  double M = 0.0;
  double bound() const { return M * h * h; }
  double h = 0.0;
};

// Closed-form spectra; throws ResonanceError if some lambda(A_p) vanishes.
SpectrumReport spectrum(const Model1D& model);

struct ModelGmresResult {
  std::vector<double> residuals;   // ||r_n|| / ||r_0||, n = 0..iterations
  std::vector<double> envelope;    // (M h^2)^n
  int iterations = 0;
  bool converged = false;
  bool within_envelope = true;
};

// Full (non-restarted) right-preconditioned GMRES on A U = F with A_p.
ModelGmresResult run_model_gmres(const Model1D& model, std::span<const cplx> F, double tol = 1e-10);

// Smooth default source f(x) = sin(2 pi x) + x with its even derivatives.
std::vector<std::vector<cplx>> default_source_1d(const Model1D& model);

void write_model_history_csv(const std::filesystem::path& path, const ModelGmresResult& result);

struct SweepRow {
  int N = 0;
  double k = 0.0;
  int r = 0;
  double delta0 = 0.0;
  double bound = 0.0;
  double max_deviation = 0.0;   // max_i |lambda_i(A A_p^{-1}) - 1|
  int iterations = 0;
  bool converged = false;
};

std::vector<SweepRow> model_sweep(const std::vector<int>& Ns, const std::vector<double>& ks, const std::vector<int>& rs);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

}  // namespace helm
