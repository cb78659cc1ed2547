#include "helm/model1d.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>

namespace helm {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void check_model(const Model1D& m) {
  if (m.N < 1) throw Error("Model1D: N must be positive");
  if (m.r < 1) throw Error("Model1D: r must be at least 1");
}

}  // namespace

double coefficient_d(int r, double tau) {
  if (r < 1) throw Error("coefficient_d: r must be at least 1");
  double s = 0.0;
  for (int j = 0; j <= r; ++j) s += (j % 2 ? -1.0 : 1.0) * std::pow(tau, 2 * j) / factorial(2 * j);
  return s;
}

std::vector<cplx> build_rhs_1d(const Model1D& m, const std::vector<std::vector<cplx>>& d) {
  check_model(m);
  if (int(d.size()) < m.r) throw Error("build_rhs_1d: need derivatives f^(0) .. f^(" + std::to_string(2 * m.r - 2) + ")");
  for (int j = 0; j < m.r; ++j)
    if (int(d[j].size()) != m.N) throw Error("build_rhs_1d: derivative sample count must equal N");
  const double h = m.h(), tau = m.tau();
  std::vector<double> weight(m.r);
  for (int j = 0; j < m.r; ++j) {
    double s = 0.0;
    for (int l = 0; l <= m.r - j - 1; ++l) s += (l % 2 ? -1.0 : 1.0) * std::pow(tau, 2 * l) / factorial(2 * (l + j + 1));
    weight[j] = 2.0 * h * h * std::pow(h, 2 * j) * s;
  }
  std::vector<cplx> F(m.N, 0.0);
  for (int i = 0; i < m.N; ++i)
    for (int j = 0; j < m.r; ++j) F[i] += weight[j] * d[j][i];
  return F;
}

namespace {

Eigen::MatrixXd shifted_lambda(int N, double diag) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    A(i, i) = diag;
    if (i + 1 < N) A(i, i + 1) = A(i + 1, i) = 1.0;
  }
  return A;
}

}  // namespace

Eigen::MatrixXd model_matrix(const Model1D& m) {
  check_model(m);
  return shifted_lambda(m.N, -2.0 * coefficient_d(m.r, m.tau()));
}

Eigen::MatrixXd model_preconditioner(const Model1D& m) {
  check_model(m);
  return shifted_lambda(m.N, -2.0 * coefficient_d(1, m.tau()));
}

SpectrumReport spectrum(const Model1D& m) {
  check_model(m);
  const double h = m.h(), tau = m.tau(), k = m.k;
  const double dr = coefficient_d(m.r, tau), d1 = coefficient_d(1, tau);
  SpectrumReport s;
  s.h = h;
  double series = 0.0, mseries = 0.0;
  for (int l = 0; l <= m.r - 2; ++l) {
    series += (l % 2 ? 1.0 : -1.0) * std::pow(tau, 2 * l) / factorial(2 * (l + 2));   // (-1)^{l+1}
    mseries += std::pow(k, 2 * l) / (std::pow(4.0, l) * factorial(2 * (l + 2)));
  }
  s.delta0 = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= m.N; ++i) {
    const double lam = 2.0 * std::cos(std::numbers::pi * h * i);
    const double la = lam - 2.0 * dr, lp = lam - 2.0 * d1;
    if (std::abs(lp) < 1e-14)
      throw ResonanceError("spectrum: preconditioner eigenvalue " + std::to_string(i) + " vanishes (k = " +
                           std::to_string(k) + ", N = " + std::to_string(m.N) + ")");
    const double sn = std::sin(std::numbers::pi * h * i / 2.0);
    const double S = 4.0 * sn * sn / (h * h) - k * k;
    s.lambda_A.push_back(la);
    s.lambda_Ap.push_back(lp);
    s.lambda_ratio.push_back(la / lp);
    s.d_ii.push_back(-2.0 * std::pow(k, 4) * series / S);
    if (k != 0.0) s.delta0 = std::min(s.delta0, std::abs(S) / (k * k));
  }
  s.M = (k == 0.0 || m.r < 2) ? 0.0 : 2.0 * k * k / s.delta0 * mseries;
  return s;
}

ModelGmresResult run_model_gmres(const Model1D& m, std::span<const cplx> F, double tol) {
  const SpectrumReport sp = spectrum(m);
  if (int(F.size()) != m.N) throw Error("run_model_gmres: rhs length must equal N");
  const Eigen::MatrixXcd A = model_matrix(m).cast<cplx>();
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(model_preconditioner(m).cast<cplx>());
  LinearMap apply_A = [&A](std::span<const cplx> in, std::span<cplx> out) {
    Eigen::Map<Eigen::VectorXcd>(out.data(), out.size()).noalias() =
        A * Eigen::Map<const Eigen::VectorXcd>(in.data(), in.size());
  };
  LinearMap apply_M = [&lu](std::span<const cplx> in, std::span<cplx> out) {
    Eigen::Map<Eigen::VectorXcd>(out.data(), out.size()) = lu.solve(Eigen::Map<const Eigen::VectorXcd>(in.data(), in.size()));
  };
  GmresConfig cfg;
  cfg.restart = m.N;
  cfg.max_iterations = m.N;
  cfg.tol = tol;
  CVector x(m.N);
  const SolveReport rep = gmres(apply_A, apply_M, F, x, cfg);

  ModelGmresResult res;
  res.iterations = rep.n0;
  res.converged = rep.converged;
  const double q = sp.bound();
  for (const auto& e : rep.history) {
    res.residuals.push_back(e.estimated);
    res.envelope.push_back(std::pow(q, e.iteration));
    if (e.estimated > res.envelope.back() * (1.0 + 1e-9)) res.within_envelope = false;
  }
  return res;
}

std::vector<std::vector<cplx>> default_source_1d(const Model1D& m) {
  const double w = 2.0 * std::numbers::pi;
  std::vector<std::vector<cplx>> d(std::max(m.r, 1), std::vector<cplx>(m.N));
  for (int i = 0; i < m.N; ++i) {
    const double x = (i + 1) * m.h();
    for (int j = 0; j < int(d.size()); ++j) {
      const double sgn = (j % 2 ? -1.0 : 1.0);
      d[j][i] = sgn * std::pow(w, 2 * j) * std::sin(w * x) + (j == 0 ? x : 0.0);
    }
  }
  return d;
}

void write_model_history_csv(const std::filesystem::path& path, const ModelGmresResult& r) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string());
  out << std::setprecision(15) << "n,residual,envelope\n";
  for (std::size_t n = 0; n < r.residuals.size(); ++n) out << n << ',' << r.residuals[n] << ',' << r.envelope[n] << '\n';
}

std::vector<SweepRow> model_sweep(const std::vector<int>& Ns, const std::vector<double>& ks, const std::vector<int>& rs) {
  std::vector<SweepRow> rows;
  for (int r : rs)
    for (double k : ks)
      for (int N : Ns) {
        const Model1D m{N, k, r};
        SweepRow row{N, k, r};
        const auto sp = spectrum(m);
        row.delta0 = sp.delta0;
        row.bound = sp.bound();
        for (double v : sp.lambda_ratio) row.max_deviation = std::max(row.max_deviation, std::abs(v - 1.0));
        const auto F = build_rhs_1d(m, default_source_1d(m));
        const auto res = run_model_gmres(m, F);
        row.iterations = res.iterations;
        row.converged = res.converged;
        rows.push_back(row);
      }
  return rows;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string());
  out << std::setprecision(15) << "N,k,r,delta0,Mh2,max_dev,iterations,converged\n";
  for (const auto& r : rows)
    out << r.N << ',' << r.k << ',' << r.r << ',' << r.delta0 << ',' << r.bound << ',' << r.max_deviation << ','
        << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
}

}  // namespace helm
