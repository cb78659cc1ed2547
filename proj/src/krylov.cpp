#include "helm/krylov.hpp"

#include <chrono>
#include <cmath>

namespace helm {

namespace {

using Clock = std::chrono::steady_clock;

struct Timer {
  double& acc;
  Clock::time_point t0 = Clock::now();
  ~Timer() { acc += std::chrono::duration<double>(Clock::now() - t0).count(); }
};

// Complex Givens rotation zeroing b in (a, b): [c s; -conj(s) c] with c real.
void make_givens(cplx a, cplx b, double& c, cplx& s) {
  const double aa = std::abs(a), bb = std::abs(b);
  if (bb == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (aa == 0.0) {
    c = 0.0;
    s = std::conj(b) / bb;
    return;
  }
  const double r = std::hypot(aa, bb);
  c = aa / r;
  s = (a / aa) * std::conj(b) / r;
}

}  // namespace

LinearMap identity_map() {
  return [](std::span<const cplx> in, std::span<cplx> out) { std::copy(in.begin(), in.end(), out.begin()); };
}

SolveReport gmres(const LinearMap& apply_A, const LinearMap& apply_Minv, std::span<const cplx> rhs, std::span<cplx> x,
                  const GmresConfig& cfg) {
  if (cfg.restart < 1) throw Error("gmres: restart must be at least 1");
  if (!(cfg.tol > 0.0)) throw Error("gmres: tolerance must be positive");
  if (x.size() != rhs.size()) throw GridMismatch("gmres: size mismatch");
  const auto t_start = Clock::now();
  const std::size_t n = rhs.size();
  const int m = cfg.restart;
  SolveReport rep;
  std::fill(x.begin(), x.end(), cplx(0.0));

  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    rep.converged = true;
    rep.final_rel_res = 0.0;
    rep.timings.total = std::chrono::duration<double>(Clock::now() - t_start).count();
    return rep;
  }

  std::vector<CVector> V(m + 1, CVector(n));
  std::vector<std::vector<cplx>> h(m + 1, std::vector<cplx>(m, 0.0));
  std::vector<double> cs(m);
  std::vector<cplx> sn(m), g(m + 1);
  CVector r(n), w(n), z(n);

  auto true_residual = [&]() {
    {
      Timer t{rep.timings.operator_apply};
      apply_A(x, r);
    }
    for (std::size_t k = 0; k < n; ++k) r[k] = rhs[k] - r[k];
    return norm2(r) / bnorm;
  };

  // r0 = b with x0 = 0.
  std::copy(rhs.begin(), rhs.end(), r.begin());
  double rel = 1.0;
  if (cfg.record_history) rep.history.push_back({0, 1.0, 1.0});

  while (rep.n0 < cfg.max_iterations) {
    const double beta = norm2(r);
    for (std::size_t k = 0; k < n; ++k) V[0][k] = r[k] / beta;
    std::fill(g.begin(), g.end(), cplx(0.0));
    g[0] = beta;

    int j = 0;
    bool breakdown = false;
    for (; j < m && rep.n0 < cfg.max_iterations; ++j) {
      {
        Timer t{rep.timings.precond_apply};
        apply_Minv(V[j], z);
      }
      {
        Timer t{rep.timings.operator_apply};
        apply_A(z, w);
      }
      for (int i = 0; i <= j; ++i) {
        h[i][j] = dot(V[i], w);
        axpy(-h[i][j], V[i], w);
      }
      const double hn = norm2(w);
      h[j + 1][j] = hn;
      for (int i = 0; i < j; ++i) {
        const cplx a = h[i][j], b = h[i + 1][j];
        h[i][j] = cs[i] * a + sn[i] * b;
        h[i + 1][j] = -std::conj(sn[i]) * a + cs[i] * b;
      }
      make_givens(h[j][j], h[j + 1][j], cs[j], sn[j]);
      h[j][j] = cs[j] * h[j][j] + sn[j] * h[j + 1][j];
      h[j + 1][j] = 0.0;
      g[j + 1] = -std::conj(sn[j]) * g[j];
      g[j] = cs[j] * g[j];
      ++rep.n0;
      const double est = std::abs(g[j + 1]) / bnorm;
      if (cfg.record_history) rep.history.push_back({rep.n0, est, -1.0});
      if (hn <= 1e-14 * beta) {
        breakdown = true;
        ++j;
        break;
      }
      for (std::size_t k = 0; k < n; ++k) V[j + 1][k] = w[k] / hn;
      if (est <= cfg.tol) {
        ++j;
        break;
      }
    }

    // Solve the triangular system and update x += M^{-1} V y.
    std::vector<cplx> y(j);
    for (int i = j - 1; i >= 0; --i) {
      cplx s = g[i];
      for (int k = i + 1; k < j; ++k) s -= h[i][k] * y[k];
      y[i] = s / h[i][i];
    }
    std::fill(w.begin(), w.end(), cplx(0.0));
    for (int i = 0; i < j; ++i) axpy(y[i], V[i], w);
    {
      Timer t{rep.timings.precond_apply};
      apply_Minv(w, z);
    }
    for (std::size_t k = 0; k < n; ++k) x[k] += z[k];

    rel = true_residual();
    if (cfg.record_history && !rep.history.empty()) rep.history.back().true_res = rel;
    if (rel <= cfg.tol) {
      rep.converged = true;
      break;
    }
    if (breakdown && rel > cfg.tol) {
      rep.message = "Arnoldi breakdown without convergence";
      break;
    }
  }

  rep.final_rel_res = rel;
  rep.final_residual.l2_rel = rel;
  rep.final_residual.linf_abs = norm_inf(r);
  rep.final_residual.linf_rel = rep.final_residual.linf_abs / norm_inf(rhs);
  if (!rep.converged && rep.message.empty())
    rep.message = "reached the maximum of " + std::to_string(cfg.max_iterations) + " iterations";
  rep.timings.total = std::chrono::duration<double>(Clock::now() - t_start).count();
  return rep;
}

}  // namespace helm
