#pragma once

#include <functional>
#include <string>
#include <vector>

#include "helm/core.hpp"

namespace helm {

using LinearMap = std::function<void(std::span<const cplx>, std::span<cplx>)>;

// Approximate inverse applied once per Krylov iteration.
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(std::span<const cplx> in, std::span<cplx> out) const = 0;
  virtual std::string name() const = 0;
  LinearMap as_map() const {
    return [this](std::span<const cplx> in, std::span<cplx> out) { apply(in, out); };
  }
};

struct GmresConfig {
  int restart = 20;
  double tol = 1e-10;
  int max_iterations = 100;   // total inner iterations
  bool record_history = true;
};

struct HistoryEntry {
  int iteration = 0;
  double estimated = 0.0;   // Givens estimate of ||F - A U|| / ||F||
  double true_res = -1.0;   // recomputed residual, negative when not evaluated
};

struct SolveTimings {
  double setup = 0.0;
  double operator_apply = 0.0;
  double precond_apply = 0.0;
  double total = 0.0;
};

struct SolveReport {
  int n0 = 0;               // total inner iterations performed
  bool converged = false;
  double final_rel_res = 0.0;   // true residual of the returned iterate
  std::vector<HistoryEntry> history;
  SolveTimings timings;
  NormReport final_residual;
  std::string message;
};

// Restarted GMRES with right preconditioning: Krylov space of A M^{-1},
// x0 = 0, x = M^{-1} y. Modified Gram-Schmidt Arnoldi, complex Givens
// rotations. Convergence is declared only when the recomputed residual
// meets the tolerance.
SolveReport gmres(const LinearMap& apply_A, const LinearMap& apply_Minv, std::span<const cplx> rhs,
                  std::span<cplx> x, const GmresConfig& config = {});

LinearMap identity_map();

}  // namespace helm
