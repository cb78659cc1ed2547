#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "helm/core.hpp"

namespace helm {

enum class SchemeOrder { Second = 2, Fourth = 4, Sixth = 6 };

int order_value(SchemeOrder order);
SchemeOrder order_from_int(int order);

using PointFn = std::function<cplx(double, double, double)>;
using GradFn = std::function<std::array<cplx, 3>(double, double, double)>;

enum class BoundaryMode { StaggeredTwoPoint, CollocatedThreePoint, OracleGhost, Custom };

// Per-axis ghost elimination U_{-1} = gamma U_0 + (zeta - 1) U_1 (0-based,
// mirrored at the far end). Both the 7-point and the compact operators are
// built from these closed 1D operators, so only one ghost layer is ever used.
//
// OracleGhost keeps the Dirichlet closure (gamma = 0, zeta = 1) in the
// operator and moves the ghost contribution of the known solution to the
// right-hand side, see ghost_correction().
struct BoundaryCoeffs {
  BoundaryMode mode = BoundaryMode::Custom;
  std::array<cplx, 3> gamma{0.0, 0.0, 0.0};
  std::array<cplx, 3> zeta{1.0, 1.0, 1.0};
  PointFn ghost_value;

  static BoundaryCoeffs staggered(const Grid3& grid, cplx k0);
  static BoundaryCoeffs collocated(const Grid3& grid, cplx k0);
  // Staggered or collocated closure matching the grid placement.
  static BoundaryCoeffs absorbing(const Grid3& grid, cplx k0);
  static BoundaryCoeffs dirichlet();
  static BoundaryCoeffs oracle(PointFn exact);
  static BoundaryCoeffs custom(std::array<cplx, 3> gamma, std::array<cplx, 3> zeta);
};

// k^2(x, y, z) sampled on the grid. The optional callbacks supply point values
// and derivatives; without them derivatives come from central differences of
// the samples (one-sided at the faces).
struct Medium {
  cplx k0 = 0.0;
  Field3 k_sq;
  bool constant = false;
  PointFn k_sq_at;
  GradFn grad_k_sq;
  PointFn lap_k_sq;

  explicit Medium(const Grid3& grid) : k_sq(grid) {}
  static Medium uniform(const Grid3& grid, cplx k0);
  const Grid3& grid() const { return k_sq.grid(); }
};

// Right-hand side f with optional point evaluator and derivative callbacks.
// pure_fourth is f_xxxx + f_yyyy + f_zzzz; mixed_fourth is
// f_xxyy + f_xxzz + f_yyzz.
struct Source {
  Field3 f;
  PointFn value;
  GradFn grad;
  PointFn laplacian;
  PointFn pure_fourth;
  PointFn mixed_fourth;

  explicit Source(const Grid3& grid) : f(grid) {}
};

struct RhsOptions {
  bool allow_fallback = true;
};

// Matrix-free compact Helmholtz operator, scaled by h_z^2 (all right-hand
// sides carry the same factor). Coefficient fields are cached at construction.
class HelmholtzOperator {
 public:
  HelmholtzOperator(SchemeOrder order, const Medium& medium, const BoundaryCoeffs& bc);

  const Grid3& grid() const { return grid_; }
  SchemeOrder order() const { return order_; }

  void apply(std::span<const cplx> u, std::span<cplx> out) const;
  Field3 apply(const Field3& u) const;

 private:
  friend Field3 ghost_correction(const HelmholtzOperator&, const Medium&, const BoundaryCoeffs&);

  HelmholtzOperator(SchemeOrder order, const Grid3& grid, std::array<cplx, 3> gamma, std::array<cplx, 3> zeta,
                    bool constant_k, Field3 k_sq);

  // out (+)= scale * D_axis in, using the closed second difference.
  void second_diff(int axis, const cplx* in, cplx* out, double scale, bool accumulate) const;
  // out = delta_axis in (closed central first difference).
  void first_diff(int axis, const cplx* in, cplx* out) const;

  Grid3 grid_;
  SchemeOrder order_;
  std::array<cplx, 3> gamma_, zeta_;
  bool constant_k_;
  Field3 k_sq_;
  // Sixth order, variable k only: 2 (k^2)_nu and grad^2(k^2) at the nodes.
  std::optional<std::array<Field3, 3>> two_grad_k_sq_;
  std::optional<Field3> lap_k_sq_;
};

Field3 apply_operator(SchemeOrder order, const Medium& medium, const BoundaryCoeffs& bc, const Field3& u);

// Modified right-hand side for the scheme (scaled by h_z^2). For the sixth
// order it includes the f-dependent parts of the expansion of Delta_h(k^2 U).
Field3 build_rhs(SchemeOrder order, const Medium& medium, const Source& src, RhsOptions opts = {});

// For OracleGhost closures: the contribution of the analytic ghost layer,
// to be subtracted from the right-hand side. Zero for every other mode.
Field3 ghost_correction(const HelmholtzOperator& op, const Medium& medium, const BoundaryCoeffs& bc);

// build_rhs minus ghost_correction: the complete right-hand side for op.
Field3 system_rhs(const HelmholtzOperator& op, const Medium& medium, const BoundaryCoeffs& bc, const Source& src,
                  RhsOptions opts = {});

// rel-res (l2_rel), max residual, relmax-res of A u - rhs against rhs.
NormReport residual(const HelmholtzOperator& op, const Field3& u, const Field3& rhs);
NormReport residual(SchemeOrder order, const Medium& medium, const BoundaryCoeffs& bc, const Field3& u,
                    const Field3& rhs);

// Dense matrix of the operator, column m = A e_m. Guarded to 4096 unknowns.
Eigen::MatrixXcd assemble_dense(SchemeOrder order, const Medium& medium, const BoundaryCoeffs& bc);
Eigen::MatrixXcd assemble_dense(const HelmholtzOperator& op);
void write_dense_csv(const std::filesystem::path& path, const Eigen::MatrixXcd& m);

}  // namespace helm
