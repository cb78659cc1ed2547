#pragma once

#include <memory>
#include <vector>

#include "helm/eigt.hpp"

namespace helm {

// In-place 2D type-I discrete sine transform of every horizontal slice,
// normalized so that it is exactly the unitary sine eigenvector matrix
// V_x (x) V_y (symmetric, its own inverse). Backed by FFTW RODFT00.
class SineTransform2D {
 public:
  SineTransform2D(int nx, int ny, int nz);
  ~SineTransform2D();
  SineTransform2D(const SineTransform2D&) = delete;
  SineTransform2D& operator=(const SineTransform2D&) = delete;

  void apply(std::span<cplx> data) const;
  // Complex values processed per call (for op accounting: O(n log n) each line).
  std::size_t size() const { return std::size_t(nx_) * ny_ * nz_; }

 private:
  int nx_, ny_, nz_;
  void* plan_x_ = nullptr;
  void* plan_y_ = nullptr;
  double scale_;
};

// Fast solver for operators with the Dirichlet closure in x and y: sine
// transforms plus z-line solves with the given z closure. With a Dirichlet
// z closure and order Fourth/Sixth this is the FFT4/FFT6 reference
// preconditioner; with Second order it is FFT2, or A_p^F when the absorbing
// z closure is kept.
class SineSolver : public Preconditioner {
 public:
  SineSolver(const Grid3& grid, cplx gamma_z, cplx zeta_z, std::vector<cplx> k0_profile,
             SchemeOrder order = SchemeOrder::Second);

  static std::unique_ptr<SineSolver> dirichlet(const Grid3& grid, cplx k0, SchemeOrder order);

  const Grid3& grid() const { return grid_; }
  const SineTransform2D& transform() const { return *dst_; }
  const LineSystems& lines() const { return *lines_; }

  void apply(std::span<const cplx> in, std::span<cplx> out) const override;
  Field3 solve(const Field3& y) const;
  std::string name() const override;

 private:
  Grid3 grid_;
  SchemeOrder order_;
  bool dirichlet_z_;
  std::unique_ptr<SineTransform2D> dst_;
  std::unique_ptr<LineSystems> lines_;
};

// Values of a field on a few full x-rows (fixed i) and y-columns (fixed j)
// of every slice. Row r holds entries (rows[r], j, l) for all j; column c
// holds (i, cols[c], l) for all i. Used both for boundary values (rows and
// columns agree where they cross) and for residuals split as
// Theta^x (rows) + Theta^y (columns).
struct BoundaryStacks {
  int nx = 0, ny = 0, nz = 0;
  std::vector<int> rows, cols;
  CVector row_data;   // [(l * rows.size() + r) * ny + j]
  CVector col_data;   // [(l * cols.size() + c) * nx + i]

  BoundaryStacks() = default;
  BoundaryStacks(int nx, int ny, int nz, std::vector<int> rows, std::vector<int> cols);

  cplx& row(std::size_t r, int j, int l) { return row_data[(std::size_t(l) * rows.size() + r) * ny + j]; }
  cplx row(std::size_t r, int j, int l) const { return row_data[(std::size_t(l) * rows.size() + r) * ny + j]; }
  cplx& col(std::size_t c, int i, int l) { return col_data[(std::size_t(l) * cols.size() + c) * nx + i]; }
  cplx col(std::size_t c, int i, int l) const { return col_data[(std::size_t(l) * cols.size() + c) * nx + i]; }

  // Value at (i, j, l) read from a row (or column) that contains it.
  cplx value(int i, int j, int l) const;
  bool is_zero() const;
  // Sum of row and column parts (residual semantics).
  Field3 densify_sum(const Grid3& grid) const;
  // Boundary values scattered into an otherwise zero field.
  Field3 densify_values(const Grid3& grid) const;
  // Samples a field on the given rows/cols.
  static BoundaryStacks gather(const Field3& f, std::vector<int> rows, std::vector<int> cols);
};

struct PfftStats {
  std::size_t applications = 0;
  std::size_t correction_ops = 0;   // complex MACs of the correction (Step 2 and sparse parts)
  std::size_t transform_calls = 0;  // full 3D sine transforms
  double step1_seconds = 0.0;
  double step2_seconds = 0.0;
  double step3_seconds = 0.0;
};

// Direct solver for A_p U = Y (same operator as EigTPrecond) via
//   Step 1: A_p^F Theta = Y by sine transforms, Theta kept on boundary layers,
//   Step 2: W = A_p^{-1} (A_p^F - A_p) Theta by sparse EigT transforms,
//   Step 3: A_p^F U = Y + (A_p^F - A_p)(Theta + W), reusing the transformed Y.
// A_p^F carries the Dirichlet closure in x and y and the original one in z.
class PfftPrecond : public Preconditioner {
 public:
  PfftPrecond(const Grid3& grid, const BoundaryCoeffs& bc, std::vector<cplx> k0_profile);

  const Grid3& grid() const { return grid_; }
  const EigTPrecond& eigt() const { return eigt_; }
  const SineSolver& sine() const { return sine_; }

  // Rows/columns carrying nonzero residual entries, and the layers whose
  // values the residual reads (two deep when zeta != 1).
  const std::vector<int>& write_rows() const { return write_rows_; }
  const std::vector<int>& write_cols() const { return write_cols_; }
  const std::vector<int>& read_rows() const { return read_rows_; }
  const std::vector<int>& read_cols() const { return read_cols_; }

  // Step 1. Full solve with A_p^F; with boundary_only set only the read
  // layers are evaluated (other entries are zero).
  Field3 sine_solve(const Field3& y, bool boundary_only) const;
  // (A_p^F - A_p) theta from boundary values of theta, split into
  // Theta^x (rows) and Theta^y (columns).
  BoundaryStacks boundary_residual(const BoundaryStacks& theta) const;
  // (A^{-1}_y (x) A^{-1}_x) applied to a sparse stack, per slice, accumulated into out
  // when accumulate is set. inv_x/inv_y are the inverse eigenvector matrices.
  void sparse_forward_transform(const BoundaryStacks& r, const Eigen::MatrixXcd& inv_x,
                                const Eigen::MatrixXcd& inv_y, std::span<cplx> out, bool accumulate) const;
  Field3 sparse_forward_transform(const BoundaryStacks& r) const;   // with the EigT matrices
  // Values of (V_y (x) V_x) wbar on the read layers.
  BoundaryStacks boundary_inverse_transform(std::span<const cplx> wbar, const Eigen::MatrixXcd& vx,
                                            const Eigen::MatrixXcd& vy) const;
  BoundaryStacks boundary_inverse_transform(const Field3& wbar) const;   // with the EigT matrices

  Field3 solve(const Field3& y) const;
  // Reference variant with four full sine transforms and a full EigT solve.
  Field3 solve_naive(const Field3& y) const;

  void apply(std::span<const cplx> in, std::span<cplx> out) const override;
  std::string name() const override;

  const PfftStats& stats() const { return stats_; }
  void reset_stats() const { stats_ = {}; }

 private:
  Grid3 grid_;
  std::array<cplx, 3> gamma_, zeta_;
  std::array<double, 3> alpha_;
  EigTPrecond eigt_;
  SineSolver sine_;
  Eigen::MatrixXcd sx_, sy_;   // sine eigenvector matrices (symmetric, orthogonal)
  std::vector<int> write_rows_, write_cols_, read_rows_, read_cols_;
  mutable PfftStats stats_;
};

}  // namespace helm
