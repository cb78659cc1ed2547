#include "helm/pfft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

namespace helm {

namespace {

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<int> layer_set(int n, int depth) {
  std::vector<int> s;
  for (int d = 0; d < depth; ++d) {
    s.push_back(d);
    s.push_back(n - 1 - d);
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  s.erase(std::remove_if(s.begin(), s.end(), [n](int v) { return v < 0 || v >= n; }), s.end());
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Sine transform

SineTransform2D::SineTransform2D(int nx, int ny, int nz) : nx_(nx), ny_(ny), nz_(nz) {
  if (nx < 1 || ny < 1 || nz < 1) throw Error("SineTransform2D: sizes must be positive");
  const std::size_t total = 2 * std::size_t(nx) * ny * nz;
  double* scratch = fftw_alloc_real(total);
  const fftw_r2r_kind kind = FFTW_RODFT00;
  {
    fftw_iodim dim{nx, 2, 2};
    fftw_iodim how[2] = {{2, 1, 1}, {ny * nz, 2 * nx, 2 * nx}};
    plan_x_ = fftw_plan_guru_r2r(1, &dim, 2, how, scratch, scratch, &kind, FFTW_ESTIMATE);
  }
  {
    fftw_iodim dim{ny, 2 * nx, 2 * nx};
    fftw_iodim how[3] = {{2, 1, 1}, {nx, 2, 2}, {nz, 2 * nx * ny, 2 * nx * ny}};
    plan_y_ = fftw_plan_guru_r2r(1, &dim, 3, how, scratch, scratch, &kind, FFTW_ESTIMATE);
  }
  fftw_free(scratch);
  if (!plan_x_ || !plan_y_) throw Error("SineTransform2D: FFTW planning failed");
  scale_ = 1.0 / std::sqrt(4.0 * (nx + 1.0) * (ny + 1.0));
}

SineTransform2D::~SineTransform2D() {
  if (plan_x_) fftw_destroy_plan(static_cast<fftw_plan>(plan_x_));
  if (plan_y_) fftw_destroy_plan(static_cast<fftw_plan>(plan_y_));
}

void SineTransform2D::apply(std::span<cplx> data) const {
  if (data.size() != size()) throw GridMismatch("SineTransform2D::apply: size mismatch");
  double* p = reinterpret_cast<double*>(data.data());
  CVector staging;
  if (fftw_alignment_of(p) != 0) {
    staging.assign(data.begin(), data.end());
    p = reinterpret_cast<double*>(staging.data());
  }
  fftw_execute_r2r(static_cast<fftw_plan>(plan_x_), p, p);
  fftw_execute_r2r(static_cast<fftw_plan>(plan_y_), p, p);
  const std::size_t n = 2 * size();
  for (std::size_t k = 0; k < n; ++k) p[k] *= scale_;
  if (!staging.empty()) std::copy(staging.begin(), staging.end(), data.begin());
}

// ---------------------------------------------------------------------------
// Sine solver

SineSolver::SineSolver(const Grid3& grid, cplx gamma_z, cplx zeta_z, std::vector<cplx> k0_profile, SchemeOrder order)
    : grid_(grid), order_(order), dirichlet_z_(gamma_z == cplx(0.0) && zeta_z == cplx(1.0)) {
  if (int(k0_profile.size()) != grid.nz()) throw GridMismatch("SineSolver: k0 profile length must equal nz");
  if (order == SchemeOrder::Sixth && !grid.uniform(1e-12))
    throw GridMismatch("SineSolver: the sixth-order symbol needs h_x = h_y = h_z");
  dst_ = std::make_unique<SineTransform2D>(grid.nx(), grid.ny(), grid.nz());
  ModeSymbol sym;
  sym.order = order;
  sym.h = {grid.h(0), grid.h(1), grid.h(2)};
  for (const auto& k : k0_profile) sym.k_sq.push_back(k * k);
  if (order != SchemeOrder::Second)
    for (const auto& k : sym.k_sq)
      if (k != sym.k_sq[0]) throw Error("SineSolver: high-order symbols need a z-independent k0");
  const int nx = grid.nx(), ny = grid.ny();
  const double hx2 = grid.h(0) * grid.h(0), hy2 = grid.h(1) * grid.h(1);
  auto coeffs = [sym, nx, ny, hx2, hy2](std::size_t m, std::span<cplx> c) {
    const int i = int(m % nx), j = int(m / nx);
    const double lx = 2.0 * std::cos(std::numbers::pi * (i + 1) / (nx + 1.0));
    const double ly = 2.0 * std::cos(std::numbers::pi * (j + 1) / (ny + 1.0));
    return sym.line((lx - 2.0) / hx2, (ly - 2.0) / hy2, c);
  };
  auto name = [nx](std::size_t m) {
    return "(i, j) = (" + std::to_string(m % nx + 1) + ", " + std::to_string(m / nx + 1) + ")";
  };
  lines_ = std::make_unique<LineSystems>(grid.slice_size(), grid.nz(), gamma_z, zeta_z, coeffs, name);
}

std::unique_ptr<SineSolver> SineSolver::dirichlet(const Grid3& grid, cplx k0, SchemeOrder order) {
  return std::make_unique<SineSolver>(grid, 0.0, 1.0, k0_profile_constant(grid.nz(), k0), order);
}

void SineSolver::apply(std::span<const cplx> in, std::span<cplx> out) const {
  if (in.data() != out.data()) std::copy(in.begin(), in.end(), out.begin());
  dst_->apply(out);
  lines_->solve(out);
  dst_->apply(out);
}

Field3 SineSolver::solve(const Field3& y) const {
  require_same_grid(grid_, y.grid(), "SineSolver::solve");
  Field3 out(grid_);
  apply(y.values(), out.values());
  return out;
}

std::string SineSolver::name() const {
  if (dirichlet_z_) return "fft" + std::to_string(order_value(order_));
  return "sine-absorbing-z";
}

// ---------------------------------------------------------------------------
// Boundary stacks

BoundaryStacks::BoundaryStacks(int nx_, int ny_, int nz_, std::vector<int> rows_, std::vector<int> cols_)
    : nx(nx_), ny(ny_), nz(nz_), rows(std::move(rows_)), cols(std::move(cols_)),
      row_data(std::size_t(nz_) * rows.size() * ny_), col_data(std::size_t(nz_) * cols.size() * nx_) {}

cplx BoundaryStacks::value(int i, int j, int l) const {
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (rows[r] == i) return row(r, j, l);
  for (std::size_t c = 0; c < cols.size(); ++c)
    if (cols[c] == j) return col(c, i, l);
  throw Error("BoundaryStacks::value: (" + std::to_string(i) + ", " + std::to_string(j) + ") is not stored");
}

bool BoundaryStacks::is_zero() const {
  return std::all_of(row_data.begin(), row_data.end(), [](cplx v) { return v == cplx(0.0); }) &&
         std::all_of(col_data.begin(), col_data.end(), [](cplx v) { return v == cplx(0.0); });
}

Field3 BoundaryStacks::densify_sum(const Grid3& grid) const {
  Field3 f(grid);
  for (int l = 0; l < nz; ++l) {
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (int j = 0; j < ny; ++j) f(rows[r], j, l) += row(r, j, l);
    for (std::size_t c = 0; c < cols.size(); ++c)
      for (int i = 0; i < nx; ++i) f(i, cols[c], l) += col(c, i, l);
  }
  return f;
}

Field3 BoundaryStacks::densify_values(const Grid3& grid) const {
  Field3 f(grid);
  for (int l = 0; l < nz; ++l) {
    for (std::size_t c = 0; c < cols.size(); ++c)
      for (int i = 0; i < nx; ++i) f(i, cols[c], l) = col(c, i, l);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (int j = 0; j < ny; ++j) f(rows[r], j, l) = row(r, j, l);
  }
  return f;
}

BoundaryStacks BoundaryStacks::gather(const Field3& f, std::vector<int> rows, std::vector<int> cols) {
  const Grid3& g = f.grid();
  BoundaryStacks s(g.nx(), g.ny(), g.nz(), std::move(rows), std::move(cols));
  for (int l = 0; l < g.nz(); ++l) {
    for (std::size_t r = 0; r < s.rows.size(); ++r)
      for (int j = 0; j < g.ny(); ++j) s.row(r, j, l) = f(s.rows[r], j, l);
    for (std::size_t c = 0; c < s.cols.size(); ++c)
      for (int i = 0; i < g.nx(); ++i) s.col(c, i, l) = f(i, s.cols[c], l);
  }
  return s;
}

// ---------------------------------------------------------------------------
// PFFT

PfftPrecond::PfftPrecond(const Grid3& grid, const BoundaryCoeffs& bc, std::vector<cplx> k0_profile)
    : grid_(grid),
      gamma_(bc.gamma),
      zeta_(bc.zeta),
      eigt_(grid, bc, k0_profile, SchemeOrder::Second),
      sine_(grid, eigt_.gamma(2), eigt_.zeta(2), k0_profile, SchemeOrder::Second) {
  for (int a = 0; a < 3; ++a) {
    gamma_[a] = eigt_.gamma(a);
    zeta_[a] = eigt_.zeta(a);
    alpha_[a] = eigt_.alpha(a);
  }
  sx_ = sine_eigensystem(grid.nx()).V;
  sy_ = sine_eigensystem(grid.ny()).V;
  write_rows_ = layer_set(grid.nx(), 1);
  write_cols_ = layer_set(grid.ny(), 1);
  read_rows_ = layer_set(grid.nx(), zeta_[0] == cplx(1.0) ? 1 : 2);
  read_cols_ = layer_set(grid.ny(), zeta_[1] == cplx(1.0) ? 1 : 2);
}

Field3 PfftPrecond::sine_solve(const Field3& y, bool boundary_only) const {
  require_same_grid(grid_, y.grid(), "PfftPrecond::sine_solve");
  Field3 hat = y;
  sine_.transform().apply(hat.values());
  sine_.lines().solve(hat.values());
  if (!boundary_only) {
    sine_.transform().apply(hat.values());
    return hat;
  }
  return boundary_inverse_transform(hat.values(), sx_, sy_).densify_values(grid_);
}

BoundaryStacks PfftPrecond::boundary_residual(const BoundaryStacks& th) const {
  const int nx = grid_.nx(), ny = grid_.ny(), nz = grid_.nz();
  BoundaryStacks r(nx, ny, nz, write_rows_, write_cols_);
  const cplx gx = gamma_[0], gy = gamma_[1];
  const cplx ox = 1.0 - zeta_[0], oy = 1.0 - zeta_[1];
  const double ax = alpha_[0], ay = alpha_[1];
  for (int l = 0; l < nz; ++l) {
    for (std::size_t k = 0; k < write_rows_.size(); ++k) {
      const int i = write_rows_[k];
      const int inner = i == 0 ? 1 : nx - 2;
      for (int j = 0; j < ny; ++j) {
        cplx v = -gx * th.value(i, j, l);
        if (ox != cplx(0.0)) v += ox * th.value(inner, j, l);
        r.row(k, j, l) = ax * v;
      }
    }
    for (std::size_t k = 0; k < write_cols_.size(); ++k) {
      const int j = write_cols_[k];
      const int inner = j == 0 ? 1 : ny - 2;
      for (int i = 0; i < nx; ++i) {
        cplx v = -gy * th.value(i, j, l);
        if (oy != cplx(0.0)) v += oy * th.value(i, inner, l);
        r.col(k, i, l) = ay * v;
      }
    }
  }
  return r;
}

void PfftPrecond::sparse_forward_transform(const BoundaryStacks& r, const Eigen::MatrixXcd& inv_x,
                                           const Eigen::MatrixXcd& inv_y, std::span<cplx> out,
                                           bool accumulate) const {
  const int nx = grid_.nx(), ny = grid_.ny(), nz = grid_.nz();
  if (out.size() != grid_.size()) throw GridMismatch("sparse_forward_transform: size mismatch");
  const int nr = int(r.rows.size()), nc = int(r.cols.size());
  Eigen::MatrixXcd ax(nx, nr), by(ny, nc);
  for (int k = 0; k < nr; ++k) ax.col(k) = inv_x.col(r.rows[k]);
  for (int k = 0; k < nc; ++k) by.col(k) = inv_y.col(r.cols[k]);
  Eigen::MatrixXcd P(ny, nr), Q(nx, nc);
  for (int l = 0; l < nz; ++l) {
    Eigen::Map<Eigen::MatrixXcd> O(out.data() + grid_.slice_size() * l, nx, ny);
    if (!accumulate) O.setZero();
    if (nr > 0) {
      Eigen::Map<const Eigen::MatrixXcd> Rt(r.row_data.data() + std::size_t(l) * nr * ny, ny, nr);
      P.noalias() = inv_y * Rt;                 // ny^2 nr
      O.noalias() += ax * P.transpose();        // nx nr ny
    }
    if (nc > 0) {
      Eigen::Map<const Eigen::MatrixXcd> C(r.col_data.data() + std::size_t(l) * nc * nx, nx, nc);
      Q.noalias() = inv_x * C;                  // nx^2 nc
      O.noalias() += Q * by.transpose();        // nx nc ny
    }
  }
  const std::size_t NX = nx, NY = ny;
  stats_.correction_ops += std::size_t(nz) * (nr * (NY * NY + NX * NY) + nc * (NX * NX + NX * NY));
}

Field3 PfftPrecond::sparse_forward_transform(const BoundaryStacks& r) const {
  Field3 out(grid_);
  sparse_forward_transform(r, eigt_.eig_x().V_inv, eigt_.eig_y().V_inv, out.values(), false);
  return out;
}

BoundaryStacks PfftPrecond::boundary_inverse_transform(std::span<const cplx> wbar, const Eigen::MatrixXcd& vx,
                                                       const Eigen::MatrixXcd& vy) const {
  const int nx = grid_.nx(), ny = grid_.ny(), nz = grid_.nz();
  BoundaryStacks s(nx, ny, nz, read_rows_, read_cols_);
  const int nr = int(read_rows_.size()), nc = int(read_cols_.size());
  Eigen::MatrixXcd vxr(nr, nx), vyc(nc, ny);
  for (int k = 0; k < nr; ++k) vxr.row(k) = vx.row(read_rows_[k]);
  for (int k = 0; k < nc; ++k) vyc.row(k) = vy.row(read_cols_[k]);
  Eigen::MatrixXcd S(nr, ny), T(nx, nc);
  for (int l = 0; l < nz; ++l) {
    Eigen::Map<const Eigen::MatrixXcd> Wb(wbar.data() + grid_.slice_size() * l, nx, ny);
    // Rows: s_i = V_x(i, :) Wbar, then W(i, j) = sum_m s_{i,m} V_y(j, m).
    S.noalias() = vxr * Wb;
    Eigen::Map<Eigen::MatrixXcd> Rt(s.row_data.data() + std::size_t(l) * nr * ny, ny, nr);
    Rt.noalias() = vy * S.transpose();
    // Columns: W(:, j) = V_x (Wbar V_y(j, :)^T).
    T.noalias() = Wb * vyc.transpose();
    Eigen::Map<Eigen::MatrixXcd> C(s.col_data.data() + std::size_t(l) * nc * nx, nx, nc);
    C.noalias() = vx * T;
  }
  const std::size_t NX = nx, NY = ny;
  stats_.correction_ops += std::size_t(nz) * (nr * (NX * NY + NY * NY) + nc * (NX * NY + NX * NX));
  return s;
}

BoundaryStacks PfftPrecond::boundary_inverse_transform(const Field3& wbar) const {
  require_same_grid(grid_, wbar.grid(), "boundary_inverse_transform");
  return boundary_inverse_transform(wbar.values(), eigt_.eig_x().V, eigt_.eig_y().V);
}

void PfftPrecond::apply(std::span<const cplx> in, std::span<cplx> out) const {
  const std::size_t N = grid_.size();
  if (in.size() != N || out.size() != N) throw GridMismatch("PfftPrecond::apply: size mismatch");
  ++stats_.applications;

  // Step 1: transformed Y is kept for Step 3; Theta only on the read layers.
  auto t0 = Clock::now();
  CVector yhat(in.begin(), in.end());
  sine_.transform().apply(yhat);
  ++stats_.transform_calls;
  CVector work(yhat);
  sine_.lines().solve(work);
  BoundaryStacks theta = boundary_inverse_transform(work, sx_, sy_);
  stats_.step1_seconds += seconds_since(t0);

  // Step 2: W = A_p^{-1} (A_p^F - A_p) Theta on the read layers.
  t0 = Clock::now();
  const BoundaryStacks r1 = boundary_residual(theta);
  sparse_forward_transform(r1, eigt_.eig_x().V_inv, eigt_.eig_y().V_inv, work, false);
  eigt_.vertical_solve(work);
  stats_.correction_ops += eigt_.lines().ops_per_solve();
  const BoundaryStacks w = boundary_inverse_transform(work, eigt_.eig_x().V, eigt_.eig_y().V);
  stats_.step2_seconds += seconds_since(t0);

  // Step 3: A_p^F U = Y + (A_p^F - A_p)(Theta + W).
  t0 = Clock::now();
  for (std::size_t k = 0; k < theta.row_data.size(); ++k) theta.row_data[k] += w.row_data[k];
  for (std::size_t k = 0; k < theta.col_data.size(); ++k) theta.col_data[k] += w.col_data[k];
  const BoundaryStacks r2 = boundary_residual(theta);
  sparse_forward_transform(r2, sx_, sy_, yhat, true);
  sine_.lines().solve(yhat);
  sine_.transform().apply(yhat);
  ++stats_.transform_calls;
  std::copy(yhat.begin(), yhat.end(), out.begin());
  stats_.step3_seconds += seconds_since(t0);
}

Field3 PfftPrecond::solve(const Field3& y) const {
  require_same_grid(grid_, y.grid(), "PfftPrecond::solve");
  Field3 out(grid_);
  apply(y.values(), out.values());
  return out;
}

Field3 PfftPrecond::solve_naive(const Field3& y) const {
  require_same_grid(grid_, y.grid(), "PfftPrecond::solve_naive");
  const Field3 theta = sine_.solve(y);
  const Field3 r1 = boundary_residual(BoundaryStacks::gather(theta, read_rows_, read_cols_)).densify_sum(grid_);
  const Field3 w = eigt_.solve(r1);
  const Field3 tw = theta + w;
  Field3 rhs = y + boundary_residual(BoundaryStacks::gather(tw, read_rows_, read_cols_)).densify_sum(grid_);
  return sine_.solve(rhs);
}

std::string PfftPrecond::name() const { return zeta_[0] == cplx(1.0) ? "pfft2" : "pfft3"; }

}  // namespace helm
