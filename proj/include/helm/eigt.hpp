#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "helm/eig.hpp"
#include "helm/krylov.hpp"
#include "helm/stencil.hpp"

namespace helm {

// A batch of independent tridiagonal systems along z, one per horizontal
// mode. Line m has matrix w_m * Lambda_z + diag(c_m): first row
// (w gamma + c_0, zeta w), interior rows (w, c_l, w), last row
// (zeta w, w gamma + c_{n-1}). Data is stored line-fastest, entry
// (m, l) at m + nlines * l, i.e. exactly a Field3 in slice-major order.
class LineSystems {
 public:
  // coeffs(m, c) fills c[0..nz) for line m and returns w_m.
  using CoeffFn = std::function<cplx(std::size_t, std::span<cplx>)>;
  using NameFn = std::function<std::string(std::size_t)>;

  LineSystems(std::size_t nlines, int nz, cplx gamma_z, cplx zeta_z, const CoeffFn& coeffs, const NameFn& name = {});

  std::size_t nlines() const { return nlines_; }
  int nz() const { return nz_; }

  void solve(std::span<cplx> data) const;
  // Applies the line matrices (for checks).
  void multiply(std::span<const cplx> x, std::span<cplx> out) const;

  std::size_t fallback_lines() const { return fallback_.size(); }
  std::size_t ops_per_solve() const { return nlines_ * std::size_t(nz_) * 4; }
  cplx coefficient(std::size_t m, int l) const;  // recomputed on demand
  cplx weight(std::size_t m) const { return w_[m]; }

 private:
  struct Fallback {
    std::size_t line;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
  };
  Eigen::MatrixXcd dense_line(std::size_t m) const;

  std::size_t nlines_;
  int nz_;
  cplx gamma_, zeta_;
  CoeffFn coeffs_;
  CVector w_;
  CVector inv_pivot_;   // 1 / eliminated diagonal, layout as data
  std::vector<Fallback> fallback_;
};

// Horizontal-mode symbol of the constant-coefficient h_z^2-scaled operator:
// for eigenvalues mu_x, mu_y of the closed x/y second differences the
// operator reduces to a(l) + b D_z. Returns w = b / h_z^2 and fills
// c_l = a(l) - 2 w so that the z-line matrix is w Lambda_z + diag(c).
// Orders above Second require a z-independent k^2.
struct ModeSymbol {
  SchemeOrder order = SchemeOrder::Second;
  std::array<double, 3> h{};
  std::vector<cplx> k_sq;   // k0^2(z_l)

  cplx line(cplx mu_x, cplx mu_y, std::span<cplx> c) const;
};

std::vector<cplx> k0_profile_constant(int nz, cplx k0);

// Direct solver for the Kronecker-structured operator
//   A_p = h_z^2 (D_x + D_y + D_z + k0^2(z)),
// each D closed with the boundary coefficients of its axis. With order
// Fourth/Sixth it inverts the corresponding constant-coefficient compact
// operator instead.
class EigTPrecond : public Preconditioner {
 public:
  EigTPrecond(const Grid3& grid, const BoundaryCoeffs& bc, std::vector<cplx> k0_profile,
              SchemeOrder order = SchemeOrder::Second);

  const Grid3& grid() const { return grid_; }
  const TridiagEig& eig_x() const { return ex_; }
  const TridiagEig& eig_y() const { return ey_; }
  const LineSystems& lines() const { return *lines_; }
  cplx gamma(int axis) const { return gamma_[axis]; }
  cplx zeta(int axis) const { return zeta_[axis]; }
  double alpha(int axis) const { return alpha_[axis]; }

  // b-bar of the vertical system for mode (i, j) at level l (0-based).
  cplx bbar(int i, int j, int l) const;

  void forward_transform(std::span<const cplx> y, std::span<cplx> out) const;
  void inverse_transform(std::span<const cplx> ybar, std::span<cplx> out) const;
  void vertical_solve(std::span<cplx> data) const;
  Field3 forward_transform(const Field3& y) const;
  Field3 inverse_transform(const Field3& ybar) const;
  Field3 vertical_solve(const Field3& ybar) const;
  Field3 solve(const Field3& y) const;

  void apply(std::span<const cplx> in, std::span<cplx> out) const override;
  std::string name() const override;

  // Complex multiply-adds of one forward or inverse transform.
  std::size_t transform_ops() const;
  double setup_seconds() const { return setup_seconds_; }

 private:
  Grid3 grid_;
  SchemeOrder order_;
  std::array<cplx, 3> gamma_, zeta_;
  std::array<double, 3> alpha_;
  ModeSymbol symbol_;
  TridiagEig ex_, ey_;
  std::unique_ptr<LineSystems> lines_;
  double setup_seconds_ = 0.0;
};

// Eigensystem of the closed 1D operator along an axis (sine basis for the
// Dirichlet closure).
TridiagEig axis_eigensystem(int n, cplx gamma, cplx zeta);

}  // namespace helm
