#include "helm/eigt.hpp"

#include <chrono>
#include <cmath>

namespace helm {

// ---------------------------------------------------------------------------
// LineSystems

LineSystems::LineSystems(std::size_t nlines, int nz, cplx gamma_z, cplx zeta_z, const CoeffFn& coeffs,
                         const NameFn& name)
    : nlines_(nlines), nz_(nz), gamma_(gamma_z), zeta_(zeta_z), coeffs_(coeffs), w_(nlines),
      inv_pivot_(nlines * std::size_t(nz)) {
  if (nz < 1) throw Error("LineSystems: nz must be positive");
  const int n = nz;
  CVector c(n);
  std::vector<char> suspect(nlines, 0);
  for (std::size_t m = 0; m < nlines; ++m) {
    const cplx w = coeffs(m, c);
    w_[m] = w;
    // Non-pivoted elimination; sub_l * sup_{l-1} is w^2 except next to the
    // corners where one factor carries zeta.
    cplx piv = w * gamma_ + c[0];
    for (int l = 0; l < n; ++l) {
      if (l > 0) {
        const cplx diag = (l == n - 1) ? w * gamma_ + c[l] : c[l];
        const cplx sub = (l == n - 1) ? zeta_ * w : w;
        const cplx sup_prev = (l == 1) ? zeta_ * w : w;
        piv = diag - sub * sup_prev * inv_pivot_[m + nlines * (l - 1)];
      }
      const cplx ip = 1.0 / piv;
      if (!std::isfinite(ip.real()) || !std::isfinite(ip.imag())) suspect[m] = 1;
      inv_pivot_[m + nlines * l] = std::isfinite(std::abs(ip)) ? ip : cplx(0.0);
    }
  }

  // Dry run: a residual check on a fixed right-hand side decides which lines
  // need the pivoted fallback.
  CVector b(nlines * std::size_t(n)), x, r(b.size());
  for (int l = 0; l < n; ++l)
    for (std::size_t m = 0; m < nlines; ++m) b[m + nlines * l] = std::polar(1.0, 0.7 * l + 0.3 * double(m % 7));
  x = b;
  solve(x);
  multiply(x, r);
  for (std::size_t m = 0; m < nlines; ++m) {
    if (suspect[m]) continue;
    double num = 0.0, den = 0.0;
    for (int l = 0; l < n; ++l) {
      num = std::max(num, std::abs(r[m + nlines * l] - b[m + nlines * l]));
      den = std::max(den, std::abs(b[m + nlines * l]));
    }
    if (!(num <= 1e-9 * den)) suspect[m] = 1;
  }
  for (std::size_t m = 0; m < nlines; ++m) {
    if (!suspect[m]) continue;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(dense_line(m));
    if (!(lu.rcond() > 1e-14))
      throw ResonanceError("vertical tridiagonal system " + (name ? name(m) : std::to_string(m)) +
                           " is singular to working precision");
    fallback_.push_back({m, std::move(lu)});
  }
}

Eigen::MatrixXcd LineSystems::dense_line(std::size_t m) const {
  const int n = nz_;
  CVector c(n);
  const cplx w = coeffs_(m, c);
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(n, n);
  for (int l = 0; l < n; ++l) T(l, l) = c[l];
  if (n == 1) {
    T(0, 0) += w * gamma_;
    return T;
  }
  for (int l = 0; l + 1 < n; ++l) {
    T(l, l + 1) = w;
    T(l + 1, l) = w;
  }
  T(0, 0) += w * gamma_;
  T(n - 1, n - 1) += w * gamma_;
  T(0, 1) = zeta_ * w;
  T(n - 1, n - 2) = zeta_ * w;
  return T;
}

cplx LineSystems::coefficient(std::size_t m, int l) const {
  CVector c(nz_);
  coeffs_(m, c);
  return c[l];
}

void LineSystems::solve(std::span<cplx> data) const {
  const std::size_t L = nlines_;
  const int n = nz_;
  if (data.size() != L * std::size_t(n)) throw GridMismatch("LineSystems::solve: size mismatch");
  std::vector<CVector> saved;
  if (!fallback_.empty()) {
    saved.reserve(fallback_.size());
    for (const auto& f : fallback_) {
      CVector col(n);
      for (int l = 0; l < n; ++l) col[l] = data[f.line + L * l];
      saved.push_back(std::move(col));
    }
  }
  cplx* y = data.data();
  const cplx* ip = inv_pivot_.data();
  const cplx* w = w_.data();
  // Forward elimination.
  for (int l = 1; l < n; ++l) {
    const cplx sub_f = (l == n - 1) ? zeta_ : cplx(1.0);
    cplx* yl = y + L * l;
    const cplx* yp = y + L * (l - 1);
    const cplx* ipp = ip + L * (l - 1);
    for (std::size_t m = 0; m < L; ++m) yl[m] -= sub_f * w[m] * ipp[m] * yp[m];
  }
  // Back substitution.
  {
    cplx* yl = y + L * (n - 1);
    const cplx* ipl = ip + L * (n - 1);
    for (std::size_t m = 0; m < L; ++m) yl[m] *= ipl[m];
  }
  for (int l = n - 2; l >= 0; --l) {
    const cplx sup_f = (l == 0) ? zeta_ : cplx(1.0);
    cplx* yl = y + L * l;
    const cplx* yn = y + L * (l + 1);
    const cplx* ipl = ip + L * l;
    for (std::size_t m = 0; m < L; ++m) yl[m] = ipl[m] * (yl[m] - sup_f * w[m] * yn[m]);
  }
  for (std::size_t k = 0; k < fallback_.size(); ++k) {
    const auto& f = fallback_[k];
    Eigen::VectorXcd rhs(n);
    for (int l = 0; l < n; ++l) rhs(l) = saved[k][l];
    const Eigen::VectorXcd sol = f.lu.solve(rhs);
    for (int l = 0; l < n; ++l) data[f.line + L * l] = sol(l);
  }
}

void LineSystems::multiply(std::span<const cplx> x, std::span<cplx> out) const {
  const std::size_t L = nlines_;
  const int n = nz_;
  CVector c(n);
  for (std::size_t m = 0; m < L; ++m) {
    const cplx w = coeffs_(m, c);
    for (int l = 0; l < n; ++l) {
      cplx v = c[l] * x[m + L * l];
      if (n == 1) {
        v += w * gamma_ * x[m];
      } else if (l == 0) {
        v += w * gamma_ * x[m] + zeta_ * w * x[m + L];
      } else if (l == n - 1) {
        v += w * gamma_ * x[m + L * l] + zeta_ * w * x[m + L * (l - 1)];
      } else {
        v += w * (x[m + L * (l - 1)] + x[m + L * (l + 1)]);
      }
      out[m + L * l] = v;
    }
  }
}

// ---------------------------------------------------------------------------
// Symbols

cplx ModeSymbol::line(cplx mx, cplx my, std::span<cplx> c) const {
  const double hx2 = h[0] * h[0], hy2 = h[1] * h[1], hz2 = h[2] * h[2];
  const std::size_t n = k_sq.size();
  switch (order) {
    case SchemeOrder::Second: {
      for (std::size_t l = 0; l < n; ++l) c[l] = hz2 * (mx + my + k_sq[l]) - 2.0;
      return 1.0;
    }
    case SchemeOrder::Fourth: {
      const cplx k = k_sq[0];
      const cplx a = hz2 * (mx + my + (hx2 + hy2) / 12.0 * mx * my + k * (1.0 + hx2 / 12.0 * mx + hy2 / 12.0 * my));
      const cplx w = 1.0 + (hx2 + hz2) / 12.0 * mx + (hy2 + hz2) / 12.0 * my + k * hz2 / 12.0;
      for (std::size_t l = 0; l < n; ++l) c[l] = a - 2.0 * w;
      return w;
    }
    case SchemeOrder::Sixth: {
      const cplx k = k_sq[0];
      const double h2 = hz2, h4 = h2 * h2;
      const cplx a = h2 * ((1.0 + k * h2 / 30.0) * (mx + my) + k - h2 * k * k / 20.0 +
                           h2 / 6.0 * (1.0 + k * h2 / 15.0) * mx * my);
      const cplx w = (1.0 + k * h2 / 30.0) + h4 / 30.0 * mx * my + h2 / 6.0 * (1.0 + k * h2 / 15.0) * (mx + my);
      for (std::size_t l = 0; l < n; ++l) c[l] = a - 2.0 * w;
      return w;
    }
  }
  throw Error("ModeSymbol: bad order");
}

std::vector<cplx> k0_profile_constant(int nz, cplx k0) { return std::vector<cplx>(std::size_t(nz), k0); }

TridiagEig axis_eigensystem(int n, cplx gamma, cplx zeta) {
  if (gamma == cplx(0.0) && zeta == cplx(1.0)) return sine_eigensystem(n);
  return decompose({n, gamma, zeta});
}

// ---------------------------------------------------------------------------
// EigT

EigTPrecond::EigTPrecond(const Grid3& grid, const BoundaryCoeffs& bc, std::vector<cplx> k0_profile,
                         SchemeOrder order)
    : grid_(grid), order_(order), gamma_(bc.gamma), zeta_(bc.zeta) {
  const auto t0 = std::chrono::steady_clock::now();
  if (bc.mode == BoundaryMode::OracleGhost) {
    gamma_ = {0.0, 0.0, 0.0};
    zeta_ = {1.0, 1.0, 1.0};
  }
  if (grid.nx() < 2 || grid.ny() < 2) throw GridMismatch("EigTPrecond: needs at least two nodes in x and y");
  if (int(k0_profile.size()) != grid.nz()) throw GridMismatch("EigTPrecond: k0 profile length must equal nz");
  if (order == SchemeOrder::Sixth && !grid.uniform(1e-12))
    throw GridMismatch("EigTPrecond: the sixth-order symbol needs h_x = h_y = h_z");
  const double hz2 = grid.h(2) * grid.h(2);
  alpha_ = {hz2 / (grid.h(0) * grid.h(0)), hz2 / (grid.h(1) * grid.h(1)), 1.0};

  symbol_.order = order;
  symbol_.h = {grid.h(0), grid.h(1), grid.h(2)};
  symbol_.k_sq.resize(k0_profile.size());
  for (std::size_t l = 0; l < k0_profile.size(); ++l) symbol_.k_sq[l] = k0_profile[l] * k0_profile[l];
  if (order != SchemeOrder::Second)
    for (const auto& k : symbol_.k_sq)
      if (k != symbol_.k_sq[0]) throw Error("EigTPrecond: high-order symbols need a z-independent k0");

  ex_ = axis_eigensystem(grid.nx(), gamma_[0], zeta_[0]);
  ey_ = axis_eigensystem(grid.ny(), gamma_[1], zeta_[1]);

  const int nx = grid.nx();
  const double hx2 = grid.h(0) * grid.h(0), hy2 = grid.h(1) * grid.h(1);
  auto coeffs = [this, nx, hx2, hy2](std::size_t m, std::span<cplx> c) {
    const int i = int(m % nx), j = int(m / nx);
    return symbol_.line((ex_.D(i) - 2.0) / hx2, (ey_.D(j) - 2.0) / hy2, c);
  };
  auto name = [nx](std::size_t m) {
    return "(i, j) = (" + std::to_string(m % nx + 1) + ", " + std::to_string(m / nx + 1) + ")";
  };
  lines_ = std::make_unique<LineSystems>(grid.slice_size(), grid.nz(), gamma_[2], zeta_[2], coeffs, name);
  setup_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

cplx EigTPrecond::bbar(int i, int j, int l) const {
  return lines_->coefficient(std::size_t(i) + std::size_t(grid_.nx()) * j, l);
}

namespace {

using MapC = Eigen::Map<const Eigen::MatrixXcd>;
using Map = Eigen::Map<Eigen::MatrixXcd>;

void slice_product(const Grid3& g, const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& BT, std::span<const cplx> in,
                   std::span<cplx> out) {
  const int nx = g.nx(), ny = g.ny();
  if (in.size() != g.size() || out.size() != g.size()) throw GridMismatch("transform: size mismatch");
  Eigen::MatrixXcd tmp(nx, ny);
  for (int l = 0; l < g.nz(); ++l) {
    MapC Y(in.data() + g.slice_size() * l, nx, ny);
    tmp.noalias() = A * Y;
    Map O(out.data() + g.slice_size() * l, nx, ny);
    O.noalias() = tmp * BT;
  }
}

}  // namespace

void EigTPrecond::forward_transform(std::span<const cplx> y, std::span<cplx> out) const {
  slice_product(grid_, ex_.V_inv, ey_.V_inv.transpose(), y, out);
}

void EigTPrecond::inverse_transform(std::span<const cplx> ybar, std::span<cplx> out) const {
  slice_product(grid_, ex_.V, ey_.V.transpose(), ybar, out);
}

void EigTPrecond::vertical_solve(std::span<cplx> data) const { lines_->solve(data); }

Field3 EigTPrecond::forward_transform(const Field3& y) const {
  require_same_grid(grid_, y.grid(), "EigTPrecond::forward_transform");
  Field3 out(grid_);
  forward_transform(y.values(), out.values());
  return out;
}

Field3 EigTPrecond::inverse_transform(const Field3& ybar) const {
  require_same_grid(grid_, ybar.grid(), "EigTPrecond::inverse_transform");
  Field3 out(grid_);
  inverse_transform(ybar.values(), out.values());
  return out;
}

Field3 EigTPrecond::vertical_solve(const Field3& ybar) const {
  require_same_grid(grid_, ybar.grid(), "EigTPrecond::vertical_solve");
  Field3 out = ybar;
  lines_->solve(out.values());
  return out;
}

Field3 EigTPrecond::solve(const Field3& y) const {
  require_same_grid(grid_, y.grid(), "EigTPrecond::solve");
  Field3 out(grid_);
  apply(y.values(), out.values());
  return out;
}

void EigTPrecond::apply(std::span<const cplx> in, std::span<cplx> out) const {
  CVector tmp(grid_.size());
  forward_transform(in, tmp);
  lines_->solve(tmp);
  inverse_transform(tmp, out);
}

std::string EigTPrecond::name() const {
  const bool stag = zeta_[0] == cplx(1.0);
  return "eigt" + std::string(stag ? "2" : "3") +
         (order_ == SchemeOrder::Second ? "" : "-o" + std::to_string(order_value(order_)));
}

std::size_t EigTPrecond::transform_ops() const {
  const std::size_t nx = grid_.nx(), ny = grid_.ny(), nz = grid_.nz();
  return nz * (nx * nx * ny + nx * ny * ny);
}

}  // namespace helm
