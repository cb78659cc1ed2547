#include "helm/stencil.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace helm {

int order_value(SchemeOrder order) { return static_cast<int>(order); }

SchemeOrder order_from_int(int order) {
  switch (order) {
    case 2: return SchemeOrder::Second;
    case 4: return SchemeOrder::Fourth;
    case 6: return SchemeOrder::Sixth;
  }
  throw Error("scheme order must be 2, 4 or 6, got " + std::to_string(order));
}

// ---------------------------------------------------------------------------
// Boundary closures

BoundaryCoeffs BoundaryCoeffs::staggered(const Grid3& grid, cplx k0) {
  BoundaryCoeffs bc;
  bc.mode = BoundaryMode::StaggeredTwoPoint;
  const cplx I(0.0, 1.0);
  for (int a = 0; a < 3; ++a) {
    const double h = grid.h(a);
    bc.gamma[a] = (2.0 + I * k0 * h) / (2.0 - I * k0 * h);
    bc.zeta[a] = 1.0;
  }
  return bc;
}

// Central-difference Sommerfeld condition at a boundary node,
// (U_1 - U_{-1})/(2h) + i k0 U_0 = 0, gives U_{-1} = U_1 + 2 i k0 h U_0.
BoundaryCoeffs BoundaryCoeffs::collocated(const Grid3& grid, cplx k0) {
  BoundaryCoeffs bc;
  bc.mode = BoundaryMode::CollocatedThreePoint;
  const cplx I(0.0, 1.0);
  for (int a = 0; a < 3; ++a) {
    bc.gamma[a] = 2.0 * I * k0 * grid.h(a);
    bc.zeta[a] = 2.0;
  }
  return bc;
}

BoundaryCoeffs BoundaryCoeffs::absorbing(const Grid3& grid, cplx k0) {
  return grid.placement() == Placement::Staggered ? staggered(grid, k0) : collocated(grid, k0);
}

BoundaryCoeffs BoundaryCoeffs::dirichlet() {
  BoundaryCoeffs bc;
  bc.mode = BoundaryMode::Custom;
  return bc;
}

BoundaryCoeffs BoundaryCoeffs::oracle(PointFn exact) {
  BoundaryCoeffs bc;
  bc.mode = BoundaryMode::OracleGhost;
  bc.ghost_value = std::move(exact);
  return bc;
}

BoundaryCoeffs BoundaryCoeffs::custom(std::array<cplx, 3> gamma, std::array<cplx, 3> zeta) {
  BoundaryCoeffs bc;
  bc.mode = BoundaryMode::Custom;
  bc.gamma = gamma;
  bc.zeta = zeta;
  return bc;
}

Medium Medium::uniform(const Grid3& grid, cplx k0) {
  Medium m(grid);
  m.k0 = k0;
  m.k_sq.fill(k0 * k0);
  m.constant = true;
  const cplx ksq = k0 * k0;
  m.k_sq_at = [ksq](double, double, double) { return ksq; };
  m.grad_k_sq = [](double, double, double) { return std::array<cplx, 3>{0.0, 0.0, 0.0}; };
  m.lap_k_sq = [](double, double, double) { return cplx(0.0); };
  return m;
}

// ---------------------------------------------------------------------------
// Helpers

namespace {

// View of a field as (outer, n, inner) along one axis.
struct AxisView {
  int n;
  std::size_t inner;
  std::size_t outer;
};

AxisView axis_view(const Grid3& g, int axis) {
  if (axis == 0) return {g.nx(), 1, std::size_t(g.ny()) * g.nz()};
  if (axis == 1) return {g.ny(), std::size_t(g.nx()), std::size_t(g.nz())};
  return {g.nz(), g.slice_size(), 1};
}

// Second-order derivative estimates from samples along one axis: central in
// the interior, one-sided second order at the faces.
void sample_first_derivative(const Field3& f, int axis, Field3& out) {
  const auto v = axis_view(f.grid(), axis);
  const double h = f.grid().h(axis);
  for (std::size_t o = 0; o < v.outer; ++o)
    for (int p = 0; p < v.n; ++p)
      for (std::size_t q = 0; q < v.inner; ++q) {
        const std::size_t base = o * v.n * v.inner + q;
        auto at = [&](int k) { return f[base + std::size_t(k) * v.inner]; };
        cplx d;
        if (v.n == 1) d = 0.0;
        else if (v.n == 2) d = (at(1) - at(0)) / h;
        else if (p == 0) d = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
        else if (p == v.n - 1) d = (3.0 * at(p) - 4.0 * at(p - 1) + at(p - 2)) / (2.0 * h);
        else d = (at(p + 1) - at(p - 1)) / (2.0 * h);
        out[base + std::size_t(p) * v.inner] = d;
      }
}

void sample_second_derivative_acc(const Field3& f, int axis, Field3& out) {
  const auto v = axis_view(f.grid(), axis);
  const double h2 = f.grid().h(axis) * f.grid().h(axis);
  for (std::size_t o = 0; o < v.outer; ++o)
    for (int p = 0; p < v.n; ++p)
      for (std::size_t q = 0; q < v.inner; ++q) {
        const std::size_t base = o * v.n * v.inner + q;
        auto at = [&](int k) { return f[base + std::size_t(k) * v.inner]; };
        cplx d;
        if (v.n < 3) d = 0.0;
        else if (v.n >= 4 && p == 0) d = (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / h2;
        else if (v.n >= 4 && p == v.n - 1) d = (2.0 * at(p) - 5.0 * at(p - 1) + 4.0 * at(p - 2) - at(p - 3)) / h2;
        else {
          const int c = std::clamp(p, 1, v.n - 2);
          d = (at(c + 1) - 2.0 * at(c) + at(c - 1)) / h2;
        }
        out[base + std::size_t(p) * v.inner] += d;
      }
}

// Point values of f around node (i, j, l): the analytic evaluator when
// available, otherwise samples with indices clamped into the grid.
struct Sampler {
  const Source& src;
  const Grid3& g;

  cplx operator()(int i, int j, int l) const {
    if (src.value) return src.value(g.coord(0, i), g.coord(1, j), g.coord(2, l));
    i = std::clamp(i, 0, g.nx() - 1);
    j = std::clamp(j, 0, g.ny() - 1);
    l = std::clamp(l, 0, g.nz() - 1);
    return src.f(i, j, l);
  }
};

std::array<int, 3> unit(int axis, int s) {
  std::array<int, 3> d{0, 0, 0};
  d[axis] = s;
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Operator

HelmholtzOperator::HelmholtzOperator(SchemeOrder order, const Grid3& grid, std::array<cplx, 3> gamma,
                                     std::array<cplx, 3> zeta, bool constant_k, Field3 k_sq)
    : grid_(grid), order_(order), gamma_(gamma), zeta_(zeta), constant_k_(constant_k), k_sq_(std::move(k_sq)) {}

HelmholtzOperator::HelmholtzOperator(SchemeOrder order, const Medium& medium, const BoundaryCoeffs& bc)
    : grid_(medium.grid()),
      order_(order),
      gamma_(bc.gamma),
      zeta_(bc.zeta),
      constant_k_(medium.constant),
      k_sq_(medium.k_sq) {
  if (bc.mode == BoundaryMode::OracleGhost) {
    gamma_ = {0.0, 0.0, 0.0};
    zeta_ = {1.0, 1.0, 1.0};
    if (!bc.ghost_value) throw Error("HelmholtzOperator: OracleGhost closure needs a ghost_value callback");
  }
  if (order == SchemeOrder::Sixth && !grid_.uniform(1e-12))
    throw GridMismatch("HelmholtzOperator: the sixth-order scheme needs h_x = h_y = h_z");
  if (order != SchemeOrder::Sixth || constant_k_) return;

  std::array<Field3, 3> g{Field3(grid_), Field3(grid_), Field3(grid_)};
  Field3 lap(grid_);
  if (medium.grad_k_sq) {
    for (int l = 0; l < grid_.nz(); ++l)
      for (int j = 0; j < grid_.ny(); ++j)
        for (int i = 0; i < grid_.nx(); ++i) {
          const auto d = medium.grad_k_sq(grid_.coord(0, i), grid_.coord(1, j), grid_.coord(2, l));
          for (int a = 0; a < 3; ++a) g[a](i, j, l) = d[a];
        }
  } else {
    for (int a = 0; a < 3; ++a) sample_first_derivative(medium.k_sq, a, g[a]);
  }
  for (auto& ga : g) ga *= 2.0;
  if (medium.lap_k_sq) {
    lap = Field3::sample(grid_, medium.lap_k_sq);
  } else {
    for (int a = 0; a < 3; ++a) sample_second_derivative_acc(medium.k_sq, a, lap);
  }
  two_grad_k_sq_ = std::move(g);
  lap_k_sq_ = std::move(lap);
}

void HelmholtzOperator::second_diff(int axis, const cplx* in, cplx* out, double scale, bool accumulate) const {
  const auto v = axis_view(grid_, axis);
  const double s = scale / (grid_.h(axis) * grid_.h(axis));
  const cplx gam = gamma_[axis], zm1 = zeta_[axis] - 1.0;
  const int n = v.n;
  const std::size_t inner = v.inner;
  for (std::size_t o = 0; o < v.outer; ++o) {
    const cplx* u = in + o * n * inner;
    cplx* w = out + o * n * inner;
    for (int p = 0; p < n; ++p) {
      const cplx* c = u + std::size_t(p) * inner;
      cplx* r = w + std::size_t(p) * inner;
      if (n == 1) {
        for (std::size_t q = 0; q < inner; ++q) {
          const cplx d = (gam - 2.0) * c[q] * s;
          r[q] = accumulate ? r[q] + d : d;
        }
      } else if (p == 0) {
        for (std::size_t q = 0; q < inner; ++q) {
          const cplx d = ((gam - 2.0) * c[q] + (zm1 + 1.0) * c[q + inner]) * s;
          r[q] = accumulate ? r[q] + d : d;
        }
      } else if (p == n - 1) {
        for (std::size_t q = 0; q < inner; ++q) {
          const cplx d = ((gam - 2.0) * c[q] + (zm1 + 1.0) * c[q - inner]) * s;
          r[q] = accumulate ? r[q] + d : d;
        }
      } else {
        for (std::size_t q = 0; q < inner; ++q) {
          const cplx d = (c[q - inner] - 2.0 * c[q] + c[q + inner]) * s;
          r[q] = accumulate ? r[q] + d : d;
        }
      }
    }
  }
}

void HelmholtzOperator::first_diff(int axis, const cplx* in, cplx* out) const {
  const auto v = axis_view(grid_, axis);
  const double s = 0.5 / grid_.h(axis);
  const cplx gam = gamma_[axis], zeta = zeta_[axis];
  const int n = v.n;
  const std::size_t inner = v.inner;
  for (std::size_t o = 0; o < v.outer; ++o) {
    const cplx* u = in + o * n * inner;
    cplx* w = out + o * n * inner;
    for (int p = 0; p < n; ++p) {
      const cplx* c = u + std::size_t(p) * inner;
      cplx* r = w + std::size_t(p) * inner;
      if (n == 1) {
        for (std::size_t q = 0; q < inner; ++q) r[q] = 0.0;
      } else if (p == 0) {
        for (std::size_t q = 0; q < inner; ++q) r[q] = ((2.0 - zeta) * c[q + inner] - gam * c[q]) * s;
      } else if (p == n - 1) {
        for (std::size_t q = 0; q < inner; ++q) r[q] = (gam * c[q] + (zeta - 2.0) * c[q - inner]) * s;
      } else {
        for (std::size_t q = 0; q < inner; ++q) r[q] = (c[q + inner] - c[q - inner]) * s;
      }
    }
  }
}

void HelmholtzOperator::apply(std::span<const cplx> u_span, std::span<cplx> out_span) const {
  const std::size_t N = grid_.size();
  if (u_span.size() != N || out_span.size() != N) throw GridMismatch("HelmholtzOperator::apply: size mismatch");
  const cplx* u = u_span.data();
  cplx* out = out_span.data();
  const cplx* k2 = k_sq_.data();
  const double hx2 = grid_.h(0) * grid_.h(0), hy2 = grid_.h(1) * grid_.h(1), hz2 = grid_.h(2) * grid_.h(2);

  if (order_ == SchemeOrder::Second) {
    second_diff(0, u, out, 1.0, false);
    second_diff(1, u, out, 1.0, true);
    second_diff(2, u, out, 1.0, true);
    for (std::size_t m = 0; m < N; ++m) out[m] = hz2 * (out[m] + k2[m] * u[m]);
    return;
  }

  if (order_ == SchemeOrder::Fourth) {
    CVector tx(N), ty(N), w(N);
    second_diff(0, u, tx.data(), 1.0, false);
    second_diff(1, u, ty.data(), 1.0, false);
    second_diff(2, u, out, 1.0, false);
    for (std::size_t m = 0; m < N; ++m) out[m] += tx[m] + ty[m];
    second_diff(1, tx.data(), out, (hx2 + hy2) / 12.0, true);
    second_diff(2, tx.data(), out, (hx2 + hz2) / 12.0, true);
    second_diff(2, ty.data(), out, (hy2 + hz2) / 12.0, true);
    for (std::size_t m = 0; m < N; ++m) {
      w[m] = k2[m] * u[m];
      out[m] += w[m];
    }
    second_diff(0, w.data(), out, hx2 / 12.0, true);
    second_diff(1, w.data(), out, hy2 / 12.0, true);
    second_diff(2, w.data(), out, hz2 / 12.0, true);
    for (std::size_t m = 0; m < N; ++m) out[m] *= hz2;
    return;
  }

  // Sixth order, h uniform.
  const double h2 = hx2, h4 = h2 * h2;
  CVector tx(N), ty(N), tz(N), pairs(N), dxy(N);
  second_diff(0, u, tx.data(), 1.0, false);
  second_diff(1, u, ty.data(), 1.0, false);
  second_diff(2, u, tz.data(), 1.0, false);
  second_diff(1, tx.data(), dxy.data(), 1.0, false);
  std::copy(dxy.begin(), dxy.end(), pairs.begin());
  second_diff(2, tx.data(), pairs.data(), 1.0, true);
  second_diff(2, ty.data(), pairs.data(), 1.0, true);
  second_diff(2, dxy.data(), out, h4 / 30.0, false);  // h^4/30 DxDyDz u

  for (std::size_t m = 0; m < N; ++m) {
    const cplx c = k2[m];
    const cplx S = tx[m] + ty[m] + tz[m];
    out[m] += (1.0 + c * h2 / 30.0) * S + c * u[m] + (h2 / 6.0) * (1.0 + c * h2 / 15.0) * pairs[m] -
              (h2 / 20.0) * c * c * u[m];
  }

  if (!constant_k_) {
    const auto& g = *two_grad_k_sq_;
    const auto& lap = *lap_k_sq_;
    CVector& v = dxy;   // reuse as scratch
    CVector& d = pairs;
    const std::array<const CVector*, 3> t{&tx, &ty, &tz};
    for (std::size_t m = 0; m < N; ++m) out[m] += (h2 / 20.0) * lap[m] * u[m];
    for (int a = 0; a < 3; ++a) {
      // delta_a((1 + h^2 k^2/6) U + h^2/6 (D_b + D_c) U), k^2 frozen at the centre node.
      first_diff(a, u, d.data());
      for (std::size_t m = 0; m < N; ++m) out[m] += (h2 / 20.0) * g[a][m] * (1.0 + h2 * k2[m] / 6.0) * d[m];
      const CVector& ta = *t[a];
      for (std::size_t m = 0; m < N; ++m) v[m] = tx[m] + ty[m] + tz[m] - ta[m];
      first_diff(a, v.data(), d.data());
      for (std::size_t m = 0; m < N; ++m) out[m] += (h2 / 20.0) * g[a][m] * (h2 / 6.0) * d[m];
    }
  }
  for (std::size_t m = 0; m < N; ++m) out[m] *= h2;
}

Field3 HelmholtzOperator::apply(const Field3& u) const {
  require_same_grid(grid_, u.grid(), "HelmholtzOperator::apply");
  Field3 out(grid_);
  apply(u.values(), out.values());
  return out;
}

Field3 apply_operator(SchemeOrder order, const Medium& medium, const BoundaryCoeffs& bc, const Field3& u) {
  require_same_grid(medium.grid(), u.grid(), "apply_operator");
  return HelmholtzOperator(order, medium, bc).apply(u);
}

// ---------------------------------------------------------------------------
// Right-hand sides

Field3 build_rhs(SchemeOrder order, const Medium& medium, const Source& src, RhsOptions opts) {
  const Grid3& g = src.f.grid();
  require_same_grid(g, medium.grid(), "build_rhs");
  if (order == SchemeOrder::Sixth && !g.uniform(1e-12))
    throw GridMismatch("build_rhs: the sixth-order scheme needs h_x = h_y = h_z");
  const double hz2 = g.h(2) * g.h(2);
  Field3 rhs(g);

  if (order == SchemeOrder::Second) {
    for (std::size_t m = 0; m < rhs.size(); ++m) rhs[m] = hz2 * src.f[m];
    return rhs;
  }

  const Sampler at{src, g};
  auto require_fallback = [&](const char* what) {
    if (!opts.allow_fallback)
      throw Error(std::string("build_rhs: no ") + what + " data for f and difference fallback is disabled");
  };

  if (order == SchemeOrder::Fourth) {
    if (!src.value) require_fallback("point-evaluator");
    for (int l = 0; l < g.nz(); ++l)
      for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
          const cplx f0 = src.f(i, j, l);
          cplx acc = f0;
          for (int a = 0; a < 3; ++a) {
            const auto e = unit(a, 1);
            const cplx fp = at(i + e[0], j + e[1], l + e[2]);
            const cplx fm = at(i - e[0], j - e[1], l - e[2]);
            acc += (fp - 2.0 * f0 + fm) / 12.0;  // h^2/12 * delta^2 f
          }
          rhs(i, j, l) = hz2 * acc;
        }
    return rhs;
  }

  // Sixth order.
  const double h = g.h(0), h2 = h * h, h4 = h2 * h2;
  if (!src.laplacian || !src.pure_fourth || !src.mixed_fourth) require_fallback("derivative");
  const bool need_grad = !medium.constant;
  if (need_grad && !src.grad) require_fallback("gradient");

  std::optional<std::array<Field3, 3>> gk;
  if (need_grad) {
    std::array<Field3, 3> gg{Field3(g), Field3(g), Field3(g)};
    if (medium.grad_k_sq) {
      for (int l = 0; l < g.nz(); ++l)
        for (int j = 0; j < g.ny(); ++j)
          for (int i = 0; i < g.nx(); ++i) {
            const auto d = medium.grad_k_sq(g.coord(0, i), g.coord(1, j), g.coord(2, l));
            for (int a = 0; a < 3; ++a) gg[a](i, j, l) = d[a];
          }
    } else {
      for (int a = 0; a < 3; ++a) sample_first_derivative(medium.k_sq, a, gg[a]);
    }
    gk = std::move(gg);
  }

  for (int l = 0; l < g.nz(); ++l)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const double x = g.coord(0, i), y = g.coord(1, j), z = g.coord(2, l);
        const cplx f0 = src.f(i, j, l);
        auto shifted = [&](int a, int s) {
          const auto e = unit(a, s);
          return at(i + e[0], j + e[1], l + e[2]);
        };
        cplx lap, p4, m4;
        if (src.laplacian) {
          lap = src.laplacian(x, y, z);
        } else {
          lap = 0.0;
          for (int a = 0; a < 3; ++a)
            lap += (-shifted(a, 2) + 16.0 * shifted(a, 1) - 30.0 * f0 + 16.0 * shifted(a, -1) - shifted(a, -2)) /
                   (12.0 * h2);
        }
        if (src.pure_fourth) {
          p4 = src.pure_fourth(x, y, z);
        } else {
          p4 = 0.0;
          for (int a = 0; a < 3; ++a)
            p4 += (shifted(a, 2) - 4.0 * shifted(a, 1) + 6.0 * f0 - 4.0 * shifted(a, -1) + shifted(a, -2)) / h4;
        }
        if (src.mixed_fourth) {
          m4 = src.mixed_fourth(x, y, z);
        } else {
          m4 = 0.0;
          for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) {
              cplx s = 0.0;
              for (int p = -1; p <= 1; ++p)
                for (int q = -1; q <= 1; ++q) {
                  const double w = (p == 0 ? -2.0 : 1.0) * (q == 0 ? -2.0 : 1.0);
                  auto e = unit(a, p);
                  e[b] += q;
                  s += w * at(i + e[0], j + e[1], l + e[2]);
                }
              m4 += s / h4;
            }
        }
        cplx acc = f0 + h2 / 12.0 * lap + h4 / 360.0 * p4 + h4 / 90.0 * m4;
        const cplx c = medium.k_sq(i, j, l);
        cplx delta_f = c * f0;
        if (need_grad) {
          std::array<cplx, 3> fg;
          if (src.grad) {
            fg = src.grad(x, y, z);
          } else {
            for (int a = 0; a < 3; ++a)
              fg[a] = (-shifted(a, 2) + 8.0 * shifted(a, 1) - 8.0 * shifted(a, -1) + shifted(a, -2)) / (12.0 * h);
          }
          for (int a = 0; a < 3; ++a) delta_f -= 2.0 * (*gk)[a](i, j, l) * (h2 / 6.0) * fg[a];
        }
        acc -= h2 / 20.0 * delta_f;
        rhs(i, j, l) = h2 * acc;
      }
  return rhs;
}

Field3 ghost_correction(const HelmholtzOperator& op, const Medium& medium, const BoundaryCoeffs& bc) {
  const Grid3& g = op.grid();
  Field3 corr(g);
  if (bc.mode != BoundaryMode::OracleGhost) return corr;

  const Grid3 pg = g.padded(1);
  // Coefficients on the padded grid: interior values copied from the operator,
  // pad values from the point evaluator (or nearest sample).
  Field3 k_sq(pg);
  for (int l = -1; l <= g.nz(); ++l)
    for (int j = -1; j <= g.ny(); ++j)
      for (int i = -1; i <= g.nx(); ++i) {
        const bool inside = i >= 0 && i < g.nx() && j >= 0 && j < g.ny() && l >= 0 && l < g.nz();
        cplx v;
        if (inside) v = op.k_sq_(i, j, l);
        else if (medium.k_sq_at) v = medium.k_sq_at(g.coord(0, i), g.coord(1, j), g.coord(2, l));
        else v = op.k_sq_(std::clamp(i, 0, g.nx() - 1), std::clamp(j, 0, g.ny() - 1), std::clamp(l, 0, g.nz() - 1));
        k_sq(i + 1, j + 1, l + 1) = v;
      }
  HelmholtzOperator padded(op.order_, pg, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, op.constant_k_, std::move(k_sq));
  if (!op.constant_k_) {
    std::array<Field3, 3> gp{Field3(pg), Field3(pg), Field3(pg)};
    Field3 lp(pg);
    for (int l = 0; l < g.nz(); ++l)
      for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
          if (op.two_grad_k_sq_)
            for (int a = 0; a < 3; ++a) gp[a](i + 1, j + 1, l + 1) = (*op.two_grad_k_sq_)[a](i, j, l);
          if (op.lap_k_sq_) lp(i + 1, j + 1, l + 1) = (*op.lap_k_sq_)(i, j, l);
        }
    if (op.two_grad_k_sq_) padded.two_grad_k_sq_ = std::move(gp);
    if (op.lap_k_sq_) padded.lap_k_sq_ = std::move(lp);
  }

  Field3 ghost(pg);
  for (int l = 0; l < pg.nz(); ++l)
    for (int j = 0; j < pg.ny(); ++j)
      for (int i = 0; i < pg.nx(); ++i) {
        const bool pad = i == 0 || j == 0 || l == 0 || i == pg.nx() - 1 || j == pg.ny() - 1 || l == pg.nz() - 1;
        if (pad) ghost(i, j, l) = bc.ghost_value(pg.coord(0, i), pg.coord(1, j), pg.coord(2, l));
      }
  const Field3 full = padded.apply(ghost);
  for (int l = 0; l < g.nz(); ++l)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) corr(i, j, l) = full(i + 1, j + 1, l + 1);
  return corr;
}

Field3 system_rhs(const HelmholtzOperator& op, const Medium& medium, const BoundaryCoeffs& bc, const Source& src,
                  RhsOptions opts) {
  Field3 rhs = build_rhs(op.order(), medium, src, opts);
  if (bc.mode == BoundaryMode::OracleGhost) rhs -= ghost_correction(op, medium, bc);
  return rhs;
}

NormReport residual(const HelmholtzOperator& op, const Field3& u, const Field3& rhs) {
  require_same_grid(op.grid(), rhs.grid(), "residual");
  return norms(op.apply(u), rhs);
}

NormReport residual(SchemeOrder order, const Medium& medium, const BoundaryCoeffs& bc, const Field3& u,
                    const Field3& rhs) {
  return residual(HelmholtzOperator(order, medium, bc), u, rhs);
}

// ---------------------------------------------------------------------------
// Dense oracle

Eigen::MatrixXcd assemble_dense(const HelmholtzOperator& op) {
  const std::size_t N = op.grid().size();
  if (N > 4096) throw Error("assemble_dense: grid has " + std::to_string(N) + " unknowns, limit is 4096");
  Eigen::MatrixXcd A(N, N);
  CVector e(N), col(N);
  for (std::size_t m = 0; m < N; ++m) {
    std::fill(e.begin(), e.end(), cplx(0.0));
    e[m] = 1.0;
    op.apply(e, col);
    for (std::size_t r = 0; r < N; ++r) A(r, m) = col[r];
  }
  return A;
}

Eigen::MatrixXcd assemble_dense(SchemeOrder order, const Medium& medium, const BoundaryCoeffs& bc) {
  if (medium.grid().size() > 4096)
    throw Error("assemble_dense: grid has " + std::to_string(medium.grid().size()) + " unknowns, limit is 4096");
  return assemble_dense(HelmholtzOperator(order, medium, bc));
}

void write_dense_csv(const std::filesystem::path& path, const Eigen::MatrixXcd& m) {
  std::ofstream out(path);
  if (!out) throw Error("write_dense_csv: cannot open " + path.string());
  out << std::setprecision(17) << "row,col,re,im\n";
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (m(r, c) != cplx(0.0)) out << r << ',' << c << ',' << m(r, c).real() << ',' << m(r, c).imag() << '\n';
}

}  // namespace helm
