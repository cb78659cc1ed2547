#include "helm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "helm/eigt.hpp"
#include "helm/pfft.hpp"

namespace helm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

const std::vector<std::string>& precond_ids() {
  static const std::vector<std::string> ids{"eigt2", "eigt3", "pfft2", "pfft3", "fft2", "fft4", "fft6", "none"};
  return ids;
}

bool two_point(const std::string& id) { return id == "eigt2" || id == "pfft2"; }
bool three_point(const std::string& id) { return id == "eigt3" || id == "pfft3"; }

struct Problem {
  Medium medium;
  Source source;
  std::optional<Field3> exact;
  PointFn exact_fn;
};

double background_k0(const ExperimentSpec& spec) {
  if (spec.k0) return *spec.k0;
  return spec.problem == "inclusion" ? SphericalInclusion{}.k0() : AnalyticSeparable{}.k0();
}

Problem build_problem(const ExperimentSpec& spec, const Grid3& grid) {
  const double k0 = background_k0(spec);
  if (spec.problem == "analytic") {
    auto f = analytic_fields(AnalyticSeparable(k0 * k0), grid);
    return Problem{std::move(f.medium), std::move(f.source), std::move(f.u_exact), std::move(f.exact)};
  }
  SphericalInclusion p;
  p.k0_sq = k0 * k0;
  auto f = inclusion_fields(p, grid);
  return Problem{std::move(f.medium), std::move(f.source), std::nullopt, {}};
}

std::string grid_label(int n) {
  const auto s = std::to_string(n);
  return s + "x" + s + "x" + s;
}

std::string stem_of(const ResultRow& r) {
  return r.problem + "_o" + std::to_string(r.order) + "_" + r.precond + "_" + r.boundary + "_" +
         std::to_string(r.grid);
}

int nearest_index(const Grid3& g, int axis, double x) {
  const double off = g.placement() == Placement::Collocated ? 0.0 : 0.5;
  const int i = int(std::lround((x - g.lo(axis)) / g.h(axis) - off));
  return std::clamp(i, 0, g.n(axis) - 1);
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::vector<int> default_grids(bool large) {
  std::vector<int> g{50, 100, 127, 200, 255};
  if (large) g.insert(g.end(), {400, 511, 600, 767, 800});
  return g;
}

void validate(const ExperimentSpec& spec) {
  if (spec.problem != "analytic" && spec.problem != "inclusion")
    throw Error("unknown problem '" + spec.problem + "' (analytic or inclusion)");
  if (spec.order != 2 && spec.order != 4 && spec.order != 6) throw Error("order must be 2, 4 or 6");
  if (std::find(precond_ids().begin(), precond_ids().end(), spec.precond) == precond_ids().end())
    throw Error("unknown preconditioner '" + spec.precond + "'");
  const auto& b = spec.boundary;
  if (b != "auto" && b != "staggered" && b != "collocated" && b != "oracle")
    throw Error("boundary must be auto, staggered, collocated or oracle");
  if (b == "oracle" && spec.problem != "analytic") throw Error("the oracle closure needs the analytic problem");
  if ((b == "collocated" || b == "oracle") && two_point(spec.precond))
    throw Error(spec.precond + " uses the two-point closure and needs a staggered grid");
  if (b == "staggered" && three_point(spec.precond))
    throw Error(spec.precond + " uses the three-point closure and needs a collocated grid");
  if (spec.direct && spec.precond == "none") throw Error("a direct solve needs a preconditioner");
  if (spec.repeat < 1) throw Error("repeat must be at least 1");
  if (spec.k0 && !(*spec.k0 > 0.0)) throw Error("k0 must be positive");
  for (int n : spec.grids) {
    if (n < 4) throw Error("grid sizes must be at least 4");
    if (n > 255 && !spec.large) throw Error("grid " + std::to_string(n) + " needs --large");
  }
  if (spec.gmres.restart < 1 || !(spec.gmres.tol > 0.0) || spec.gmres.max_iterations < 1)
    throw Error("invalid GMRES settings");
}

Placement placement_for(const ExperimentSpec& spec) {
  if (spec.boundary == "staggered") return Placement::Staggered;
  if (spec.boundary == "collocated" || spec.boundary == "oracle") return Placement::Collocated;
  if (two_point(spec.precond)) return Placement::Staggered;
  if (three_point(spec.precond)) return Placement::Collocated;
  return spec.problem == "inclusion" ? Placement::Staggered : Placement::Collocated;
}

std::string boundary_label(const ExperimentSpec& spec) {
  if (spec.boundary == "oracle") return "oracle";
  return placement_for(spec) == Placement::Staggered ? "staggered" : "collocated";
}

std::unique_ptr<Preconditioner> make_preconditioner(const std::string& id, const Grid3& grid, cplx k0, int order) {
  const auto profile = k0_profile_constant(grid.nz(), k0);
  const auto bc = BoundaryCoeffs::absorbing(grid, k0);
  if (id == "eigt2" || id == "eigt3") return std::make_unique<EigTPrecond>(grid, bc, profile);
  if (id == "pfft2" || id == "pfft3") return std::make_unique<PfftPrecond>(grid, bc, profile);
  if (id == "fft2") return SineSolver::dirichlet(grid, k0, SchemeOrder::Second);
  if (id == "fft4") return SineSolver::dirichlet(grid, k0, SchemeOrder::Fourth);
  if (id == "fft6") return SineSolver::dirichlet(grid, k0, SchemeOrder::Sixth);
  if (id == "none") return nullptr;
  (void)order;
  throw Error("unknown preconditioner '" + id + "'");
}

ResultRow run_one(const ExperimentSpec& spec, int n) {
  validate(spec);
  ResultRow row;
  row.problem = spec.problem;
  row.grid = n;
  row.order = spec.order;
  row.precond = spec.precond;
  row.boundary = boundary_label(spec);
  row.k0 = background_k0(spec);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  row.max_err = row.l2_err = row.relmax_err = nan;

  const Grid3 grid = Grid3::cube(n, placement_for(spec));
  Problem prob = build_problem(spec, grid);
  const BoundaryCoeffs bc =
      spec.boundary == "oracle" ? BoundaryCoeffs::oracle(prob.exact_fn) : BoundaryCoeffs::absorbing(grid, row.k0);
  const SchemeOrder order = order_from_int(spec.order);
  const HelmholtzOperator op(order, prob.medium, bc);
  const Field3 rhs = system_rhs(op, prob.medium, bc, prob.source);

  Field3 u(grid);
  SolveReport rep;
  std::vector<double> totals;
  for (int rpt = 0; rpt < spec.repeat; ++rpt) {
    const auto t0 = Clock::now();
    auto pc = make_preconditioner(spec.precond, grid, row.k0, spec.order);
    const double setup = seconds_since(t0);
    const LinearMap minv = pc ? pc->as_map() : identity_map();
    if (spec.direct) {
      const auto t1 = Clock::now();
      minv(rhs.values(), u.values());
      rep = SolveReport{};
      rep.timings.precond_apply = rep.timings.total = seconds_since(t1);
      const NormReport res = residual(op, u, rhs);
      rep.final_rel_res = res.l2_rel;
      rep.final_residual = res;
      rep.converged = true;
    } else {
      rep = gmres([&op](std::span<const cplx> x, std::span<cplx> y) { op.apply(x, y); }, minv, rhs.values(),
                  u.values(), spec.gmres);
    }
    rep.timings.setup = setup;
    totals.push_back(setup + rep.timings.total);
  }

  const NormReport res = residual(op, u, rhs);
  row.rel_res = res.l2_rel;
  row.relmax_res = res.linf_rel;
  row.n0 = rep.n0;
  row.converged = rep.converged;
  row.message = rep.message;
  row.tp = median(totals);
  row.setup_seconds = rep.timings.setup;
  row.operator_seconds = rep.timings.operator_apply;
  row.precond_seconds = rep.timings.precond_apply;
  row.history = std::move(rep.history);
  if (prob.exact) {
    const NormReport err = norms(u, *prob.exact);
    row.max_err = err.linf_abs;
    row.l2_err = err.l2_rel;
    row.relmax_err = err.linf_rel;
  }
  if (!spec.out_dir.empty() && spec.slices) write_slices(spec.out_dir, stem_of(row), u);
  return row;
}

std::vector<ResultRow> run(const ExperimentSpec& spec_in) {
  ExperimentSpec spec = spec_in;
  if (spec.grids.empty()) spec.grids = default_grids(spec.large);
  validate(spec);
  if (!spec.out_dir.empty()) std::filesystem::create_directories(spec.out_dir);
  std::vector<ResultRow> rows;
  for (int n : spec.grids) {
    try {
      rows.push_back(run_one(spec, n));
    } catch (const std::exception& e) {
      ResultRow r;
      r.problem = spec.problem;
      r.grid = n;
      r.order = spec.order;
      r.precond = spec.precond;
      r.boundary = boundary_label(spec);
      r.k0 = background_k0(spec);
      r.max_err = r.l2_err = r.relmax_err = r.rel_res = r.relmax_res = std::numeric_limits<double>::quiet_NaN();
      r.message = e.what();
      rows.push_back(std::move(r));
    }
    if (!spec.out_dir.empty() && !rows.back().history.empty())
      write_history_csv(spec.out_dir / ("history_" + stem_of(rows.back()) + ".csv"), rows.back().history);
  }
  if (!spec.out_dir.empty()) emit_tables(rows, spec.out_dir);
  return rows;
}

std::vector<BenchRow> run_direct_bench(const std::vector<int>& sizes, int repeat) {
  std::vector<BenchRow> out;
  const AnalyticSeparable p;
  for (int n : sizes) {
    BenchRow b;
    b.n = n;
    const Grid3 grid = Grid3::cube(n, Placement::Staggered);
    const cplx k0 = p.k0();
    const auto bc = BoundaryCoeffs::staggered(grid, k0);
    const auto profile = k0_profile_constant(n, k0);
    auto fields = analytic_fields(p, grid);
    const Field3 rhs = build_rhs(SchemeOrder::Second, fields.medium, fields.source);

    std::vector<double> setup, dst, tr, es, ps;
    for (int r = 0; r < repeat; ++r) {
      auto t0 = Clock::now();
      (void)axis_eigensystem(n, bc.gamma[0], bc.zeta[0]);
      setup.push_back(seconds_since(t0));
    }
    {
      const SineTransform2D s(n, n, n);
      Field3 work = rhs;
      for (int r = 0; r < repeat; ++r) {
        const auto t0 = Clock::now();
        s.apply(work.values());
        dst.push_back(seconds_since(t0));
      }
    }
    {
      const EigTPrecond e(grid, bc, profile);
      b.eigt_transform_ops = e.transform_ops();
      for (int r = 0; r < repeat; ++r) {
        auto t0 = Clock::now();
        (void)e.forward_transform(rhs);
        tr.push_back(seconds_since(t0));
        t0 = Clock::now();
        (void)e.solve(rhs);
        es.push_back(seconds_since(t0));
      }
    }
    {
      const PfftPrecond pf(grid, bc, profile);
      for (int r = 0; r < repeat; ++r) {
        pf.reset_stats();
        const auto t0 = Clock::now();
        (void)pf.solve(rhs);
        ps.push_back(seconds_since(t0));
      }
      b.pfft_correction_ops = pf.stats().correction_ops;
    }
    b.eig_setup = median(setup);
    b.sine_transform = median(dst);
    b.eigt_transform = median(tr);
    b.eigt_solve = median(es);
    b.pfft_solve = median(ps);
    out.push_back(b);
  }
  return out;
}

std::optional<int> crossover(const std::vector<BenchRow>& rows) {
  std::vector<BenchRow> r = rows;
  std::sort(r.begin(), r.end(), [](const BenchRow& a, const BenchRow& b) { return a.n < b.n; });
  if (r.empty() || r.front().pfft_solve < r.front().eigt_solve) return std::nullopt;
  for (std::size_t k = 1; k < r.size(); ++k) {
    bool faster_after = true;
    for (std::size_t m = k; m < r.size(); ++m) faster_after = faster_after && r[m].pfft_solve < r[m].eigt_solve;
    if (faster_after) return r[k].n;
  }
  return std::nullopt;
}

void emit_tables(const std::vector<ResultRow>& rows, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream full(dir / "results.csv");
  std::ofstream table(dir / "table.csv");
  if (!full || !table) throw Error("cannot write tables to " + dir.string());
  full << "problem,grid,order,precond,boundary,k0,max-err,L2-err,relmax-err,rel-res,relmax-res,N0,TP,setup,"
          "operator,precond-apply,converged,message\n";
  table << "grid,max-err,L2-err,precond,N0,TP\n";
  for (const auto& r : rows) {
    std::string msg = r.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    full << r.problem << ',' << grid_label(r.grid) << ',' << r.order << ',' << r.precond << ',' << r.boundary << ','
         << format_number(r.k0) << ',' << format_number(r.max_err) << ',' << format_number(r.l2_err) << ','
         << format_number(r.relmax_err) << ',' << format_number(r.rel_res) << ',' << format_number(r.relmax_res)
         << ',' << r.n0 << ',' << format_number(r.tp) << ',' << format_number(r.setup_seconds) << ','
         << format_number(r.operator_seconds) << ',' << format_number(r.precond_seconds) << ','
         << (r.converged ? "true" : "false") << ',' << msg << '\n';
    table << grid_label(r.grid) << ',' << format_number(r.max_err) << ',' << format_number(r.l2_err) << ','
          << r.precond << ',' << r.n0 << ',' << format_number(r.tp) << '\n';
  }
}

void write_history_csv(const std::filesystem::path& path, const std::vector<HistoryEntry>& history) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "iteration,estimated,true\n";
  for (const auto& h : history) {
    if (h.iteration == 0) continue;
    out << h.iteration << ',' << format_number(h.estimated) << ',' << (h.true_res < 0 ? "" : format_number(h.true_res))
        << '\n';
  }
}

void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "grid,eig-setup,sine-transform,eigt-transform,eigt-solve,pfft-solve,eigt-transform-ops,pfft-correction-ops\n";
  for (const auto& b : rows)
    out << grid_label(b.n) << ',' << format_number(b.eig_setup) << ',' << format_number(b.sine_transform) << ','
        << format_number(b.eigt_transform) << ',' << format_number(b.eigt_solve) << ',' << format_number(b.pfft_solve)
        << ',' << b.eigt_transform_ops << ',' << b.pfft_correction_ops << '\n';
}

void write_slices(const std::filesystem::path& dir, const std::string& stem, const Field3& u) {
  std::filesystem::create_directories(dir);
  const Grid3& g = u.grid();
  for (int axis : {0, 1}) {
    const int fixed = nearest_index(g, axis, 0.5);
    const int other = 1 - axis;
    const char* name = axis == 0 ? "x" : "y";
    const auto base = dir / ("slice_" + stem + "_" + name + "0.5");
    std::ofstream csv(base.string() + ".csv");
    if (!csv) throw Error("cannot write " + base.string());
    csv << (axis == 0 ? "y" : "x") << ",z,re\n";
    // Plane as a one-node-thick staggered grid so the snapshot header carries its shape.
    const double c = g.coord(axis, fixed);
    std::array<AxisSpec, 3> axes{AxisSpec{g.nx(), g.lo(0), g.hi(0)}, AxisSpec{g.ny(), g.lo(1), g.hi(1)},
                                 AxisSpec{g.nz(), g.lo(2), g.hi(2)}};
    axes[axis] = AxisSpec{1, c - 0.5 * g.h(axis), c + 0.5 * g.h(axis)};
    if (g.placement() == Placement::Collocated) {
      // Keep the in-plane node coordinates under the staggered convention.
      for (int a : {other, 2}) axes[a] = AxisSpec{g.n(a), g.lo(a) - 0.5 * g.h(a), g.hi(a) + 0.5 * g.h(a)};
    }
    Field3 plane(Grid3(axes, Placement::Staggered));
    for (int l = 0; l < g.nz(); ++l)
      for (int m = 0; m < g.n(other); ++m) {
        const cplx v = axis == 0 ? u(fixed, m, l) : u(m, fixed, l);
        if (axis == 0)
          plane(0, m, l) = v;
        else
          plane(m, 0, l) = v;
        csv << format_number(g.coord(other, m)) << ',' << format_number(g.coord(2, l)) << ',' << format_number(v.real())
            << '\n';
      }
    write_snapshot(base.string() + ".bin", plane);
  }
}

}  // namespace helm
