// Command-line front end for the experiment harness.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "helm/harness.hpp"
#include "helm/model1d.hpp"

namespace {

void print_rows(const std::vector<helm::ResultRow>& rows) {
  std::printf("%-12s %-7s %-6s %-22s %-22s %-22s %-4s %-10s %s\n", "grid", "precond", "order", "max-err", "L2-err",
              "rel-res", "N0", "TP", "status");
  for (const auto& r : rows) {
    std::printf("%-12d %-7s %-6d %-22s %-22s %-22s %-4d %-10.3f %s\n", r.grid, r.precond.c_str(), r.order,
                helm::format_number(r.max_err).c_str(), helm::format_number(r.l2_err).c_str(),
                helm::format_number(r.rel_res).c_str(), r.n0, r.tp,
                r.converged ? "converged" : ("FAILED " + r.message).c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Helmholtz solver toolkit"};
  app.set_config("--config", "", "INI file with [run], [bench-transforms] and [model1d] sections");
  app.require_subcommand(1);

  helm::ExperimentSpec spec;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Solve a problem family on one or more grids");
  run->add_option("--problem", spec.problem, "analytic or inclusion")->capture_default_str();
  run->add_option("--order", spec.order, "Scheme order 2, 4 or 6")->capture_default_str();
  run->add_option("--grid", spec.grids, "Grid sizes N (N^3 nodes)")->delimiter(',');
  run->add_option("--precond", spec.precond, "eigt2 eigt3 pfft2 pfft3 fft2 fft4 fft6 none")->capture_default_str();
  run->add_option("--boundary", spec.boundary, "auto, staggered, collocated or oracle")->capture_default_str();
  run->add_option("--k0", spec.k0, "Background wavenumber");
  run->add_flag("--direct", spec.direct, "Apply the preconditioner once instead of running GMRES");
  run->add_option("--tol", spec.gmres.tol)->capture_default_str();
  run->add_option("--restart", spec.gmres.restart)->capture_default_str();
  run->add_option("--max-iter", spec.gmres.max_iterations)->capture_default_str();
  run->add_option("--out", out_dir, "Output directory for CSV tables, histories and slices");
  run->add_flag("--large", spec.large, "Allow grids above 255");
  run->add_flag("--slices", spec.slices, "Dump x = 0.5 and y = 0.5 planes");
  run->add_option("--repeat", spec.repeat, "Timing repeats (median reported)")->capture_default_str();

  std::vector<int> bench_sizes;
  bool bench_large = false;
  int bench_repeat = 1;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench-transforms", "Time eigensolver setup, sine, EigT and PFFT transforms");
  bench->add_option("--grid", bench_sizes, "Grid sizes")->delimiter(',');
  bench->add_flag("--large", bench_large, "Append the large sizes");
  bench->add_option("--repeat", bench_repeat)->capture_default_str();
  bench->add_option("--out", bench_out, "CSV output file");

  helm::Model1D model{100, 20.0, 2};
  std::string model_out;
  std::vector<int> sweep_n;
  std::vector<double> sweep_k;
  std::vector<int> sweep_r;
  auto* m1d = app.add_subcommand("model1d", "One-dimensional model problem: spectra and GMRES history");
  m1d->add_option("--N", model.N)->capture_default_str();
  m1d->add_option("--k", model.k)->capture_default_str();
  m1d->add_option("--r", model.r)->capture_default_str();
  m1d->add_option("--out", model_out, "Output directory");
  m1d->add_option("--sweep-N", sweep_n)->delimiter(',');
  m1d->add_option("--sweep-k", sweep_k)->delimiter(',');
  m1d->add_option("--sweep-r", sweep_r)->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      spec.out_dir = out_dir;
      const auto rows = helm::run(spec);
      print_rows(rows);
      for (const auto& r : rows)
        if (!r.converged) return 1;
      return 0;
    }
    if (*bench) {
      if (bench_sizes.empty()) bench_sizes = {32, 50, 64, 100, 127};
      if (bench_large) bench_sizes.insert(bench_sizes.end(), {255, 400, 511});
      const auto rows = helm::run_direct_bench(bench_sizes, bench_repeat);
      std::printf("%-8s %-12s %-12s %-12s %-12s %-12s %-14s %s\n", "grid", "eig-setup", "sine", "eigt-tr",
                  "eigt-solve", "pfft-solve", "eigt-ops", "pfft-ops");
      for (const auto& b : rows)
        std::printf("%-8d %-12.4g %-12.4g %-12.4g %-12.4g %-12.4g %-14zu %zu\n", b.n, b.eig_setup, b.sine_transform,
                    b.eigt_transform, b.eigt_solve, b.pfft_solve, b.eigt_transform_ops, b.pfft_correction_ops);
      if (const auto c = helm::crossover(rows))
        std::printf("PFFT faster than EigT from N = %d\n", *c);
      else
        std::printf("no EigT to PFFT crossover among the benchmarked sizes\n");
      if (!bench_out.empty()) helm::write_bench_csv(bench_out, rows);
      return 0;
    }
    if (*m1d) {
      if (!sweep_n.empty() || !sweep_k.empty() || !sweep_r.empty()) {
        if (sweep_n.empty()) sweep_n = {model.N};
        if (sweep_k.empty()) sweep_k = {model.k};
        if (sweep_r.empty()) sweep_r = {model.r};
        const auto rows = helm::model_sweep(sweep_n, sweep_k, sweep_r);
        std::printf("%-6s %-8s %-3s %-12s %-12s %-12s %s\n", "N", "k", "r", "delta0", "bound", "max-dev", "iters");
        bool ok = true;
        for (const auto& r : rows) {
          std::printf("%-6d %-8g %-3d %-12.4g %-12.4g %-12.4g %d%s\n", r.N, r.k, r.r, r.delta0, r.bound,
                      r.max_deviation, r.iterations, r.converged ? "" : " (not converged)");
          ok = ok && r.converged;
        }
        if (!model_out.empty()) {
          std::filesystem::create_directories(model_out);
          helm::write_sweep_csv(std::filesystem::path(model_out) / "sweep.csv", rows);
        }
        return ok ? 0 : 1;
      }
      const auto F = helm::build_rhs_1d(model, helm::default_source_1d(model));
      const auto spec1 = helm::spectrum(model);
      const auto res = helm::run_model_gmres(model, F);
      std::printf("N=%d k=%g r=%d h=%g delta0=%.6g M h^2=%.6g iterations=%d within envelope=%s\n", model.N,
                  model.k, model.r, model.h(), spec1.delta0, spec1.bound(), res.iterations,
                  res.within_envelope ? "yes" : "no");
      for (std::size_t n = 0; n < res.residuals.size(); ++n)
        std::printf("%3zu %.6e %.6e\n", n, res.residuals[n], res.envelope[n]);
      if (!model_out.empty()) {
        std::filesystem::create_directories(model_out);
        helm::write_model_history_csv(std::filesystem::path(model_out) / "model1d_history.csv", res);
      }
      return res.converged ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
