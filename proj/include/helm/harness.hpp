#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "helm/krylov.hpp"
#include "helm/problems.hpp"
#include "helm/stencil.hpp"

namespace helm {

// One experiment: a problem family solved on a list of cubic grids.
//
// boundary selects the closure of the system operator:
//   auto        two-point (staggered grid) for eigt2/pfft2, three-point
//               (collocated grid) for eigt3/pfft3, otherwise the problem
//               default (analytic: collocated, inclusion: staggered);
//   staggered / collocated   the absorbing closure of that placement;
//   oracle      Dirichlet closure plus the analytic ghost layer (analytic
//               problem only, collocated grid).
struct ExperimentSpec {
  std::string problem = "analytic";   // analytic | inclusion
  std::vector<int> grids;             // empty: the default list
  int order = 4;
  std::string precond = "eigt3";      // eigt2 eigt3 pfft2 pfft3 fft2 fft4 fft6 none
  std::string boundary = "auto";
  std::optional<double> k0;           // overrides the background wavenumber
  bool direct = false;                // apply the preconditioner once, no GMRES
  GmresConfig gmres;
  std::filesystem::path out_dir;      // empty: nothing written
  int repeat = 1;
  bool slices = false;
  bool large = false;
};

struct ResultRow {
  std::string problem;
  int grid = 0;
  int order = 0;
  std::string precond;
  std::string boundary;
  double k0 = 0.0;
  // Errors against the exact solution; NaN when the problem has none.
  double max_err = 0.0;
  double l2_err = 0.0;
  double relmax_err = 0.0;
  double rel_res = 0.0;
  double relmax_res = 0.0;
  int n0 = 0;
  double tp = 0.0;            // median total seconds (setup + solve)
  double setup_seconds = 0.0;
  double operator_seconds = 0.0;
  double precond_seconds = 0.0;
  bool converged = false;
  std::string message;
  std::vector<HistoryEntry> history;
};

std::vector<int> default_grids(bool large);
// Throws Error describing the first incompatibility.
void validate(const ExperimentSpec& spec);
Placement placement_for(const ExperimentSpec& spec);
std::string boundary_label(const ExperimentSpec& spec);

// Preconditioner by id for an absorbing problem with background wavenumber k0.
std::unique_ptr<Preconditioner> make_preconditioner(const std::string& id, const Grid3& grid, cplx k0, int order);

ResultRow run_one(const ExperimentSpec& spec, int n);
// Runs every grid; failures become rows with converged = false and a message.
// Writes tables, histories and slices when out_dir is set.
std::vector<ResultRow> run(const ExperimentSpec& spec);

struct BenchRow {
  int n = 0;
  double eig_setup = 0.0;         // one axis eigendecomposition
  double sine_transform = 0.0;    // one full 3D sine transform
  double eigt_transform = 0.0;    // one EigT forward transform
  double eigt_solve = 0.0;
  double pfft_solve = 0.0;
  std::size_t eigt_transform_ops = 0;
  std::size_t pfft_correction_ops = 0;
};

std::vector<BenchRow> run_direct_bench(const std::vector<int>& sizes, int repeat = 1);
// Smallest size from which PFFT solves are faster than EigT solves at every
// larger benchmarked size, if any.
std::optional<int> crossover(const std::vector<BenchRow>& rows);

// results.csv (every column) and table.csv (grid,max-err,L2-err,precond,N0,TP).
void emit_tables(const std::vector<ResultRow>& rows, const std::filesystem::path& dir);
void write_history_csv(const std::filesystem::path& path, const std::vector<HistoryEntry>& history);
void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows);
// Real part on the planes x = 0.5 and y = 0.5 (nearest nodes) as CSV and snapshots.
void write_slices(const std::filesystem::path& dir, const std::string& stem, const Field3& u);

std::string format_number(double v);

}  // namespace helm
