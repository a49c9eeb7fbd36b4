#pragma once

// Experiment drivers behind the pmg_bench tool: single-patch CG studies and
// global GMRES iteration counts, with CSV output.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pmg/gmg.hpp"
#include "pmg/krylov.hpp"
#include "pmg/local_pmg.hpp"
#include "pmg/mesh.hpp"

namespace pmg {

enum class MeshKind { cartesian, kershaw, simplex_patch };

const char* mesh_kind_name(MeshKind kind);

/// Iteration count recorded for a non-convergent single-patch run.
inline constexpr double sentinel_iterations = 1000.0;

/// Attempts per realization before a degenerate geometry is given up.
inline constexpr int max_geometry_attempts = 50;

struct ExperimentSpec {
  int dim = 2;
  std::vector<int> degrees{3};
  MeshKind mesh = MeshKind::cartesian;
  int levels = 5;
  std::vector<double> distortions{0.0};
  std::vector<double> mus{1.0};
  SmootherKind smoother = SmootherKind::jacobi;
  int n_mg = 1;
  int realizations = 1;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  double epsilon = 0.3;
  /// 0 selects 100 for single-patch runs and 200 for global runs.
  int max_iter = 0;
};

/// One CG solve on a standalone patch. mu is assigned to the first cell,
/// 1 to the others. The right-hand side is drawn from `seed`.
struct SinglePatchRun {
  SolveReport report;
  bool breakdown = false;
};
SinglePatchRun single_patch_solve(PatchKind kind, int dim, int degree, double delta, double mu,
                                  SmootherKind smoother, std::uint64_t seed, double tol = 1e-8, int max_iter = 100);

struct SinglePatchRow {
  int degree = 0;
  double distortion = 0.0;
  double mu = 1.0;
  double avg = 0.0;
  int realizations = 0;
  int rejected = 0;
  int non_converged = 0;
  int breakdowns = 0;
};

/// Averages over realizations r with seed base + r; non-convergent runs
/// count as sentinel_iterations.
std::vector<SinglePatchRow> run_single_patch(const ExperimentSpec& spec);

struct GlobalRow {
  int dim = 2;
  int degree = 0;
  int levels = 0;
  double distortion = 0.0;
  MeshKind mesh = MeshKind::cartesian;
  SmootherKind smoother = SmootherKind::jacobi;
  int n_mg = 1;
  int iterations = 0;
  std::size_t dofs = 0;
  bool converged = false;
  std::uint64_t seed = 0;
};

/// Hierarchy used by the global runs; distortion retries reseed on
/// degenerate realizations.
MeshHierarchy build_global_hierarchy(int dim, int levels, MeshKind mesh, double delta, std::uint64_t seed,
                                     double epsilon = 0.3);

/// One global solve.
GlobalRow global_solve(int dim, int degree, int levels, MeshKind mesh, double delta, SmootherKind smoother,
                       int n_mg, std::uint64_t seed, double tol = 1e-8, int max_iter = 200, double epsilon = 0.3);

/// One row per (degree, distortion, realization).
std::vector<GlobalRow> run_global(const ExperimentSpec& spec);

/// Finest-level DoFs of a structured hierarchy: (cells_per_dir p + 1)^d.
std::size_t dof_count(int dim, int degree, int levels, MeshKind mesh);

void write_single_patch_csv(std::ostream& os, const std::vector<SinglePatchRow>& rows);
void write_global_csv(std::ostream& os, const std::vector<GlobalRow>& rows);

}  // namespace pmg
