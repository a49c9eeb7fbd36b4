#include "pmg/bench.hpp"

#include <cstdio>
#include <ostream>
#include <random>

namespace pmg {

const char* mesh_kind_name(MeshKind kind) {
  switch (kind) {
    case MeshKind::cartesian:
      return "cartesian";
    case MeshKind::kershaw:
      return "kershaw";
    case MeshKind::simplex_patch:
      return "simplex-patch";
  }
  return "?";
}

namespace {

std::uint64_t attempt_seed(std::uint64_t seed, int attempt) {
  return seed + static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ull;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

SinglePatchRun single_patch_solve(PatchKind kind, int dim, int degree, double delta, double mu,
                                  SmootherKind smoother, std::uint64_t seed, double tol, int max_iter) {
  MeshLevel mesh;
  for (int attempt = 0;; ++attempt) {
    try {
      mesh = build_standalone_patch(kind, dim, delta, attempt_seed(seed, attempt));
      break;
    } catch (const DegenerateMesh&) {
      if (attempt + 1 >= max_geometry_attempts) throw;
    }
  }
  Coefficient coeff;
  coeff.cell_mu.assign(mesh.n_cells(), 1.0);
  coeff.cell_mu[0] = mu;
  const LevelOperator op(mesh, degree, coeff);
  const PLevelOperators p_ops(mesh, op.cells(), coeff);
  const auto patches = collect_vertex_patches(mesh, op.dofs());
  const PLevelHierarchy h(mesh, patches.at(0), p_ops, PmgOptions{smoother, 0.5});
  const auto& A = h.op(h.n_levels() - 1);

  std::mt19937_64 rng(seed);
  std::vector<double> b(A.n_interior());
  for (double& v : b) v = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;

  LinearOperator apply = [&](std::span<const double> x, std::span<double> y) { A.apply(x, y); };
  LinearOperator prec = [&](std::span<const double> r, std::span<double> z) { h.local_solve(r, z, 1); };
  SinglePatchRun run;
  try {
    run.report = cg(apply, prec, b, tol, max_iter).report;
  } catch (const BreakdownError&) {
    run.breakdown = true;
    run.report.converged = false;
    run.report.sentinel_applied = true;
  }
  return run;
}

std::vector<SinglePatchRow> run_single_patch(const ExperimentSpec& spec) {
  if (spec.mesh == MeshKind::kershaw) throw std::invalid_argument("single-patch runs use cartesian or simplex-patch");
  const PatchKind kind = spec.mesh == MeshKind::cartesian ? PatchKind::cartesian : PatchKind::simplex;
  const int max_iter = spec.max_iter > 0 ? spec.max_iter : 100;
  std::vector<SinglePatchRow> rows;
  for (int p : spec.degrees) {
    for (double delta : spec.distortions) {
      for (double mu : spec.mus) {
        SinglePatchRow row{p, delta, mu};
        double sum = 0.0;
        for (int r = 0; r < spec.realizations; ++r) {
          SinglePatchRun run;
          try {
            run = single_patch_solve(kind, spec.dim, p, delta, mu, spec.smoother, spec.seed + r, spec.tol, max_iter);
          } catch (const DegenerateMesh&) {
            ++row.rejected;
            continue;
          }
          ++row.realizations;
          if (run.breakdown) ++row.breakdowns;
          if (!run.report.converged) {
            ++row.non_converged;
            sum += sentinel_iterations;
          } else {
            sum += run.report.iterations;
          }
        }
        row.avg = row.realizations > 0 ? sum / row.realizations : sentinel_iterations;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

MeshHierarchy build_global_hierarchy(int dim, int levels, MeshKind mesh, double delta, std::uint64_t seed,
                                     double epsilon) {
  if (mesh == MeshKind::simplex_patch) throw std::invalid_argument("global runs use cartesian or kershaw meshes");
  const MeshHierarchy base = mesh == MeshKind::kershaw ? build_kershaw_hierarchy(dim, levels, epsilon)
                                                       : build_cartesian_hierarchy(dim, levels, 2);
  if (delta == 0.0) return base;
  for (int attempt = 0;; ++attempt) {
    try {
      return distort_hierarchy(base, DistortionSpec{delta, attempt_seed(seed, attempt)});
    } catch (const DegenerateMesh&) {
      if (attempt + 1 >= max_geometry_attempts) throw;
    }
  }
}

GlobalRow global_solve(int dim, int degree, int levels, MeshKind mesh, double delta, SmootherKind smoother,
                       int n_mg, std::uint64_t seed, double tol, int max_iter, double epsilon) {
  const MeshHierarchy h = build_global_hierarchy(dim, levels, mesh, delta, seed, epsilon);
  GmgConfig config;
  config.degree = degree;
  config.smoother = SmootherConfig{smoother, n_mg, 0.5};
  const GeometricMultigrid mg(h, config);
  const auto b = random_rhs(mg.finest().dofs(), seed);
  GlobalRow row{dim, degree, levels, delta, mesh, smoother, n_mg, 0, mg.n_dofs(), false, seed};
  try {
    const auto res = solve_global(mg, b, tol, max_iter);
    row.iterations = res.report.iterations;
    row.converged = res.report.converged;
  } catch (const CoarseNotConverged&) {
    row.iterations = max_iter;
    row.converged = false;
  }
  return row;
}

std::vector<GlobalRow> run_global(const ExperimentSpec& spec) {
  const int max_iter = spec.max_iter > 0 ? spec.max_iter : 200;
  std::vector<GlobalRow> rows;
  for (int p : spec.degrees)
    for (double delta : spec.distortions)
      for (int r = 0; r < spec.realizations; ++r)
        rows.push_back(global_solve(spec.dim, p, spec.levels, spec.mesh, delta, spec.smoother, spec.n_mg,
                                    spec.seed + r, spec.tol, max_iter, spec.epsilon));
  return rows;
}

std::size_t dof_count(int dim, int degree, int levels, MeshKind mesh) {
  if (mesh == MeshKind::simplex_patch) throw std::invalid_argument("dof_count: structured meshes only");
  const std::size_t coarse = mesh == MeshKind::kershaw ? kershaw_coarse_cells : 2;
  const std::size_t per_dir = (coarse << (levels - 1)) * degree + 1;
  std::size_t n = 1;
  for (int k = 0; k < dim; ++k) n *= per_dir;
  return n;
}

void write_single_patch_csv(std::ostream& os, const std::vector<SinglePatchRow>& rows) {
  os << "degree,distortion,mu,avg\n";
  for (const auto& r : rows) os << r.degree << ',' << num(r.distortion) << ',' << num(r.mu) << ',' << num(r.avg) << '\n';
}

void write_global_csv(std::ostream& os, const std::vector<GlobalRow>& rows) {
  os << "dim,degree,L,distortion,mesh,smoother,n_mg,iterations,dofs,converged\n";
  for (const auto& r : rows)
    os << r.dim << ',' << r.degree << ',' << r.levels << ',' << num(r.distortion) << ',' << mesh_kind_name(r.mesh)
       << ',' << smoother_name(r.smoother) << ',' << r.n_mg << ',' << r.iterations << ',' << r.dofs << ','
       << (r.converged ? 1 : 0) << '\n';
}

}  // namespace pmg
