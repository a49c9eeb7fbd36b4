#include <doctest.h>

#include <sstream>

#include "pmg/bench.hpp"

using namespace pmg;

TEST_CASE("DoF counts") {
  CHECK(dof_count(2, 3, 5, MeshKind::cartesian) == 9409);
  CHECK(dof_count(3, 7, 3, MeshKind::cartesian) == 185193);
  CHECK(dof_count(2, 15, 4, MeshKind::kershaw) == 519841);
  CHECK(dof_count(3, 15, 3, MeshKind::cartesian) == 1771561);
  CHECK_THROWS_AS(dof_count(2, 3, 1, MeshKind::simplex_patch), std::invalid_argument);

  const MeshHierarchy h = build_cartesian_hierarchy(2, 3, 2);
  CHECK(DofMap(h.finest(), 3).n_dofs() == dof_count(2, 3, 3, MeshKind::cartesian));
  const MeshHierarchy k = build_kershaw_hierarchy(2, 2, 0.3);
  CHECK(DofMap(k.finest(), 2).n_dofs() == dof_count(2, 2, 2, MeshKind::kershaw));
}

TEST_CASE("CSV output") {
  std::ostringstream os;
  SinglePatchRow r;
  r.degree = 3;
  r.distortion = 0.1;
  r.mu = 1e4;
  r.avg = 12.5;
  write_single_patch_csv(os, {r});
  CHECK(os.str() == "degree,distortion,mu,avg\n3,0.1,10000,12.5\n");

  std::ostringstream og;
  GlobalRow g;
  g.degree = 7;
  g.levels = 5;
  g.distortion = 0.25;
  g.smoother = SmootherKind::cartesian_reinforced;
  g.n_mg = 25;
  g.iterations = 4;
  g.dofs = 1234;
  g.converged = true;
  write_global_csv(og, {g});
  CHECK(og.str() ==
        "dim,degree,L,distortion,mesh,smoother,n_mg,iterations,dofs,converged\n"
        "2,7,5,0.25,cartesian,cartesian,25,4,1234,1\n");
}

TEST_CASE("single-patch runs") {
  const auto a = single_patch_solve(PatchKind::cartesian, 2, 3, 0.0, 1.0, SmootherKind::cartesian_reinforced, 1);
  CHECK(a.report.converged);
  CHECK(a.report.iterations <= 3);
  const auto b = single_patch_solve(PatchKind::simplex, 2, 3, 0.2, 1.0, SmootherKind::jacobi, 5);
  const auto c = single_patch_solve(PatchKind::simplex, 2, 3, 0.2, 1.0, SmootherKind::jacobi, 5);
  CHECK(b.report.residual_history == c.report.residual_history);
  CHECK(b.report.converged);

  ExperimentSpec spec;
  spec.degrees = {2, 3};
  spec.distortions = {0.0, 0.1};
  spec.realizations = 2;
  const auto rows = run_single_patch(spec);
  CHECK(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.realizations == 2);
    CHECK(r.avg > 0.0);
    CHECK(r.avg < sentinel_iterations);
  }
  spec.mesh = MeshKind::kershaw;
  CHECK_THROWS_AS(run_single_patch(spec), std::invalid_argument);
}

TEST_CASE("global runs") {
  const auto r = global_solve(2, 2, 3, MeshKind::cartesian, 0.1, SmootherKind::jacobi, 1, 3);
  CHECK(r.converged);
  CHECK(r.dofs == dof_count(2, 2, 3, MeshKind::cartesian));
  const auto again = global_solve(2, 2, 3, MeshKind::cartesian, 0.1, SmootherKind::jacobi, 1, 3);
  CHECK(again.iterations == r.iterations);
  const auto k = global_solve(2, 2, 2, MeshKind::kershaw, 0.0, SmootherKind::jacobi, 1, 0);
  CHECK(k.converged);
  CHECK_THROWS_AS(build_global_hierarchy(2, 2, MeshKind::simplex_patch, 0.0, 0), std::invalid_argument);
}
