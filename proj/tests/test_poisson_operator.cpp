#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "pmg/kernels.hpp"
#include "pmg/poisson_operator.hpp"
#include "support.hpp"

using namespace pmg;
namespace ts = testing_support;

namespace {

struct Case {
  const char* name;
  MeshLevel mesh;
};

std::vector<Case> small_meshes(int dim) {
  std::vector<Case> out;
  out.push_back({"cartesian", build_cartesian_hierarchy(dim, 1, 2).finest()});
  out.push_back({"distorted", distort_hierarchy(build_cartesian_hierarchy(dim, 2, 1), {0.1, 17}).finest()});
  out.push_back({"simplex", build_standalone_patch(PatchKind::simplex, dim, 0.1, 3)});
  if (dim == 2) out.push_back({"kershaw", build_kershaw_hierarchy(2, 1, 0.3).finest()});
  return out;
}

}  // namespace

TEST_CASE("matrix-free level operator matches the element-loop assembly") {
  for (int d = 2; d <= 3; ++d)
    for (const auto& c : small_meshes(d))
      for (int p = 1; p <= (d == 2 ? 4 : 3); ++p) {
        const LevelOperator op(c.mesh, p);
        if (op.n_dofs() > 2000) continue;
        CAPTURE(c.name);
        CAPTURE(d);
        CAPTURE(p);
        const Eigen::MatrixXd ref = ts::naive_global_matrix(c.mesh, op.dofs());
        for (int trial = 0; trial < 5; ++trial) {
          auto u = ts::random_vector(op.n_dofs(), 31 * trial + p);
          op.dofs().zero_boundary(u);
          const auto v = op.apply(u);
          CHECK(ts::rel_diff(v, ts::to_std(ref * ts::to_eigen(u))) < 1e-11);
        }
      }
}

TEST_CASE("cell-wise coefficients enter the operator") {
  const MeshLevel m = distort_hierarchy(build_cartesian_hierarchy(2, 2, 1), {0.15, 2}).finest();
  Coefficient coeff;
  for (int c = 0; c < m.n_cells(); ++c) coeff.cell_mu.push_back(std::pow(10.0, c % 4));
  const LevelOperator op(m, 3, coeff);
  const Eigen::MatrixXd ref = ts::naive_global_matrix(m, op.dofs(), coeff.cell_mu);
  auto u = ts::random_vector(op.n_dofs(), 5);
  op.dofs().zero_boundary(u);
  CHECK(ts::rel_diff(op.apply(u), ts::to_std(ref * ts::to_eigen(u))) < 1e-11);
}

TEST_CASE("pointwise coefficient equal to a constant matches the cell constant") {
  const MeshLevel m = build_cartesian_hierarchy(2, 2, 2).finest();
  Coefficient a, b;
  a.cell_mu.assign(m.n_cells(), 3.0);
  b.pointwise = [](const Point&) { return 3.0; };
  const LevelOperator opa(m, 2, a), opb(m, 2, b);
  const auto u = ts::random_vector(opa.n_dofs(), 1);
  CHECK(ts::rel_diff(opa.apply(u), opb.apply(u)) < 1e-14);
}

TEST_CASE("linear functions are harmonic") {
  for (int d = 2; d <= 3; ++d)
    for (int p = 1; p <= 3; ++p) {
      const MeshLevel m = build_cartesian_hierarchy(d, 2, 2).finest();
      const LevelOperator op(m, p);
      const auto u = op.dofs().interpolate(m, [](const Point& x) { return x[0]; });
      // Unmasked cell-by-cell action, since the level operator drops boundary inputs.
      std::vector<double> v(u.size(), 0.0);
      std::vector<double> in(op.cells().dofs_per_cell()), out(in.size());
      for (int c = 0; c < m.n_cells(); ++c) {
        const auto idx = op.dofs().cell_dofs(c);
        for (std::size_t k = 0; k < idx.size(); ++k) in[k] = u[idx[k]];
        op.cells().apply(c, in, out);
        for (std::size_t k = 0; k < idx.size(); ++k) v[idx[k]] += out[k];
      }
      for (std::size_t i = 0; i < v.size(); ++i)
        if (!op.dofs().is_boundary(i)) CHECK(std::abs(v[i]) < 1e-12);
    }
}

TEST_CASE("constrained rows are the identity and boundary inputs do not leak") {
  const MeshLevel m = build_cartesian_hierarchy(2, 1, 2).finest();
  const LevelOperator op(m, 2);
  std::vector<double> u(op.n_dofs(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i)
    if (op.dofs().is_boundary(i)) u[i] = 1.0 + static_cast<double>(i);
  const auto v = op.apply(u);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == (op.dofs().is_boundary(i) ? u[i] : 0.0));
  CHECK_THROWS_AS(apply_global(op, std::vector<double>(3)), ShapeMismatch);
}

TEST_CASE("Q1 on the 2x2 square") {
  const MeshLevel m = build_cartesian_hierarchy(2, 1, 2).finest();
  const LevelOperator op(m, 1);
  const Eigen::MatrixXd A = assemble_dense(op);
  REQUIRE(A.rows() == 9);
  CHECK(A(4, 4) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
  for (int i = 0; i < 9; ++i)
    if (i != 4) CHECK(A(4, i) == 0.0);  // neighbours are constrained
}

TEST_CASE("dense operator is symmetric positive definite") {
  for (int d = 2; d <= 3; ++d)
    for (const auto& c : small_meshes(d)) {
      const LevelOperator op(c.mesh, 2);
      const Eigen::MatrixXd A = assemble_dense(op);
      CHECK((A - A.transpose()).cwiseAbs().maxCoeff() < 1e-12 * A.cwiseAbs().maxCoeff());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
      for (int trial = 0; trial < 100; ++trial) {
        auto u = ts::random_vector(op.n_dofs(), trial);
        auto w = ts::random_vector(op.n_dofs(), 1000 + trial);
        op.dofs().zero_boundary(u);
        op.dofs().zero_boundary(w);
        const auto Au = op.apply(u), Aw = op.apply(w);
        const double a = ts::dot(Au, w), b = ts::dot(u, Aw);
        CHECK(std::abs(a - b) <= 1e-12 * (std::abs(a) + std::abs(b) + 1e-300));
        CHECK(ts::dot(Au, u) > 0.0);
      }
    }
}

TEST_CASE("dense assembly refuses large systems") {
  const MeshLevel m = build_cartesian_hierarchy(2, 1, 40).finest();
  const LevelOperator op(m, 4);
  REQUIRE(op.n_dofs() > dense_size_cap);
  CHECK_THROWS_AS(assemble_dense(op), TooLarge);
}

TEST_CASE("cell diagonal matches unit-vector application") {
  const MeshLevel m = distort_hierarchy(build_cartesian_hierarchy(3, 2, 1), {0.2, 8}).finest();
  for (int p = 1; p <= 5; ++p) {
    const CellOperator cells(m, p);
    const int n = cells.dofs_per_cell();
    std::vector<double> diag(n), e(n), out(n);
    for (int c = 0; c < m.n_cells(); ++c) {
      cells.diagonal(c, diag);
      for (int i = 0; i < n; ++i) {
        std::fill(e.begin(), e.end(), 0.0);
        e[i] = 1.0;
        cells.apply(c, e, out);
        CHECK(diag[i] == doctest::Approx(out[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("patch operators") {
  for (int d = 2; d <= 3; ++d) {
    const MeshLevel m = distort_hierarchy(build_cartesian_hierarchy(d, 2, 1), {0.1, 4}).finest();
    for (int p = 1; p <= 3; ++p) {
      const LevelOperator op(m, p);
      const Eigen::MatrixXd A = assemble_dense(op);
      const auto patches = collect_vertex_patches(m, op.dofs());
      for (const auto& patch : patches) {
        const PatchOperator pop(op.cells(), patch.cells, patch.space);
        const Eigen::MatrixXd Aj = assemble_dense(pop);
        const Eigen::MatrixXd ref = ts::submatrix(A, patch.interior_dofs);
        CHECK((Aj - ref).norm() <= 1e-12 * ref.norm());
        CHECK((assemble_dense(op, patch) - ref).norm() <= 1e-12 * ref.norm());

        // Diagonal at this degree.
        const auto diag = patch_diagonal(op.cells(), m, patch);
        for (std::size_t i = 0; i < diag.size(); ++i) {
          CHECK(diag[i] > 0.0);
          CHECK(diag[i] == doctest::Approx(ref(i, i)).epsilon(1e-12));
        }

        // Closure application equals the global residual restricted to the patch,
        // whatever u is outside the closure.
        auto u = ts::random_vector(op.n_dofs(), 77);
        op.dofs().zero_boundary(u);
        const auto Au = op.apply(u);
        std::vector<double> uc(patch.closure_dofs.size());
        for (std::size_t k = 0; k < uc.size(); ++k) uc[k] = u[patch.closure_dofs[k]];
        const auto y = apply_patch(op, patch, uc);
        std::vector<double> yref(patch.interior_dofs.size());
        for (std::size_t k = 0; k < yref.size(); ++k) yref[k] = Au[patch.interior_dofs[k]];
        CHECK(ts::rel_diff(y, yref) < 1e-12);

        std::vector<double> zero(uc.size(), 0.0);
        for (double v : apply_patch(op, patch, zero)) CHECK(v == 0.0);
      }
      // Locality: rows of patch-interior DoFs vanish outside the closure.
      const auto& patch = patches[patches.size() / 2];
      std::vector<char> in_closure(op.n_dofs(), 0);
      for (int i : patch.closure_dofs) in_closure[i] = 1;
      for (int i : patch.interior_dofs)
        for (std::size_t j = 0; j < op.n_dofs(); ++j)
          if (!in_closure[j]) CHECK(A(i, j) == 0.0);
    }
  }
}

TEST_CASE("patch diagonal at degree one on the unit patch is 8/3") {
  const MeshLevel m = build_standalone_patch(PatchKind::cartesian, 2, 0.0, 0);
  const LevelOperator op(m, 3);
  const auto patch = collect_vertex_patches(m, op.dofs()).at(0);
  const CellOperator cells1(m, 1);
  const auto diag = patch_diagonal(cells1, m, patch);
  REQUIRE(diag.size() == 1);
  CHECK(diag[0] == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("cell operator FLOPs grow like p^(d+1)") {
  const MeshLevel m = build_cartesian_hierarchy(2, 1, 1).finest();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int p = 3; p <= 15; ++p) {
    const CellOperator cells(m, p);
    const auto u = ts::random_vector(cells.dofs_per_cell(), p);
    std::vector<double> v(u.size());
    kernels::flops::reset();
    cells.apply(0, u, v);
    const double x = std::log(p), y = std::log(static_cast<double>(kernels::flops::count()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  CHECK((n * sxy - sx * sy) / (n * sxx - sx * sx) <= 3.2);
}
