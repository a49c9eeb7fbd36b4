#pragma once

// Matrix-free variable-coefficient Laplacian: cell kernels, whole-level
// application with homogeneous Dirichlet rows, patch-local application and
// dense assembly for testing.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pmg/dof_map.hpp"
#include "pmg/mesh.hpp"
#include "pmg/patch.hpp"
#include "pmg/tensor_basis.hpp"

namespace pmg {

/// Diffusion coefficient: a per-cell constant (empty means 1 everywhere),
/// optionally multiplied by a pointwise function of the physical position.
struct Coefficient {
  std::vector<double> cell_mu;
  std::function<double(const Point&)> pointwise;

  double cell_value(int cell) const { return cell_mu.empty() ? 1.0 : cell_mu[cell]; }
};

/// Per-cell metric data at the q^d quadrature points:
/// C = mu * w * det(J) * J^{-1} J^{-T}, symmetric, d(d+1)/2 entries per point.
struct CellGeometry {
  int dim = 0;
  int n_q = 0;  // points per cell
  std::vector<double> metric;

  static constexpr int n_entries(int dim) { return dim * (dim + 1) / 2; }
  const double* cell(int c) const {
    return metric.data() + static_cast<std::size_t>(c) * n_q * n_entries(dim);
  }
};

/// Degree-p cell kernels on every cell of a mesh.
class CellOperator {
 public:
  CellOperator(const MeshLevel& mesh, int degree, const Coefficient& coeff = {});

  int dim() const { return dim_; }
  int degree() const { return basis_.degree; }
  int n_cells() const { return n_cells_; }
  int dofs_per_cell() const { return dofs_per_cell_; }
  const Basis1D& basis() const { return basis_; }
  const CellGeometry& geometry() const { return geometry_; }

  /// out (+)= A_cell * in, both of length (p+1)^d.
  void apply(int cell, std::span<const double> in, std::span<double> out, bool accumulate = false) const;
  /// Diagonal of the cell matrix.
  void diagonal(int cell, std::span<double> out) const;

 private:
  int dim_;
  int n_cells_;
  int dofs_per_cell_;
  Basis1D basis_;
  CellGeometry geometry_;
  // Products of 1D shape values/derivatives used by diagonal():
  // prod_[k][l] is n x q with entries f_k(q, i) * f_l(q, i), f_0 = value, f_1 = derivative.
  std::array<std::array<Matrix1D, 2>, 2> prod_;
};

/// The level operator A on the full DoF vector: unconstrained rows integrate
/// mu grad u . grad v over all cells, constrained rows are the identity.
/// Values of u on constrained DoFs do not enter unconstrained rows.
class LevelOperator {
 public:
  LevelOperator(const MeshLevel& mesh, int degree, const Coefficient& coeff = {});
  LevelOperator(const MeshLevel& mesh, DofMap dofs, const Coefficient& coeff = {});

  const MeshLevel& mesh() const { return *mesh_; }
  const DofMap& dofs() const { return dofs_; }
  const CellOperator& cells() const { return cells_; }
  std::size_t n_dofs() const { return dofs_.n_dofs(); }

  void apply(std::span<const double> u, std::span<double> v) const;
  std::vector<double> apply(std::span<const double> u) const;

 private:
  const MeshLevel* mesh_;
  DofMap dofs_;
  CellOperator cells_;
};

/// v = A u on the whole level; throws ShapeMismatch on size errors.
std::vector<double> apply_global(const LevelOperator& op, std::span<const double> u);

/// Interior-interior operator of one patch at one degree. The cell operator
/// must be of the same degree as the space.
class PatchOperator {
 public:
  PatchOperator(const CellOperator& cells, std::vector<int> patch_cells, std::shared_ptr<const PatchSpace> space);

  int n_interior() const { return space_->n_interior; }
  int n_closure() const { return space_->n_closure; }
  int degree() const { return space_->degree; }
  const PatchSpace& space() const { return *space_; }
  std::span<const int> patch_cells() const { return cells_idx_; }

  /// y = A_j x for interior vectors.
  void apply(std::span<const double> x, std::span<double> y) const;
  /// y = (A u)_interior for u given on the closure.
  void apply_closure(std::span<const double> u_closure, std::span<double> y) const;
  std::vector<double> diagonal() const;

 private:
  const CellOperator* cells_;
  std::vector<int> cells_idx_;
  std::shared_ptr<const PatchSpace> space_;
};

/// Interior part of A applied to closure values of a patch of `op`'s level.
std::vector<double> apply_patch(const LevelOperator& op, const VertexPatch& patch,
                                std::span<const double> u_closure);

/// Diagonal of the interior patch operator at another degree on the same cells.
std::vector<double> patch_diagonal(const CellOperator& cells_at_degree, const MeshLevel& mesh,
                                   const VertexPatch& patch);

/// Space of `patch` at degree p; shares tensor numberings.
std::shared_ptr<const PatchSpace> patch_space_at(const MeshLevel& mesh, const VertexPatch& patch, int degree);

/// Largest system assemble_dense accepts.
inline constexpr std::size_t dense_size_cap = 20000;

/// Column-by-column assembly; throws TooLarge above dense_size_cap.
Eigen::MatrixXd assemble_dense(const LevelOperator& op);
Eigen::MatrixXd assemble_dense(const PatchOperator& op);
/// Interior block of `patch` in the level operator.
Eigen::MatrixXd assemble_dense(const LevelOperator& op, const VertexPatch& patch);

}  // namespace pmg
