#pragma once

// Embedding prolongation and its transpose between mesh levels (same degree)
// and between polynomial degrees on one patch.

#include <memory>
#include <span>
#include <vector>

#include "pmg/dof_map.hpp"
#include "pmg/mesh.hpp"
#include "pmg/patch.hpp"
#include "pmg/tensor_basis.hpp"

namespace pmg {

/// Interpolation matrix (fine nodes x coarse nodes): degree-p_c Lagrange
/// functions on `coarse_nodes` evaluated at `fine_points`.
Matrix1D interpolation_matrix(std::span<const double> coarse_nodes, std::span<const double> fine_points);

/// Transfer between levels fine_level-1 and fine_level of a hierarchy.
/// Prolongation interpolates the coarse function at the fine nodes; each
/// shared fine node is written by the first fine cell containing it.
/// Boundary entries are treated as zero on input and set to zero on output,
/// so restrict() is the exact transpose of prolongate().
class HTransfer {
 public:
  HTransfer(const MeshHierarchy& hierarchy, int fine_level, const DofMap& coarse, const DofMap& fine);

  void prolongate(std::span<const double> coarse, std::span<double> fine) const;
  void restrict(std::span<const double> fine, std::span<double> coarse) const;

  std::size_t n_coarse() const { return coarse_->n_dofs(); }
  std::size_t n_fine() const { return fine_->n_dofs(); }

 private:
  const DofMap* coarse_;
  const DofMap* fine_;
  std::vector<int> parent_;
  std::vector<int> child_bits_;
  std::vector<char> owned_;  // per fine cell and local node
  std::array<Matrix1D, 2> embed_;
  std::array<Matrix1D, 2> embed_t_;
};

std::vector<double> prolongate_h(const HTransfer& t, std::span<const double> coarse);
std::vector<double> restrict_h(const HTransfer& t, std::span<const double> fine);

/// Transfer between two degrees of the same patch, acting on interior vectors.
class PTransfer {
 public:
  /// Tensor path for 2^d-cell Cartesian patches, cellwise otherwise.
  PTransfer(std::shared_ptr<const PatchSpace> coarse, std::shared_ptr<const PatchSpace> fine);
  /// Forces the cellwise path (also valid for tensor patches).
  static PTransfer cellwise(std::shared_ptr<const PatchSpace> coarse, std::shared_ptr<const PatchSpace> fine);

  void prolongate(std::span<const double> coarse, std::span<double> fine) const;
  void restrict(std::span<const double> fine, std::span<double> coarse) const;

  bool tensor() const { return tensor_; }
  int coarse_degree() const { return coarse_->degree; }
  int fine_degree() const { return fine_->degree; }

 private:
  PTransfer() = default;
  void setup_cellwise();

  std::shared_ptr<const PatchSpace> coarse_;
  std::shared_ptr<const PatchSpace> fine_;
  bool tensor_ = false;
  // Tensor path: interior 1D matrices.
  Matrix1D p1d_;
  Matrix1D r1d_;
  // Cellwise path.
  Matrix1D cell_p_;
  Matrix1D cell_r_;
  std::vector<char> owned_;
};

/// Shared tensor-patch transfer between degrees pc < pf.
std::shared_ptr<const PTransfer> tensor_p_transfer(int dim, int pc, int pf);

/// Tensor-patch p-transfers that check both degrees against the degree
/// sequence of `patch_degree`; throw DegreeNotInSequence otherwise.
std::vector<double> prolongate_p(int dim, int patch_degree, int pc, int pf, std::span<const double> coarse);
std::vector<double> restrict_p(int dim, int patch_degree, int pf, int pc, std::span<const double> fine);

}  // namespace pmg
