#pragma once

// p-multigrid V-cycle for the interior problem of one vertex patch.

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pmg/patch.hpp"
#include "pmg/poisson_operator.hpp"
#include "pmg/transfer.hpp"

namespace pmg {

enum class SmootherKind { jacobi, cartesian_reinforced };

const char* smoother_name(SmootherKind kind);

/// Fast diagonalization of the reference patch operator
/// A_b = sum_k M x .. x K (axis k) x .. x M on [0,2]^d with unit cells, mu = 1.
struct FastDiagData {
  int dim = 0;
  int degree = 0;
  int m = 0;  // interior nodes per direction, 2p - 1
  /// Interior 1D stiffness and mass matrices.
  Matrix1D K, M;
  /// Columns are M-orthonormal generalized eigenvectors: K Z = M Z diag(lambda).
  Matrix1D Z, Zt;
  std::vector<double> lambda;
  /// diag(A_b) on the interior tensor grid.
  std::vector<double> diag;
};

/// Shared per (dim, degree).
std::shared_ptr<const FastDiagData> fast_diag_data(int dim, int degree);

/// out = A_b^{-1} r.
void fd_solve(const FastDiagData& fd, std::span<const double> r, std::span<double> out);

/// Cell operators of a mesh at every degree of degree_sequence(top.degree()).
/// The top operator is borrowed; lower degrees are built here.
class PLevelOperators {
 public:
  PLevelOperators(const MeshLevel& mesh, const CellOperator& top, const Coefficient& coeff = {});

  const std::vector<int>& degrees() const { return degrees_; }
  const CellOperator& at(std::size_t level) const { return *ops_[level]; }
  std::size_t n_levels() const { return degrees_.size(); }

 private:
  std::vector<int> degrees_;
  std::vector<std::unique_ptr<CellOperator>> owned_;
  std::vector<const CellOperator*> ops_;
};

struct PmgOptions {
  SmootherKind smoother = SmootherKind::jacobi;
  double omega = 0.5;
};

/// Per-patch data of the local V-cycle: one operator, inverse diagonal and
/// transfer per degree, plus the degree-1 coarse solve.
class PLevelHierarchy {
 public:
  PLevelHierarchy(const MeshLevel& mesh, const VertexPatch& patch, const PLevelOperators& ops,
                  const PmgOptions& options = {});

  std::size_t n_levels() const { return levels_.size(); }
  const std::vector<int>& degrees() const { return degrees_; }
  int top_degree() const { return degrees_.back(); }
  int n_interior(std::size_t level) const { return levels_[level].op.n_interior(); }
  const PatchOperator& op(std::size_t level) const { return levels_[level].op; }
  const std::vector<double>& inverse_diagonal(std::size_t level) const { return levels_[level].inv_diag; }
  const PmgOptions& options() const { return options_; }
  /// A_{j,1} when the degree-1 interior has one node.
  std::optional<double> coarse_scalar() const { return coarse_scalar_; }
  /// True when the degree-1 interior has more than one node and a dense
  /// factorization replaces the scalar coarse solve.
  bool multi_dof_coarse() const { return coarse_factor_.has_value(); }

  /// Index of degree p in the sequence; throws DegreeNotInSequence.
  std::size_t level_of(int degree) const;

  /// d = A_{j,1}^{-1} r. Throws MultiDofCoarse if `strict` and the coarse
  /// space has more than one node.
  void coarse_solve(std::span<const double> r, std::span<double> d, bool strict = false) const;
  /// Preconditioner of the Richardson smoother: z = P r.
  void precondition(std::size_t level, std::span<const double> r, std::span<double> z) const;
  /// One step d += omega P (r - A d). `zero_guess` skips the product with d.
  void smooth(std::size_t level, std::span<double> d, std::span<const double> r, bool zero_guess = false) const;
  /// One V-cycle starting from d.
  void v_cycle(std::size_t level, std::span<double> d, std::span<const double> r, bool zero_guess = false) const;
  /// n_cycles stationary V-cycles from a zero initial guess.
  void local_solve(std::span<const double> r, std::span<double> d, int n_cycles) const;

 private:
  struct Level {
    PatchOperator op;
    std::vector<double> inv_diag;
    std::shared_ptr<const PTransfer> from_coarser;  // empty on level 0
    std::shared_ptr<const FastDiagData> fd;         // Cartesian-reinforced only
  };
  struct Work {
    std::vector<double> d, r, res, z;
  };
  std::vector<Work>& workspace() const;

  std::vector<int> degrees_;
  std::vector<Level> levels_;
  PmgOptions options_;
  std::optional<double> coarse_scalar_;
  std::optional<Eigen::LDLT<Eigen::MatrixXd>> coarse_factor_;
};

}  // namespace pmg
