#pragma once

// Geometric multigrid V-cycle over a mesh hierarchy with the vertex-patch
// smoother on every level and a GMRES coarse solve.

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "pmg/krylov.hpp"
#include "pmg/mesh.hpp"
#include "pmg/patch_smoother.hpp"
#include "pmg/poisson_operator.hpp"
#include "pmg/transfer.hpp"

namespace pmg {

/// The coarse GMRES hit its iteration cap.
class CoarseNotConverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GmgConfig {
  int degree = 3;
  SmootherConfig smoother;
  double coarse_tol = 1e-8;
  int coarse_max_iter = 200;
};

class GeometricMultigrid {
 public:
  /// Keeps a reference to `hierarchy`; every level needs an interior vertex.
  GeometricMultigrid(const MeshHierarchy& hierarchy, const GmgConfig& config, const Coefficient& coeff = {});

  int n_levels() const { return static_cast<int>(levels_.size()); }
  const LevelOperator& op(int level) const { return *levels_[level].op; }
  const PatchSmoother& smoother(int level) const { return *levels_[level].smoother; }
  const LevelOperator& finest() const { return *levels_.back().op; }
  std::size_t n_dofs() const { return finest().n_dofs(); }
  const GmgConfig& config() const { return config_; }

  /// One V-cycle with zero initial guess on `level` (0-based).
  void v_cycle(int level, std::span<const double> rhs, std::span<double> x) const;
  /// GMRES on the coarsest level preconditioned by one smoother sweep.
  void coarse_solve(std::span<const double> rhs, std::span<double> x) const;
  /// Iterations taken by the coarse solves so far.
  const std::vector<int>& coarse_iterations() const { return coarse_its_; }

 private:
  struct Level {
    std::unique_ptr<LevelOperator> op;
    std::unique_ptr<PLevelOperators> p_ops;
    std::unique_ptr<PatchSmoother> smoother;
    std::unique_ptr<HTransfer> from_coarser;
  };
  const MeshHierarchy* hierarchy_;
  GmgConfig config_;
  std::vector<Level> levels_;
  mutable std::vector<int> coarse_its_;
};

/// Entries uniform in [-1, 1] at unconstrained DoFs, zero on the boundary.
std::vector<double> random_rhs(const DofMap& dofs, std::uint64_t seed);

struct GlobalSolveResult {
  std::vector<double> x;
  SolveReport report;
};

/// GMRES with the V-cycle as right preconditioner.
GlobalSolveResult solve_global(const GeometricMultigrid& mg, std::span<const double> b, double rel_tol = 1e-8,
                               int max_iter = 200);

}  // namespace pmg
