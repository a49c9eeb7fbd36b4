#pragma once

// Multiplicative vertex-patch smoother: for each patch in a fixed order,
// gather closure values, form the interior residual, solve locally and add
// the correction.

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pmg/local_pmg.hpp"
#include "pmg/patch.hpp"
#include "pmg/poisson_operator.hpp"

namespace pmg {

/// Approximate inverse of one patch interior operator.
class LocalSolver {
 public:
  virtual ~LocalSolver() = default;
  virtual void solve(std::span<const double> r, std::span<double> d) const = 0;
};

/// n_cycles V-cycles of the local p-multigrid.
class PmgLocalSolver final : public LocalSolver {
 public:
  PmgLocalSolver(std::shared_ptr<const PLevelHierarchy> hierarchy, int n_cycles)
      : hierarchy_(std::move(hierarchy)), n_cycles_(n_cycles) {}
  void solve(std::span<const double> r, std::span<double> d) const override {
    hierarchy_->local_solve(r, d, n_cycles_);
  }
  const PLevelHierarchy& hierarchy() const { return *hierarchy_; }

 private:
  std::shared_ptr<const PLevelHierarchy> hierarchy_;
  int n_cycles_;
};

/// Exact solve with the assembled patch matrix (Cholesky).
class DenseLocalSolver final : public LocalSolver {
 public:
  explicit DenseLocalSolver(const PatchOperator& op) : llt_(assemble_dense(op)) {}
  void solve(std::span<const double> r, std::span<double> d) const override {
    const Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(r.size()));
    Eigen::Map<Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size())) = llt_.solve(rv);
  }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

struct SmootherConfig {
  SmootherKind kind = SmootherKind::jacobi;
  int n_mg = 1;
  double omega = 0.5;
};

class PatchSmoother {
 public:
  /// Uses the given local solvers, one per patch.
  PatchSmoother(const LevelOperator& op, std::vector<VertexPatch> patches,
                std::vector<std::unique_ptr<LocalSolver>> solvers);

  /// Builds p-multigrid local solvers for every interior vertex of the level.
  static PatchSmoother with_pmg(const LevelOperator& op, const PLevelOperators& p_ops, const SmootherConfig& config);
  /// Dense exact local solvers (testing).
  static PatchSmoother with_dense(const LevelOperator& op);

  /// Correction Pi_j^T d_j for patch j given the current iterate; returned
  /// on the patch interior, in patch order.
  std::vector<double> local_update(std::size_t j, std::span<const double> u, std::span<const double> b) const;
  /// One forward multiplicative sweep over all patches, in place.
  void sweep(std::span<double> u, std::span<const double> b) const;

  std::size_t n_patches() const { return patches_.size(); }
  const VertexPatch& patch(std::size_t j) const { return patches_[j]; }
  const LocalSolver& solver(std::size_t j) const { return *solvers_[j]; }

 private:
  void update(std::size_t j, std::span<const double> u, std::span<const double> b, std::span<double> d) const;

  const LevelOperator* op_;
  std::vector<VertexPatch> patches_;
  std::vector<PatchOperator> patch_ops_;
  std::vector<std::unique_ptr<LocalSolver>> solvers_;
};

}  // namespace pmg
