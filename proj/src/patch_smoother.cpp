#include "pmg/patch_smoother.hpp"

namespace pmg {

PatchSmoother::PatchSmoother(const LevelOperator& op, std::vector<VertexPatch> patches,
                             std::vector<std::unique_ptr<LocalSolver>> solvers)
    : op_(&op), patches_(std::move(patches)), solvers_(std::move(solvers)) {
  if (patches_.size() != solvers_.size()) throw ShapeMismatch("PatchSmoother: one local solver per patch expected");
  patch_ops_.reserve(patches_.size());
  for (const auto& p : patches_) patch_ops_.emplace_back(op.cells(), p.cells, p.space);
}

PatchSmoother PatchSmoother::with_pmg(const LevelOperator& op, const PLevelOperators& p_ops,
                                      const SmootherConfig& config) {
  if (config.n_mg < 1) throw std::invalid_argument("PatchSmoother: N_MG must be >= 1");
  auto patches = collect_vertex_patches(op.mesh(), op.dofs());
  std::vector<std::unique_ptr<LocalSolver>> solvers;
  solvers.reserve(patches.size());
  const PmgOptions options{config.kind, config.omega};
  for (const auto& p : patches) {
    auto h = std::make_shared<const PLevelHierarchy>(op.mesh(), p, p_ops, options);
    solvers.push_back(std::make_unique<PmgLocalSolver>(std::move(h), config.n_mg));
  }
  return PatchSmoother(op, std::move(patches), std::move(solvers));
}

PatchSmoother PatchSmoother::with_dense(const LevelOperator& op) {
  auto patches = collect_vertex_patches(op.mesh(), op.dofs());
  std::vector<std::unique_ptr<LocalSolver>> solvers;
  for (const auto& p : patches)
    solvers.push_back(std::make_unique<DenseLocalSolver>(PatchOperator(op.cells(), p.cells, p.space)));
  return PatchSmoother(op, std::move(patches), std::move(solvers));
}

void PatchSmoother::update(std::size_t j, std::span<const double> u, std::span<const double> b,
                           std::span<double> d) const {
  const VertexPatch& patch = patches_[j];
  const auto& mask = op_->dofs().boundary_mask();
  thread_local std::vector<double> closure, r;
  closure.resize(patch.closure_dofs.size());
  r.resize(patch.interior_dofs.size());
  for (std::size_t i = 0; i < closure.size(); ++i) {
    const int g = patch.closure_dofs[i];
    closure[i] = mask[g] ? 0.0 : u[g];
  }
  patch_ops_[j].apply_closure(closure, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[patch.interior_dofs[i]] - r[i];
  solvers_[j]->solve(r, d);
}

std::vector<double> PatchSmoother::local_update(std::size_t j, std::span<const double> u,
                                                std::span<const double> b) const {
  std::vector<double> d(patches_[j].interior_dofs.size());
  update(j, u, b, d);
  return d;
}

void PatchSmoother::sweep(std::span<double> u, std::span<const double> b) const {
  if (u.size() != op_->n_dofs() || b.size() != op_->n_dofs()) throw ShapeMismatch("PatchSmoother::sweep: size");
  thread_local std::vector<double> d;
  for (std::size_t j = 0; j < patches_.size(); ++j) {
    d.resize(patches_[j].interior_dofs.size());
    update(j, u, b, d);
    const auto& idx = patches_[j].interior_dofs;
    for (std::size_t i = 0; i < idx.size(); ++i) u[idx[i]] += d[i];
  }
}

}  // namespace pmg
