#include "pmg/gmg.hpp"

#include <random>
#include <string>

namespace pmg {

GeometricMultigrid::GeometricMultigrid(const MeshHierarchy& hierarchy, const GmgConfig& config,
                                       const Coefficient& coeff)
    : hierarchy_(&hierarchy), config_(config) {
  if (!coeff.cell_mu.empty() && hierarchy.n_levels() > 1)
    throw std::invalid_argument("GeometricMultigrid: use a pointwise coefficient on multilevel hierarchies");
  levels_.resize(hierarchy.n_levels());
  for (int l = 0; l < hierarchy.n_levels(); ++l) {
    const MeshLevel& mesh = hierarchy.levels[l];
    auto& L = levels_[l];
    L.op = std::make_unique<LevelOperator>(mesh, config.degree, coeff);
    L.p_ops = std::make_unique<PLevelOperators>(mesh, L.op->cells(), coeff);
    L.smoother = std::make_unique<PatchSmoother>(PatchSmoother::with_pmg(*L.op, *L.p_ops, config.smoother));
    if (L.smoother->n_patches() == 0)
      throw std::invalid_argument("GeometricMultigrid: level " + std::to_string(l) + " has no interior vertex");
    if (l > 0) L.from_coarser = std::make_unique<HTransfer>(hierarchy, l, levels_[l - 1].op->dofs(), L.op->dofs());
  }
}

void GeometricMultigrid::coarse_solve(std::span<const double> rhs, std::span<double> x) const {
  const auto& L = levels_.front();
  const std::size_t n = L.op->n_dofs();
  LinearOperator A = [&](std::span<const double> u, std::span<double> v) { L.op->apply(u, v); };
  LinearOperator prec = [&](std::span<const double> r, std::span<double> z) {
    std::fill(z.begin(), z.end(), 0.0);
    L.smoother->sweep(z, r);
    // Constrained rows of A are the identity.
    const auto& mask = L.op->dofs().boundary_mask();
    for (std::size_t i = 0; i < n; ++i)
      if (mask[i]) z[i] = r[i];
  };
  auto res = gmres(A, prec, rhs, config_.coarse_tol, config_.coarse_max_iter);
  coarse_its_.push_back(res.report.iterations);
  if (!res.report.converged)
    throw CoarseNotConverged("coarse GMRES did not reach " + std::to_string(config_.coarse_tol) + " in " +
                             std::to_string(config_.coarse_max_iter) + " iterations");
  std::copy(res.x.begin(), res.x.end(), x.begin());
}

void GeometricMultigrid::v_cycle(int level, std::span<const double> rhs, std::span<double> x) const {
  if (level == 0) {
    coarse_solve(rhs, x);
    return;
  }
  const auto& L = levels_[level];
  const std::size_t n = L.op->n_dofs();
  std::fill(x.begin(), x.end(), 0.0);
  L.smoother->sweep(x, rhs);
  std::vector<double> res(n);
  L.op->apply(x, res);
  for (std::size_t i = 0; i < n; ++i) res[i] = rhs[i] - res[i];
  const std::size_t nc = levels_[level - 1].op->n_dofs();
  std::vector<double> rc(nc), xc(nc);
  L.from_coarser->restrict(res, rc);
  v_cycle(level - 1, rc, xc);
  L.from_coarser->prolongate(xc, res);
  for (std::size_t i = 0; i < n; ++i) x[i] += res[i];
  L.smoother->sweep(x, rhs);
}

std::vector<double> random_rhs(const DofMap& dofs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> b(dofs.n_dofs());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    b[i] = dofs.is_boundary(i) ? 0.0 : 2.0 * u - 1.0;
  }
  return b;
}

GlobalSolveResult solve_global(const GeometricMultigrid& mg, std::span<const double> b, double rel_tol,
                               int max_iter) {
  const auto& fine = mg.finest();
  const int top = mg.n_levels() - 1;
  LinearOperator A = [&](std::span<const double> u, std::span<double> v) { fine.apply(u, v); };
  LinearOperator prec = [&](std::span<const double> r, std::span<double> z) {
    mg.v_cycle(top, r, z);
    const auto& mask = fine.dofs().boundary_mask();
    for (std::size_t i = 0; i < z.size(); ++i)
      if (mask[i]) z[i] = r[i];
  };
  auto res = gmres(A, prec, b, rel_tol, max_iter);
  return {std::move(res.x), std::move(res.report)};
}

}  // namespace pmg
