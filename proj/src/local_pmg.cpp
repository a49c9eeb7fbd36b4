#include "pmg/local_pmg.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <string>

#include <Eigen/Eigenvalues>

namespace pmg {

const char* smoother_name(SmootherKind kind) {
  return kind == SmootherKind::jacobi ? "jacobi" : "cartesian";
}

namespace {

std::shared_ptr<FastDiagData> build_fast_diag(int dim, int p) {
  auto fd = std::make_shared<FastDiagData>();
  fd->dim = dim;
  fd->degree = p;
  fd->m = 2 * p - 1;
  const Basis1D b = make_basis(p);
  const int n = p + 1, q = b.n_quad();
  const int full = 2 * p + 1;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(full, full), M = Eigen::MatrixXd::Zero(full, full);
  for (int cell = 0; cell < 2; ++cell)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < q; ++k) {
          const double w = b.quad_weights[k];
          K(cell * p + i, cell * p + j) += w * b.gradients[i * q + k] * b.gradients[j * q + k];
          M(cell * p + i, cell * p + j) += w * b.values[i * q + k] * b.values[j * q + k];
        }
  const int m = fd->m;
  const Eigen::MatrixXd Ki = K.block(1, 1, m, m), Mi = M.block(1, 1, m, m);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ki, Mi);
  fd->K = Matrix1D(m, m);
  fd->M = Matrix1D(m, m);
  fd->Z = Matrix1D(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      fd->K(i, j) = Ki(i, j);
      fd->M(i, j) = Mi(i, j);
      fd->Z(i, j) = es.eigenvectors()(i, j);
    }
  fd->Zt = fd->Z.transpose();
  fd->lambda.assign(es.eigenvalues().data(), es.eigenvalues().data() + m);

  const std::size_t total = static_cast<std::size_t>(ipow(m, dim));
  fd->diag.assign(total, 0.0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::array<int, 3> g{};
    std::size_t rest = idx;
    for (int k = 0; k < dim; ++k) {
      g[k] = static_cast<int>(rest % m);
      rest /= m;
    }
    double sum = 0.0;
    for (int k = 0; k < dim; ++k) {
      double term = 1.0;
      for (int a = 0; a < dim; ++a) term *= (a == k) ? Ki(g[a], g[a]) : Mi(g[a], g[a]);
      sum += term;
    }
    fd->diag[idx] = sum;
  }
  return fd;
}

}  // namespace

std::shared_ptr<const FastDiagData> fast_diag_data(int dim, int degree) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const FastDiagData>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{dim, degree}];
  if (!slot) slot = build_fast_diag(dim, degree);
  return slot;
}

void fd_solve(const FastDiagData& fd, std::span<const double> r, std::span<double> out) {
  const int dim = fd.dim, m = fd.m;
  const std::size_t total = static_cast<std::size_t>(ipow(m, dim));
  if (r.size() != total || out.size() != total) throw ShapeMismatch("fd_solve: vector size");
  thread_local std::vector<double> t;
  t.resize(total);
  apply_tensor_product(dim, {&fd.Zt, &fd.Zt, &fd.Zt}, r, t);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    double s = 0.0;
    for (int k = 0; k < dim; ++k) {
      s += fd.lambda[rest % m];
      rest /= m;
    }
    t[idx] /= s;
  }
  apply_tensor_product(dim, {&fd.Z, &fd.Z, &fd.Z}, t, out);
}

PLevelOperators::PLevelOperators(const MeshLevel& mesh, const CellOperator& top, const Coefficient& coeff)
    : degrees_(degree_sequence(top.degree())) {
  for (std::size_t k = 0; k + 1 < degrees_.size(); ++k) {
    owned_.push_back(std::make_unique<CellOperator>(mesh, degrees_[k], coeff));
    ops_.push_back(owned_.back().get());
  }
  ops_.push_back(&top);
}

PLevelHierarchy::PLevelHierarchy(const MeshLevel& mesh, const VertexPatch& patch, const PLevelOperators& ops,
                                 const PmgOptions& options)
    : degrees_(ops.degrees()), options_(options) {
  if (options.smoother == SmootherKind::cartesian_reinforced && !patch.tensor())
    throw std::invalid_argument("Cartesian-reinforced smoothing needs a 2^d-cell Cartesian-topology patch");
  const int dim = mesh.dim;
  levels_.reserve(degrees_.size());
  std::vector<std::shared_ptr<const PatchSpace>> spaces;
  for (std::size_t k = 0; k < degrees_.size(); ++k) {
    const int p = degrees_[k];
    auto space = patch_space_at(mesh, patch, p);
    PatchOperator pop(ops.at(k), patch.cells, space);
    auto diag = pop.diagonal();
    for (double& v : diag) {
      if (!(v > 0.0)) throw std::runtime_error("PLevelHierarchy: non-positive patch diagonal");
      v = 1.0 / v;
    }
    std::shared_ptr<const PTransfer> transfer;
    if (k > 0)
      transfer = space->tensor ? tensor_p_transfer(dim, degrees_[k - 1], p)
                               : std::make_shared<PTransfer>(spaces.back(), space);
    spaces.push_back(space);
    std::shared_ptr<const FastDiagData> fd;
    if (options.smoother == SmootherKind::cartesian_reinforced) fd = fast_diag_data(dim, p);
    levels_.push_back(Level{std::move(pop), std::move(diag), std::move(transfer), std::move(fd)});
  }
  const auto& coarse = levels_.front();
  if (coarse.op.n_interior() == 1) {
    coarse_scalar_ = 1.0 / coarse.inv_diag[0];
  } else {
    coarse_factor_.emplace(assemble_dense(coarse.op));
  }
}

std::size_t PLevelHierarchy::level_of(int degree) const {
  const auto it = std::find(degrees_.begin(), degrees_.end(), degree);
  if (it == degrees_.end())
    throw DegreeNotInSequence("degree " + std::to_string(degree) + " is not a p-level of this patch");
  return static_cast<std::size_t>(it - degrees_.begin());
}

std::vector<PLevelHierarchy::Work>& PLevelHierarchy::workspace() const {
  thread_local std::vector<Work> ws;
  if (ws.size() < levels_.size()) ws.resize(levels_.size());
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    const std::size_t n = levels_[k].op.n_interior();
    ws[k].d.resize(n);
    ws[k].r.resize(n);
    ws[k].res.resize(n);
    ws[k].z.resize(n);
  }
  return ws;
}

void PLevelHierarchy::coarse_solve(std::span<const double> r, std::span<double> d, bool strict) const {
  if (coarse_scalar_) {
    d[0] = r[0] / *coarse_scalar_;
    return;
  }
  if (strict)
    throw MultiDofCoarse("degree-1 patch interior has " + std::to_string(levels_.front().op.n_interior()) +
                         " nodes");
  const Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(r.size()));
  Eigen::Map<Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size())) = coarse_factor_->solve(rv);
}

void PLevelHierarchy::precondition(std::size_t level, std::span<const double> r, std::span<double> z) const {
  const Level& L = levels_[level];
  const std::size_t n = r.size();
  if (options_.smoother == SmootherKind::jacobi) {
    for (std::size_t i = 0; i < n; ++i) z[i] = L.inv_diag[i] * r[i];
    return;
  }
  fd_solve(*L.fd, r, z);
  for (std::size_t i = 0; i < n; ++i) z[i] *= L.inv_diag[i] * L.fd->diag[i];
}

void PLevelHierarchy::smooth(std::size_t level, std::span<double> d, std::span<const double> r,
                             bool zero_guess) const {
  auto& w = workspace()[level];
  const std::size_t n = r.size();
  if (zero_guess) {
    precondition(level, r, w.z);
    for (std::size_t i = 0; i < n; ++i) d[i] = options_.omega * w.z[i];
    return;
  }
  levels_[level].op.apply(d, w.res);
  for (std::size_t i = 0; i < n; ++i) w.res[i] = r[i] - w.res[i];
  precondition(level, w.res, w.z);
  for (std::size_t i = 0; i < n; ++i) d[i] += options_.omega * w.z[i];
}

void PLevelHierarchy::v_cycle(std::size_t level, std::span<double> d, std::span<const double> r,
                              bool zero_guess) const {
  if (level == 0) {
    coarse_solve(r, d);
    return;
  }
  auto& ws = workspace();
  auto& w = ws[level];
  auto& c = ws[level - 1];
  const std::size_t n = r.size();
  smooth(level, d, r, zero_guess);
  levels_[level].op.apply(d, w.res);
  for (std::size_t i = 0; i < n; ++i) w.res[i] = r[i] - w.res[i];
  levels_[level].from_coarser->restrict(w.res, c.r);
  v_cycle(level - 1, c.d, c.r, true);
  levels_[level].from_coarser->prolongate(c.d, w.z);
  for (std::size_t i = 0; i < n; ++i) d[i] += w.z[i];
  smooth(level, d, r, false);
}

void PLevelHierarchy::local_solve(std::span<const double> r, std::span<double> d, int n_cycles) const {
  if (n_cycles < 1) throw std::invalid_argument("local_solve: need at least one cycle");
  const std::size_t top = levels_.size() - 1;
  for (int it = 0; it < n_cycles; ++it) v_cycle(top, d, r, it == 0);
}

}  // namespace pmg
