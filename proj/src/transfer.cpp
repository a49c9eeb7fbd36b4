#include "pmg/transfer.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace pmg {

Matrix1D interpolation_matrix(std::span<const double> coarse_nodes, std::span<const double> fine_points) {
  Matrix1D m(static_cast<int>(fine_points.size()), static_cast<int>(coarse_nodes.size()));
  for (int i = 0; i < m.rows; ++i) {
    const auto v = lagrange_values(coarse_nodes, fine_points[i]);
    for (int j = 0; j < m.cols; ++j) m(i, j) = v[j];
  }
  return m;
}

namespace {

std::array<const Matrix1D*, 3> same(const Matrix1D& m) { return {&m, &m, &m}; }

}  // namespace

HTransfer::HTransfer(const MeshHierarchy& hierarchy, int fine_level, const DofMap& coarse, const DofMap& fine)
    : coarse_(&coarse), fine_(&fine) {
  if (fine_level < 1 || fine_level >= hierarchy.n_levels())
    throw std::invalid_argument("HTransfer: fine level out of range");
  if (coarse.degree() != fine.degree()) throw ShapeMismatch("HTransfer: degrees differ");
  parent_ = hierarchy.parent_map[fine_level];
  child_bits_ = hierarchy.child_position[fine_level];
  if (static_cast<int>(parent_.size()) != fine.n_cells()) throw ShapeMismatch("HTransfer: fine cell count mismatch");

  const auto nodes = gauss_lobatto_points(fine.degree() + 1);
  for (int b = 0; b < 2; ++b) {
    std::vector<double> pts(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) pts[i] = 0.5 * (nodes[i] + b);
    embed_[b] = interpolation_matrix(nodes, pts);
    embed_t_[b] = embed_[b].transpose();
  }

  const int nd = fine.dofs_per_cell();
  std::vector<char> seen(fine.n_dofs(), 0);
  owned_.assign(static_cast<std::size_t>(fine.n_cells()) * nd, 0);
  for (int c = 0; c < fine.n_cells(); ++c) {
    const auto idx = fine.cell_dofs(c);
    for (int i = 0; i < nd; ++i) {
      if (seen[idx[i]]) continue;
      seen[idx[i]] = 1;
      owned_[static_cast<std::size_t>(c) * nd + i] = 1;
    }
  }
}

void HTransfer::prolongate(std::span<const double> coarse, std::span<double> fine) const {
  if (coarse.size() != n_coarse() || fine.size() != n_fine()) throw ShapeMismatch("HTransfer::prolongate: size");
  const int dim = fine_->dim();
  const int nd = fine_->dofs_per_cell();
  thread_local std::vector<double> loc_c, loc_f;
  loc_c.resize(nd);
  loc_f.resize(nd);
  const auto& cmask = coarse_->boundary_mask();
  for (int c = 0; c < fine_->n_cells(); ++c) {
    const auto cidx = coarse_->cell_dofs(parent_[c]);
    for (int i = 0; i < nd; ++i) loc_c[i] = cmask[cidx[i]] ? 0.0 : coarse[cidx[i]];
    std::array<const Matrix1D*, 3> mats{};
    for (int k = 0; k < dim; ++k) mats[k] = &embed_[(child_bits_[c] >> k) & 1];
    apply_tensor_product(dim, mats, loc_c, loc_f);
    const auto fidx = fine_->cell_dofs(c);
    const char* own = owned_.data() + static_cast<std::size_t>(c) * nd;
    for (int i = 0; i < nd; ++i)
      if (own[i]) fine[fidx[i]] = loc_f[i];
  }
  fine_->zero_boundary(fine);
}

void HTransfer::restrict(std::span<const double> fine, std::span<double> coarse) const {
  if (coarse.size() != n_coarse() || fine.size() != n_fine()) throw ShapeMismatch("HTransfer::restrict: size");
  const int dim = fine_->dim();
  const int nd = fine_->dofs_per_cell();
  thread_local std::vector<double> loc_c, loc_f;
  loc_c.resize(nd);
  loc_f.resize(nd);
  const auto& fmask = fine_->boundary_mask();
  std::fill(coarse.begin(), coarse.end(), 0.0);
  for (int c = 0; c < fine_->n_cells(); ++c) {
    const auto fidx = fine_->cell_dofs(c);
    const char* own = owned_.data() + static_cast<std::size_t>(c) * nd;
    for (int i = 0; i < nd; ++i) loc_f[i] = (own[i] && !fmask[fidx[i]]) ? fine[fidx[i]] : 0.0;
    std::array<const Matrix1D*, 3> mats{};
    for (int k = 0; k < dim; ++k) mats[k] = &embed_t_[(child_bits_[c] >> k) & 1];
    apply_tensor_product(dim, mats, loc_f, loc_c);
    const auto cidx = coarse_->cell_dofs(parent_[c]);
    for (int i = 0; i < nd; ++i) coarse[cidx[i]] += loc_c[i];
  }
  coarse_->zero_boundary(coarse);
}

std::vector<double> prolongate_h(const HTransfer& t, std::span<const double> coarse) {
  std::vector<double> fine(t.n_fine(), 0.0);
  t.prolongate(coarse, fine);
  return fine;
}

std::vector<double> restrict_h(const HTransfer& t, std::span<const double> fine) {
  std::vector<double> coarse(t.n_coarse(), 0.0);
  t.restrict(fine, coarse);
  return coarse;
}

PTransfer::PTransfer(std::shared_ptr<const PatchSpace> coarse, std::shared_ptr<const PatchSpace> fine)
    : coarse_(std::move(coarse)), fine_(std::move(fine)) {
  if (coarse_->dim != fine_->dim || coarse_->n_cells != fine_->n_cells)
    throw ShapeMismatch("PTransfer: spaces belong to different patches");
  if (coarse_->degree >= fine_->degree) throw std::invalid_argument("PTransfer: coarse degree must be lower");
  tensor_ = coarse_->tensor && fine_->tensor;
  if (!tensor_) {
    setup_cellwise();
    return;
  }
  // Full 1D patch node sets on [0,2], then drop the two boundary nodes.
  const int pc = coarse_->degree, pf = fine_->degree;
  const auto nc = gauss_lobatto_points(pc + 1);
  const auto nf = gauss_lobatto_points(pf + 1);
  Matrix1D full(2 * pf + 1, 2 * pc + 1);
  for (int cell = 0; cell < 2; ++cell) {
    std::vector<double> pts(pf + 1);
    for (int i = 0; i <= pf; ++i) pts[i] = nf[i];
    const Matrix1D local = interpolation_matrix(nc, pts);
    for (int i = 0; i <= pf; ++i)
      for (int j = 0; j <= pc; ++j) full(cell * pf + i, cell * pc + j) = local(i, j);
  }
  p1d_ = Matrix1D(2 * pf - 1, 2 * pc - 1);
  for (int i = 0; i < p1d_.rows; ++i)
    for (int j = 0; j < p1d_.cols; ++j) p1d_(i, j) = full(i + 1, j + 1);
  r1d_ = p1d_.transpose();
}

PTransfer PTransfer::cellwise(std::shared_ptr<const PatchSpace> coarse, std::shared_ptr<const PatchSpace> fine) {
  PTransfer t;
  t.coarse_ = std::move(coarse);
  t.fine_ = std::move(fine);
  if (t.coarse_->dim != t.fine_->dim || t.coarse_->n_cells != t.fine_->n_cells)
    throw ShapeMismatch("PTransfer: spaces belong to different patches");
  t.setup_cellwise();
  return t;
}

void PTransfer::setup_cellwise() {
  tensor_ = false;
  const auto nc = gauss_lobatto_points(coarse_->degree + 1);
  const auto nf = gauss_lobatto_points(fine_->degree + 1);
  cell_p_ = interpolation_matrix(nc, nf);
  cell_r_ = cell_p_.transpose();
  const int nd = fine_->dofs_per_cell;
  std::vector<char> seen(fine_->n_interior, 0);
  owned_.assign(static_cast<std::size_t>(fine_->n_cells) * nd, 0);
  for (int c = 0; c < fine_->n_cells; ++c) {
    const auto idx = fine_->interior_of(c);
    for (int i = 0; i < nd; ++i) {
      if (idx[i] < 0 || seen[idx[i]]) continue;
      seen[idx[i]] = 1;
      owned_[static_cast<std::size_t>(c) * nd + i] = 1;
    }
  }
}

void PTransfer::prolongate(std::span<const double> coarse, std::span<double> fine) const {
  if (static_cast<int>(coarse.size()) != coarse_->n_interior || static_cast<int>(fine.size()) != fine_->n_interior)
    throw ShapeMismatch("PTransfer::prolongate: size");
  const int dim = fine_->dim;
  if (tensor_) {
    apply_tensor_product(dim, same(p1d_), coarse, fine);
    return;
  }
  thread_local std::vector<double> loc_c, loc_f;
  loc_c.resize(coarse_->dofs_per_cell);
  loc_f.resize(fine_->dofs_per_cell);
  std::fill(fine.begin(), fine.end(), 0.0);
  for (int c = 0; c < fine_->n_cells; ++c) {
    const auto cidx = coarse_->interior_of(c);
    for (int i = 0; i < coarse_->dofs_per_cell; ++i) loc_c[i] = cidx[i] >= 0 ? coarse[cidx[i]] : 0.0;
    apply_tensor_product(dim, same(cell_p_), loc_c, loc_f);
    const auto fidx = fine_->interior_of(c);
    const char* own = owned_.data() + static_cast<std::size_t>(c) * fine_->dofs_per_cell;
    for (int i = 0; i < fine_->dofs_per_cell; ++i)
      if (own[i]) fine[fidx[i]] = loc_f[i];
  }
}

void PTransfer::restrict(std::span<const double> fine, std::span<double> coarse) const {
  if (static_cast<int>(coarse.size()) != coarse_->n_interior || static_cast<int>(fine.size()) != fine_->n_interior)
    throw ShapeMismatch("PTransfer::restrict: size");
  const int dim = fine_->dim;
  if (tensor_) {
    apply_tensor_product(dim, same(r1d_), fine, coarse);
    return;
  }
  thread_local std::vector<double> loc_c, loc_f;
  loc_c.resize(coarse_->dofs_per_cell);
  loc_f.resize(fine_->dofs_per_cell);
  std::fill(coarse.begin(), coarse.end(), 0.0);
  for (int c = 0; c < fine_->n_cells; ++c) {
    const auto fidx = fine_->interior_of(c);
    const char* own = owned_.data() + static_cast<std::size_t>(c) * fine_->dofs_per_cell;
    for (int i = 0; i < fine_->dofs_per_cell; ++i) loc_f[i] = own[i] ? fine[fidx[i]] : 0.0;
    apply_tensor_product(dim, same(cell_r_), loc_f, loc_c);
    const auto cidx = coarse_->interior_of(c);
    for (int i = 0; i < coarse_->dofs_per_cell; ++i)
      if (cidx[i] >= 0) coarse[cidx[i]] += loc_c[i];
  }
}

std::shared_ptr<const PTransfer> tensor_p_transfer(int dim, int pc, int pf) {
  static std::mutex mutex;
  static std::map<std::array<int, 3>, std::shared_ptr<const PTransfer>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{dim, pc, pf}];
  if (!slot) slot = std::make_shared<PTransfer>(tensor_patch_space(dim, pc), tensor_patch_space(dim, pf));
  return slot;
}

namespace {

void check_in_sequence(int patch_degree, int degree) {
  const auto seq = degree_sequence(patch_degree);
  if (std::find(seq.begin(), seq.end(), degree) == seq.end())
    throw DegreeNotInSequence("degree " + std::to_string(degree) + " is not a p-level of a degree-" +
                              std::to_string(patch_degree) + " patch");
}

}  // namespace

std::vector<double> prolongate_p(int dim, int patch_degree, int pc, int pf, std::span<const double> coarse) {
  check_in_sequence(patch_degree, pc);
  check_in_sequence(patch_degree, pf);
  const auto t = tensor_p_transfer(dim, pc, pf);
  std::vector<double> fine(static_cast<std::size_t>(ipow(2 * pf - 1, dim)));
  t->prolongate(coarse, fine);
  return fine;
}

std::vector<double> restrict_p(int dim, int patch_degree, int pf, int pc, std::span<const double> fine) {
  check_in_sequence(patch_degree, pc);
  check_in_sequence(patch_degree, pf);
  const auto t = tensor_p_transfer(dim, pc, pf);
  std::vector<double> coarse(static_cast<std::size_t>(ipow(2 * pc - 1, dim)));
  t->restrict(fine, coarse);
  return coarse;
}

}  // namespace pmg
