#include "pmg/poisson_operator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pmg/kernels.hpp"

namespace pmg {

namespace {

SumFactorization& scratch(int dim) {
  thread_local SumFactorization sf2(2), sf3(3), sf1(1);
  return dim == 3 ? sf3 : (dim == 2 ? sf2 : sf1);
}

// Symmetric inverse of a d x d matrix stored densely in g (stride 3).
std::array<double, 9> inverse_sym(int dim, const std::array<double, 9>& g, double& det) {
  std::array<double, 9> inv{};
  if (dim == 2) {
    det = g[0] * g[4] - g[1] * g[3];
    inv[0] = g[4] / det;
    inv[4] = g[0] / det;
    inv[1] = inv[3] = -g[1] / det;
    return inv;
  }
  const double a = g[0], b = g[1], c = g[2], d = g[4], e = g[5], f = g[8];
  det = a * (d * f - e * e) - b * (b * f - c * e) + c * (b * e - c * d);
  inv[0] = (d * f - e * e) / det;
  inv[1] = inv[3] = (c * e - b * f) / det;
  inv[2] = inv[6] = (b * e - c * d) / det;
  inv[4] = (a * f - c * c) / det;
  inv[5] = inv[7] = (b * c - a * e) / det;
  inv[8] = (a * d - b * b) / det;
  return inv;
}

}  // namespace

CellOperator::CellOperator(const MeshLevel& mesh, int degree, const Coefficient& coeff)
    : dim_(mesh.dim), n_cells_(mesh.n_cells()), dofs_per_cell_(ipow(degree + 1, mesh.dim)),
      basis_(make_basis(degree)) {
  const int q = basis_.n_quad();
  const int n = basis_.n_nodes();
  const int n_q = ipow(q, dim_);
  const int ne = CellGeometry::n_entries(dim_);
  if (!coeff.cell_mu.empty() && static_cast<int>(coeff.cell_mu.size()) != n_cells_)
    throw ShapeMismatch("CellOperator: one coefficient value per cell expected");
  geometry_.dim = dim_;
  geometry_.n_q = n_q;
  geometry_.metric.resize(static_cast<std::size_t>(n_cells_) * n_q * ne);
  for (int c = 0; c < n_cells_; ++c) {
    const double mu_cell = coeff.cell_value(c);
    double* out = geometry_.metric.data() + static_cast<std::size_t>(c) * n_q * ne;
    for (int iq = 0; iq < n_q; ++iq) {
      Point xi{0.0, 0.0, 0.0};
      double w = 1.0;
      int rest = iq;
      for (int k = 0; k < dim_; ++k) {
        xi[k] = basis_.quad_points[rest % q];
        w *= basis_.quad_weights[rest % q];
        rest /= q;
      }
      const auto J = mesh.jacobian(c, xi);
      std::array<double, 9> G{};
      for (int a = 0; a < dim_; ++a)
        for (int b = 0; b < dim_; ++b)
          for (int r = 0; r < dim_; ++r) G[a * 3 + b] += J[r * 3 + a] * J[r * 3 + b];
      double detG = 0.0;
      const auto Gi = inverse_sym(dim_, G, detG);
      double mu = mu_cell;
      if (coeff.pointwise) mu *= coeff.pointwise(mesh.map(c, xi));
      const double scale = mu * w * std::sqrt(detG);
      double* m = out + static_cast<std::size_t>(iq) * ne;
      int e = 0;
      for (int a = 0; a < dim_; ++a)
        for (int b = a; b < dim_; ++b) m[e++] = scale * Gi[a * 3 + b];
    }
  }

  for (int s = 0; s < 2; ++s) {
    for (int t = 0; t < 2; ++t) {
      Matrix1D& M = prod_[s][t];
      M = Matrix1D(n, q);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < q; ++k) {
          const double fs = s ? basis_.gradients[i * q + k] : basis_.values[i * q + k];
          const double ft = t ? basis_.gradients[i * q + k] : basis_.values[i * q + k];
          M(i, k) = fs * ft;
        }
    }
  }
}

void CellOperator::apply(int cell, std::span<const double> in, std::span<double> out, bool accumulate) const {
  auto& sf = scratch(dim_);
  sf.evaluate_gradients(basis_, in);
  const double* C = geometry_.cell(cell);
  const std::size_t n_q = sf.n_quad_points();
  if (dim_ == 2) {
    double* g0 = sf.gradient(0).data();
    double* g1 = sf.gradient(1).data();
    for (std::size_t i = 0; i < n_q; ++i, C += 3) {
      const double a = g0[i], b = g1[i];
      g0[i] = C[0] * a + C[1] * b;
      g1[i] = C[1] * a + C[2] * b;
    }
    kernels::flops::add(6 * n_q);
  } else if (dim_ == 3) {
    double* g0 = sf.gradient(0).data();
    double* g1 = sf.gradient(1).data();
    double* g2 = sf.gradient(2).data();
    for (std::size_t i = 0; i < n_q; ++i, C += 6) {
      const double a = g0[i], b = g1[i], c = g2[i];
      g0[i] = C[0] * a + C[1] * b + C[2] * c;
      g1[i] = C[1] * a + C[3] * b + C[4] * c;
      g2[i] = C[2] * a + C[4] * b + C[5] * c;
    }
    kernels::flops::add(15 * n_q);
  } else {
    double* g0 = sf.gradient(0).data();
    for (std::size_t i = 0; i < n_q; ++i) g0[i] *= C[i];
    kernels::flops::add(n_q);
  }
  sf.integrate_gradients(basis_, out, accumulate);
}

void CellOperator::diagonal(int cell, std::span<double> out) const {
  const int ne = CellGeometry::n_entries(dim_);
  const int n_q = geometry_.n_q;
  const double* C = geometry_.cell(cell);
  thread_local std::vector<double> src, a, b;
  src.resize(n_q);
  a.resize(n_q);
  b.resize(n_q);
  std::fill(out.begin(), out.end(), 0.0);
  const int q = basis_.n_quad();
  const int n = basis_.n_nodes();
  int e = 0;
  for (int k = 0; k < dim_; ++k) {
    for (int l = k; l < dim_; ++l, ++e) {
      const double factor = (k == l) ? 1.0 : 2.0;
      for (int i = 0; i < n_q; ++i) src[i] = factor * C[static_cast<std::size_t>(i) * ne + e];
      std::array<int, 3> ext{q, q, q};
      std::span<const double> in(src);
      for (int ax = 0; ax < dim_; ++ax) {
        const Matrix1D& M = prod_[ax == k][ax == l];
        const bool last = ax == dim_ - 1;
        std::span<double> dst = last ? out : (ax % 2 == 0 ? std::span<double>(a) : std::span<double>(b));
        contract_axis(ax, M, std::span<const int>(ext.data(), dim_), in, dst, last);
        ext[ax] = n;
        in = dst;
      }
    }
  }
}

LevelOperator::LevelOperator(const MeshLevel& mesh, int degree, const Coefficient& coeff)
    : LevelOperator(mesh, DofMap(mesh, degree), coeff) {}

LevelOperator::LevelOperator(const MeshLevel& mesh, DofMap dofs, const Coefficient& coeff)
    : mesh_(&mesh), dofs_(std::move(dofs)), cells_(mesh, dofs_.degree(), coeff) {}

void LevelOperator::apply(std::span<const double> u, std::span<double> v) const {
  const std::size_t n = dofs_.n_dofs();
  if (u.size() != n || v.size() != n) throw ShapeMismatch("LevelOperator::apply: vector size differs from n_dofs");
  thread_local std::vector<double> loc_in, loc_out;
  const int nd = dofs_.dofs_per_cell();
  loc_in.resize(nd);
  loc_out.resize(nd);
  const auto& mask = dofs_.boundary_mask();
  std::fill(v.begin(), v.end(), 0.0);
  for (int c = 0; c < dofs_.n_cells(); ++c) {
    const auto idx = dofs_.cell_dofs(c);
    for (int i = 0; i < nd; ++i) loc_in[i] = mask[idx[i]] ? 0.0 : u[idx[i]];
    cells_.apply(c, loc_in, loc_out);
    for (int i = 0; i < nd; ++i) v[idx[i]] += loc_out[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    if (mask[i]) v[i] = u[i];
}

std::vector<double> LevelOperator::apply(std::span<const double> u) const {
  std::vector<double> v(dofs_.n_dofs());
  apply(u, v);
  return v;
}

std::vector<double> apply_global(const LevelOperator& op, std::span<const double> u) { return op.apply(u); }

PatchOperator::PatchOperator(const CellOperator& cells, std::vector<int> patch_cells,
                             std::shared_ptr<const PatchSpace> space)
    : cells_(&cells), cells_idx_(std::move(patch_cells)), space_(std::move(space)) {
  if (space_->degree != cells.degree()) throw ShapeMismatch("PatchOperator: degree of space and cells differ");
  if (static_cast<int>(cells_idx_.size()) != space_->n_cells)
    throw ShapeMismatch("PatchOperator: cell count differs from patch space");
}

void PatchOperator::apply(std::span<const double> x, std::span<double> y) const {
  thread_local std::vector<double> loc_in, loc_out;
  const int nd = space_->dofs_per_cell;
  loc_in.resize(nd);
  loc_out.resize(nd);
  std::fill(y.begin(), y.end(), 0.0);
  for (int c = 0; c < space_->n_cells; ++c) {
    const auto idx = space_->interior_of(c);
    for (int i = 0; i < nd; ++i) loc_in[i] = idx[i] >= 0 ? x[idx[i]] : 0.0;
    cells_->apply(cells_idx_[c], loc_in, loc_out);
    for (int i = 0; i < nd; ++i)
      if (idx[i] >= 0) y[idx[i]] += loc_out[i];
  }
}

void PatchOperator::apply_closure(std::span<const double> u_closure, std::span<double> y) const {
  thread_local std::vector<double> loc_in, loc_out;
  const int nd = space_->dofs_per_cell;
  loc_in.resize(nd);
  loc_out.resize(nd);
  std::fill(y.begin(), y.end(), 0.0);
  for (int c = 0; c < space_->n_cells; ++c) {
    const auto cl = space_->closure_of(c);
    const auto idx = space_->interior_of(c);
    for (int i = 0; i < nd; ++i) loc_in[i] = u_closure[cl[i]];
    cells_->apply(cells_idx_[c], loc_in, loc_out);
    for (int i = 0; i < nd; ++i)
      if (idx[i] >= 0) y[idx[i]] += loc_out[i];
  }
}

std::vector<double> PatchOperator::diagonal() const {
  std::vector<double> diag(space_->n_interior, 0.0), loc(space_->dofs_per_cell);
  for (int c = 0; c < space_->n_cells; ++c) {
    cells_->diagonal(cells_idx_[c], loc);
    const auto idx = space_->interior_of(c);
    for (int i = 0; i < space_->dofs_per_cell; ++i)
      if (idx[i] >= 0) diag[idx[i]] += loc[i];
  }
  return diag;
}

std::vector<double> apply_patch(const LevelOperator& op, const VertexPatch& patch,
                                std::span<const double> u_closure) {
  if (u_closure.size() != patch.closure_dofs.size()) throw ShapeMismatch("apply_patch: closure size mismatch");
  PatchOperator pop(op.cells(), patch.cells, patch.space);
  std::vector<double> y(pop.n_interior());
  pop.apply_closure(u_closure, y);
  return y;
}

std::shared_ptr<const PatchSpace> patch_space_at(const MeshLevel& mesh, const VertexPatch& patch, int degree) {
  if (patch.space && patch.space->degree == degree) return patch.space;
  if (patch.tensor()) return tensor_patch_space(mesh.dim, degree);
  return general_patch_space(mesh, patch.cells, degree);
}

std::vector<double> patch_diagonal(const CellOperator& cells_at_degree, const MeshLevel& mesh,
                                   const VertexPatch& patch) {
  PatchOperator pop(cells_at_degree, patch.cells, patch_space_at(mesh, patch, cells_at_degree.degree()));
  return pop.diagonal();
}

namespace {

template <class Apply>
Eigen::MatrixXd assemble_columns(std::size_t n, Apply&& apply) {
  if (n > dense_size_cap)
    throw TooLarge("assemble_dense: " + std::to_string(n) + " unknowns exceed the cap of " +
                   std::to_string(dense_size_cap));
  Eigen::MatrixXd A(n, n);
  std::vector<double> e(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    apply(e, col);
    e[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) A(i, j) = col[i];
  }
  return A;
}

}  // namespace

Eigen::MatrixXd assemble_dense(const LevelOperator& op) {
  return assemble_columns(op.n_dofs(), [&](std::span<const double> x, std::span<double> y) { op.apply(x, y); });
}

Eigen::MatrixXd assemble_dense(const PatchOperator& op) {
  return assemble_columns(static_cast<std::size_t>(op.n_interior()),
                          [&](std::span<const double> x, std::span<double> y) { op.apply(x, y); });
}

Eigen::MatrixXd assemble_dense(const LevelOperator& op, const VertexPatch& patch) {
  return assemble_dense(PatchOperator(op.cells(), patch.cells, patch.space));
}

}  // namespace pmg
