#include "pmg/dof_map.hpp"

#include <algorithm>
#include <map>

#include "pmg/tensor_basis.hpp"

namespace pmg {

namespace {

// Index of cell vertex with the given reference bits.
int corner(const std::array<int, 8>& cell, int bits) { return cell[bits]; }

using EntityKey = std::array<int, 8>;

// Canonical key for the node at local tensor index `idx` of a cell.
EntityKey node_key(const MeshLevel& mesh, int cell_id, int degree, const std::array<int, 3>& idx) {
  const int dim = mesh.dim;
  const auto& cell = mesh.cells[cell_id];
  std::array<int, 3> free_axes{};
  int n_free = 0;
  int fixed_bits = 0;
  for (int k = 0; k < dim; ++k) {
    if (idx[k] == 0) continue;
    if (idx[k] == degree) {
      fixed_bits |= 1 << k;
      continue;
    }
    free_axes[n_free++] = k;
  }
  EntityKey key;
  key.fill(-1);
  key[0] = n_free;
  if (n_free == dim && dim == 3) {
    key[1] = cell_id;
    key[2] = idx[0];
    key[3] = idx[1];
    key[4] = idx[2];
    return key;
  }
  if (n_free == dim) {
    key[1] = cell_id;
    for (int k = 0; k < dim; ++k) key[2 + k] = idx[k];
    return key;
  }
  auto vertex_at = [&](int local_bits) {
    int bits = fixed_bits;
    for (int f = 0; f < n_free; ++f)
      if ((local_bits >> f) & 1) bits |= 1 << free_axes[f];
    return corner(cell, bits);
  };
  if (n_free == 0) {
    key[1] = vertex_at(0);
    return key;
  }
  if (n_free == 1) {
    const int a = vertex_at(0), b = vertex_at(1);
    const int t = idx[free_axes[0]];
    key[1] = std::min(a, b);
    key[2] = std::max(a, b);
    key[3] = a < b ? t : degree - t;
    return key;
  }
  // Quadrilateral face: pick the symmetry with the lexicographically
  // smallest corner tuple.
  const std::array<int, 4> c{vertex_at(0), vertex_at(1), vertex_at(2), vertex_at(3)};
  const int s = idx[free_axes[0]], t = idx[free_axes[1]];
  std::array<int, 6> best{};
  bool first = true;
  for (int sym = 0; sym < 8; ++sym) {
    const bool swap = sym & 1, flip_u = sym & 2, flip_v = sym & 4;
    std::array<int, 4> cc{};
    for (int b = 0; b < 4; ++b) {
      int u = b & 1, v = (b >> 1) & 1;
      if (flip_u) u = 1 - u;
      if (flip_v) v = 1 - v;
      if (swap) std::swap(u, v);
      cc[b] = c[u + 2 * v];
    }
    // Node parameters transform the same way as corner positions.
    int u = s, v = t;
    if (swap) std::swap(u, v);
    if (flip_u) u = degree - u;
    if (flip_v) v = degree - v;
    const std::array<int, 6> cand{cc[0], cc[1], cc[2], cc[3], u, v};
    if (first || cand < best) {
      best = cand;
      first = false;
    }
  }
  for (int k = 0; k < 6; ++k) key[1 + k] = best[k];
  return key;
}

std::array<int, 3> unflatten(int i, int n, int dim) {
  std::array<int, 3> idx{0, 0, 0};
  for (int k = 0; k < dim; ++k) {
    idx[k] = i % n;
    i /= n;
  }
  return idx;
}

}  // namespace

DofMap::DofMap(const MeshLevel& mesh, int degree) : dim_(mesh.dim), degree_(degree) {
  if (degree < 1) throw std::invalid_argument("DofMap: degree must be >= 1");
  n_cells_ = mesh.n_cells();
  dofs_per_cell_ = ipow(degree + 1, dim_);
  if (mesh.structured())
    build_structured(mesh);
  else
    build_topological(mesh);
}

DofMap DofMap::topological(const MeshLevel& mesh, int degree) {
  DofMap m;
  m.dim_ = mesh.dim;
  m.degree_ = degree;
  m.n_cells_ = mesh.n_cells();
  m.dofs_per_cell_ = ipow(degree + 1, mesh.dim);
  m.build_topological(mesh);
  return m;
}

void DofMap::build_structured(const MeshLevel& mesh) {
  const int c = *mesh.cells_per_dir;
  const int p = degree_;
  const int n = p + 1;
  nodes_per_dir_ = c * p + 1;
  n_dofs_ = static_cast<std::size_t>(ipow(nodes_per_dir_, dim_));
  cell_dofs_.resize(static_cast<std::size_t>(n_cells_) * dofs_per_cell_);
  for (int cell = 0; cell < n_cells_; ++cell) {
    const auto g = unflatten(cell, c, dim_);
    for (int i = 0; i < dofs_per_cell_; ++i) {
      const auto l = unflatten(i, n, dim_);
      int idx = 0;
      for (int k = dim_ - 1; k >= 0; --k) idx = idx * nodes_per_dir_ + g[k] * p + l[k];
      cell_dofs_[static_cast<std::size_t>(cell) * dofs_per_cell_ + i] = idx;
    }
  }
  boundary_.assign(n_dofs_, 0);
  for (std::size_t i = 0; i < n_dofs_; ++i) {
    const auto g = unflatten(static_cast<int>(i), nodes_per_dir_, dim_);
    for (int k = 0; k < dim_; ++k)
      if (g[k] == 0 || g[k] == nodes_per_dir_ - 1) boundary_[i] = 1;
  }
}

void DofMap::build_topological(const MeshLevel& mesh) {
  const int p = degree_;
  const int n = p + 1;
  nodes_per_dir_ = 0;
  std::map<EntityKey, int> index;
  cell_dofs_.resize(static_cast<std::size_t>(n_cells_) * dofs_per_cell_);
  for (int cell = 0; cell < n_cells_; ++cell) {
    for (int i = 0; i < dofs_per_cell_; ++i) {
      const auto key = node_key(mesh, cell, p, unflatten(i, n, dim_));
      auto [it, inserted] = index.emplace(key, static_cast<int>(index.size()));
      cell_dofs_[static_cast<std::size_t>(cell) * dofs_per_cell_ + i] = it->second;
    }
  }
  n_dofs_ = index.size();

  // Boundary faces are the (d-1)-dimensional cell faces owned by one cell.
  std::map<std::vector<int>, int> face_count;
  auto face_vertices = [&](int cell, int axis, int side) {
    std::vector<int> verts;
    for (int v = 0; v < mesh.vertices_per_cell(); ++v)
      if (((v >> axis) & 1) == side) verts.push_back(mesh.cells[cell][v]);
    std::sort(verts.begin(), verts.end());
    return verts;
  };
  for (int cell = 0; cell < n_cells_; ++cell)
    for (int axis = 0; axis < dim_; ++axis)
      for (int side = 0; side < 2; ++side) ++face_count[face_vertices(cell, axis, side)];
  boundary_.assign(n_dofs_, 0);
  for (int cell = 0; cell < n_cells_; ++cell) {
    for (int axis = 0; axis < dim_; ++axis) {
      for (int side = 0; side < 2; ++side) {
        if (face_count[face_vertices(cell, axis, side)] != 1) continue;
        for (int i = 0; i < dofs_per_cell_; ++i) {
          const auto l = unflatten(i, n, dim_);
          if (l[axis] == side * p) boundary_[cell_dofs(cell)[i]] = 1;
        }
      }
    }
  }
}

std::vector<Point> DofMap::support_points(const MeshLevel& mesh) const {
  const auto nodes = gauss_lobatto_points(degree_ + 1);
  std::vector<Point> pts(n_dofs_);
  for (int cell = 0; cell < n_cells_; ++cell) {
    const auto dofs = cell_dofs(cell);
    for (int i = 0; i < dofs_per_cell_; ++i) {
      const auto l = unflatten(i, degree_ + 1, dim_);
      Point xi{0.0, 0.0, 0.0};
      for (int k = 0; k < dim_; ++k) xi[k] = nodes[l[k]];
      pts[dofs[i]] = mesh.map(cell, xi);
    }
  }
  return pts;
}

void DofMap::zero_boundary(std::span<double> v) const {
  for (std::size_t i = 0; i < n_dofs_; ++i)
    if (boundary_[i]) v[i] = 0.0;
}

}  // namespace pmg
