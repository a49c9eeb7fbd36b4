#include "pmg/patch.hpp"

#include <map>
#include <mutex>

namespace pmg {

namespace {

std::array<int, 3> unflatten(int i, int n, int dim) {
  std::array<int, 3> idx{0, 0, 0};
  for (int k = 0; k < dim; ++k) {
    idx[k] = i % n;
    i /= n;
  }
  return idx;
}

std::shared_ptr<PatchSpace> build_tensor_space(int dim, int degree) {
  auto s = std::make_shared<PatchSpace>();
  const int p = degree;
  const int n = p + 1;
  const int closure_n = 2 * p + 1;
  const int interior_n = 2 * p - 1;
  s->dim = dim;
  s->degree = p;
  s->n_cells = 1 << dim;
  s->dofs_per_cell = ipow(n, dim);
  s->n_closure = ipow(closure_n, dim);
  s->n_interior = ipow(interior_n, dim);
  s->tensor = true;
  s->cell_closure.resize(static_cast<std::size_t>(s->n_cells) * s->dofs_per_cell);
  s->cell_interior.resize(s->cell_closure.size());
  for (int c = 0; c < s->n_cells; ++c) {
    for (int i = 0; i < s->dofs_per_cell; ++i) {
      const auto l = unflatten(i, n, dim);
      int closure = 0, interior = 0;
      bool inside = true;
      for (int k = dim - 1; k >= 0; --k) {
        const int X = ((c >> k) & 1) * p + l[k];
        closure = closure * closure_n + X;
        interior = interior * interior_n + (X - 1);
        inside = inside && X > 0 && X < 2 * p;
      }
      s->cell_closure[static_cast<std::size_t>(c) * s->dofs_per_cell + i] = closure;
      s->cell_interior[static_cast<std::size_t>(c) * s->dofs_per_cell + i] = inside ? interior : -1;
    }
  }
  s->interior_to_closure.resize(s->n_interior);
  for (int k = 0; k < s->n_interior; ++k) {
    const auto g = unflatten(k, interior_n, dim);
    int closure = 0;
    for (int a = dim - 1; a >= 0; --a) closure = closure * closure_n + g[a] + 1;
    s->interior_to_closure[k] = closure;
  }
  return s;
}

}  // namespace

std::vector<int> degree_sequence(int p) {
  if (p < 1) throw std::invalid_argument("degree_sequence: degree must be >= 1");
  std::vector<int> seq{1};
  while (2 * seq.back() + 1 < p) seq.push_back(2 * seq.back() + 1);
  if (seq.back() != p) seq.push_back(p);
  return seq;
}

std::shared_ptr<const PatchSpace> tensor_patch_space(int dim, int degree) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const PatchSpace>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{dim, degree}];
  if (!slot) slot = build_tensor_space(dim, degree);
  return slot;
}

std::shared_ptr<const PatchSpace> general_patch_space(const MeshLevel& mesh, std::span<const int> cells,
                                                      int degree) {
  MeshLevel sub;
  sub.dim = mesh.dim;
  sub.level = mesh.level;
  sub.vertices = mesh.vertices;
  for (int c : cells) sub.cells.push_back(mesh.cells[c]);
  const DofMap local = DofMap::topological(sub, degree);

  auto s = std::make_shared<PatchSpace>();
  s->dim = mesh.dim;
  s->degree = degree;
  s->n_cells = static_cast<int>(cells.size());
  s->dofs_per_cell = local.dofs_per_cell();
  s->n_closure = static_cast<int>(local.n_dofs());
  std::vector<int> interior_index(local.n_dofs(), -1);
  for (std::size_t i = 0; i < local.n_dofs(); ++i) {
    if (local.is_boundary(i)) continue;
    interior_index[i] = static_cast<int>(s->interior_to_closure.size());
    s->interior_to_closure.push_back(static_cast<int>(i));
  }
  s->n_interior = static_cast<int>(s->interior_to_closure.size());
  for (int c = 0; c < s->n_cells; ++c) {
    for (int dof : local.cell_dofs(c)) {
      s->cell_closure.push_back(dof);
      s->cell_interior.push_back(interior_index[dof]);
    }
  }
  return s;
}

std::vector<VertexPatch> collect_vertex_patches(const MeshLevel& mesh, const DofMap& dofs) {
  std::vector<VertexPatch> patches;
  const int dim = mesh.dim;
  if (mesh.structured() && dofs.structured()) {
    const int c = *mesh.cells_per_dir;
    const int p = dofs.degree();
    const int N = dofs.nodes_per_dir();
    auto space = tensor_patch_space(dim, p);
    const int closure_n = 2 * p + 1;
    const int n_inner = ipow(c - 1, dim);
    patches.reserve(n_inner);
    for (int v = 0; v < n_inner; ++v) {
      auto g = unflatten(v, c - 1, dim);
      for (int k = 0; k < dim; ++k) g[k] += 1;
      VertexPatch patch;
      int vid = 0;
      for (int k = dim - 1; k >= 0; --k) vid = vid * (c + 1) + g[k];
      patch.center_vertex = vid;
      for (int bits = 0; bits < (1 << dim); ++bits) {
        int cell = 0;
        for (int k = dim - 1; k >= 0; --k) cell = cell * c + g[k] - 1 + ((bits >> k) & 1);
        patch.cells.push_back(cell);
      }
      patch.closure_dofs.resize(space->n_closure);
      for (int i = 0; i < space->n_closure; ++i) {
        const auto l = unflatten(i, closure_n, dim);
        int idx = 0;
        for (int k = dim - 1; k >= 0; --k) idx = idx * N + (g[k] - 1) * p + l[k];
        patch.closure_dofs[i] = idx;
      }
      patch.interior_dofs.resize(space->n_interior);
      for (int k = 0; k < space->n_interior; ++k)
        patch.interior_dofs[k] = patch.closure_dofs[space->interior_to_closure[k]];
      patch.space = space;
      patches.push_back(std::move(patch));
    }
    return patches;
  }

  std::vector<std::vector<int>> cells_of_vertex(mesh.vertices.size());
  for (int cell = 0; cell < mesh.n_cells(); ++cell)
    for (int v = 0; v < mesh.vertices_per_cell(); ++v) cells_of_vertex[mesh.cells[cell][v]].push_back(cell);
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    if (mesh.boundary_vertex[v] || cells_of_vertex[v].empty()) continue;
    VertexPatch patch;
    patch.center_vertex = v;
    patch.cells = cells_of_vertex[v];
    patch.space = general_patch_space(mesh, patch.cells, dofs.degree());
    const auto& s = *patch.space;
    patch.closure_dofs.assign(s.n_closure, -1);
    for (int c = 0; c < s.n_cells; ++c) {
      const auto global = dofs.cell_dofs(patch.cells[c]);
      const auto local = s.closure_of(c);
      for (int i = 0; i < s.dofs_per_cell; ++i) patch.closure_dofs[local[i]] = global[i];
    }
    patch.interior_dofs.resize(s.n_interior);
    for (int k = 0; k < s.n_interior; ++k) patch.interior_dofs[k] = patch.closure_dofs[s.interior_to_closure[k]];
    patches.push_back(std::move(patch));
  }
  return patches;
}

}  // namespace pmg
