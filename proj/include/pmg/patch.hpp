#pragma once

// Vertex patches: the cells around an interior vertex together with a local
// numbering of their nodes ("closure") and of the nodes strictly inside the
// patch ("interior").

#include <memory>
#include <span>
#include <vector>

#include "pmg/dof_map.hpp"
#include "pmg/mesh.hpp"

namespace pmg {

/// Local node numbering of the cells of one patch at one polynomial degree.
struct PatchSpace {
  int dim = 0;
  int degree = 0;
  int n_cells = 0;
  int dofs_per_cell = 0;
  int n_closure = 0;
  int n_interior = 0;
  /// True for 2^d-cell Cartesian-topology patches: closure and interior are
  /// (2p+1)^d and (2p-1)^d lexicographic grids.
  bool tensor = false;
  /// cell_closure[c * dofs_per_cell + i]: closure index of cell-local node i.
  std::vector<int> cell_closure;
  /// cell_interior[c * dofs_per_cell + i]: interior index or -1.
  std::vector<int> cell_interior;
  /// interior_to_closure[k]: closure index of interior node k.
  std::vector<int> interior_to_closure;

  std::span<const int> closure_of(int cell) const {
    return {cell_closure.data() + static_cast<std::size_t>(cell) * dofs_per_cell,
            static_cast<std::size_t>(dofs_per_cell)};
  }
  std::span<const int> interior_of(int cell) const {
    return {cell_interior.data() + static_cast<std::size_t>(cell) * dofs_per_cell,
            static_cast<std::size_t>(dofs_per_cell)};
  }
};

/// Shared numbering of the 2^d-cell tensor patch; cells are ordered
/// lexicographically by their position in the patch.
std::shared_ptr<const PatchSpace> tensor_patch_space(int dim, int degree);

/// Numbering of an arbitrary set of cells: closure = all nodes of the cells,
/// interior = nodes not on the boundary of their union.
std::shared_ptr<const PatchSpace> general_patch_space(const MeshLevel& mesh, std::span<const int> cells,
                                                      int degree);

struct VertexPatch {
  int center_vertex = -1;
  std::vector<int> cells;
  /// Global DoFs of interior nodes, in the local interior order.
  std::vector<int> interior_dofs;
  /// Global DoFs of closure nodes, in the local closure order.
  std::vector<int> closure_dofs;
  /// Local numbering at the DofMap's degree.
  std::shared_ptr<const PatchSpace> space;
  bool tensor() const { return space && space->tensor; }
};

/// Degrees of the local p-multigrid levels: 1, 3, 7, ... (p_{k+1} = 2 p_k + 1)
/// while below p, then p itself.
std::vector<int> degree_sequence(int p);

/// One patch per interior vertex. Structured levels are ordered
/// lexicographically by vertex grid position (x fastest); other meshes by
/// vertex index.
std::vector<VertexPatch> collect_vertex_patches(const MeshLevel& mesh, const DofMap& dofs);

}  // namespace pmg
