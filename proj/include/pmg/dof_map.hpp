#pragma once

#include <span>
#include <vector>

#include "pmg/common.hpp"
#include "pmg/mesh.hpp"

namespace pmg {

/// Continuous degree-p Lagrange numbering of a mesh level.
///
/// Structured levels use the global tensor-lexicographic node grid, so a
/// level with c cells per direction has (c p + 1)^d DoFs. Other meshes are
/// numbered by matching shared vertices, edges and faces topologically.
class DofMap {
 public:
  DofMap() = default;
  DofMap(const MeshLevel& mesh, int degree);

  /// Forces the topological numbering, also for structured meshes.
  static DofMap topological(const MeshLevel& mesh, int degree);

  int degree() const { return degree_; }
  int dim() const { return dim_; }
  std::size_t n_dofs() const { return n_dofs_; }
  int dofs_per_cell() const { return dofs_per_cell_; }
  int n_cells() const { return n_cells_; }
  bool structured() const { return nodes_per_dir_ > 0; }
  /// (c p + 1) for structured maps, 0 otherwise.
  int nodes_per_dir() const { return nodes_per_dir_; }

  /// Global indices of the cell's (p+1)^d nodes, lexicographic in the cell.
  std::span<const int> cell_dofs(int cell) const {
    return {cell_dofs_.data() + static_cast<std::size_t>(cell) * dofs_per_cell_,
            static_cast<std::size_t>(dofs_per_cell_)};
  }
  /// 1 for DoFs on the domain boundary.
  const std::vector<char>& boundary_mask() const { return boundary_; }
  bool is_boundary(std::size_t i) const { return boundary_[i] != 0; }

  /// Physical location of every node.
  std::vector<Point> support_points(const MeshLevel& mesh) const;

  /// Nodal interpolant of f.
  template <class F>
  std::vector<double> interpolate(const MeshLevel& mesh, F&& f) const {
    const auto pts = support_points(mesh);
    std::vector<double> v(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) v[i] = f(pts[i]);
    return v;
  }

  /// Zeroes the entries on the domain boundary.
  void zero_boundary(std::span<double> v) const;

 private:
  void build_structured(const MeshLevel& mesh);
  void build_topological(const MeshLevel& mesh);

  int dim_ = 0;
  int degree_ = 0;
  int n_cells_ = 0;
  int dofs_per_cell_ = 0;
  int nodes_per_dir_ = 0;
  std::size_t n_dofs_ = 0;
  std::vector<int> cell_dofs_;
  std::vector<char> boundary_;
};

}  // namespace pmg
