#pragma once

// Nested hexahedral/quadrilateral mesh hierarchies on the unit domain,
// random vertex distortion, the Kershaw transformation, and standalone
// single-vertex patches.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "pmg/common.hpp"

namespace pmg {

/// One mesh level. Cells list 2^d vertex indices in tensor order
/// (x fastest), so cell vertex v sits at reference corner (v&1, v>>1&1, v>>2&1).
struct MeshLevel {
  int dim = 2;
  int level = 1;
  std::vector<Point> vertices;
  std::vector<std::array<int, 8>> cells;
  /// Vertices on the domain boundary.
  std::vector<char> boundary_vertex;
  /// Cells per direction for structured levels; absent for standalone patches.
  std::optional<int> cells_per_dir;

  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int vertices_per_cell() const { return 1 << dim; }
  bool structured() const { return cells_per_dir.has_value(); }

  /// Multilinear cell map evaluated at reference point xi.
  Point map(int cell, const Point& xi) const;
  /// Jacobian dx_a/dxi_b of the cell map at xi, row-major d x d in a 3x3 array.
  std::array<double, 9> jacobian(int cell, const Point& xi) const;
};

struct MeshHierarchy {
  std::vector<MeshLevel> levels;
  /// parent_map[l][c]: coarse parent (on level l-1) of cell c on level l. Empty for l = 0.
  std::vector<std::vector<int>> parent_map;
  /// child_position[l][c]: bit k set if the child occupies the upper half of
  /// its parent along axis k.
  std::vector<std::vector<int>> child_position;

  int n_levels() const { return static_cast<int>(levels.size()); }
  const MeshLevel& finest() const { return levels.back(); }
};

struct DistortionSpec {
  double delta = 0.0;
  std::uint64_t seed = 0;
};

enum class PatchKind { cartesian, simplex };

/// Structured hierarchy on [0,1]^d; level l (1-based) has
/// coarse_cells_per_dir * 2^(l-1) cells per direction.
MeshHierarchy build_cartesian_hierarchy(int dim, int n_levels, int coarse_cells_per_dir);

/// Displaces interior vertices by delta * h_v in uniformly random directions,
/// level by level: finer levels re-interpolate inherited vertices from the
/// distorted parent cells and displace only newly created vertices.
/// Throws DegenerateMesh if any cell inverts.
MeshHierarchy distort_hierarchy(const MeshHierarchy& h, const DistortionSpec& spec);

/// Number of coarse cells per direction of Kershaw hierarchies.
inline constexpr int kershaw_coarse_cells = 6;

/// Kershaw-warped structured hierarchy with 6 coarse cells per direction.
/// epsilon = 1 gives the uniform mesh.
MeshHierarchy build_kershaw_hierarchy(int dim, int n_levels, double epsilon);

/// Kershaw map of a point of the unit square/cube.
Point kershaw_map(int dim, double epsilon, const Point& x);

/// A single-level mesh with exactly one interior vertex: 2^d unit cells
/// around (1,..,1), or the reference simplex split into d+1 quads/hexes
/// around its barycenter. The interior vertex is displaced by
/// delta * 2 * (shortest incident edge), i.e. relative to the patch width.
MeshLevel build_standalone_patch(PatchKind kind, int dim, double delta, std::uint64_t seed);

/// Throws DegenerateMesh if det J <= 0 at any 4^d Gauss-Lobatto point of any cell.
void check_cells(const MeshLevel& level);

/// Smallest det J over the 4^d Gauss-Lobatto points of a cell.
double min_jacobian(const MeshLevel& level, int cell);

/// Plain-text dump: vertex lines "x y [z]" followed by cell lines.
void write_mesh(std::ostream& os, const MeshLevel& level);

/// Random unit vector in R^dim, uniform on the sphere (dim 2 or 3).
Point random_direction(int dim, std::mt19937_64& rng);

}  // namespace pmg
