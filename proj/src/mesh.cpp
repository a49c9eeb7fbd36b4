#include "pmg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>

namespace pmg {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (int k = 0; k < 3; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

// J stored row-major with stride 3.
double det(int dim, const std::array<double, 9>& J) {
  if (dim == 1) return J[0];
  if (dim == 2) return J[0] * J[4] - J[1] * J[3];
  return J[0] * (J[4] * J[8] - J[5] * J[7]) - J[1] * (J[3] * J[8] - J[5] * J[6]) +
         J[2] * (J[3] * J[7] - J[4] * J[6]);
}

int structured_vertex(int dim, int n_per_dir, const std::array<int, 3>& g) {
  int idx = 0;
  for (int k = dim - 1; k >= 0; --k) idx = idx * n_per_dir + g[k];
  return idx;
}

MeshLevel structured_level(int dim, int cells, int level, double length) {
  MeshLevel m;
  m.dim = dim;
  m.level = level;
  m.cells_per_dir = cells;
  const int nv = cells + 1;
  const int n_vertices = ipow(nv, dim);
  m.vertices.resize(n_vertices);
  m.boundary_vertex.assign(n_vertices, 0);
  for (int v = 0; v < n_vertices; ++v) {
    int rest = v;
    Point x{0.0, 0.0, 0.0};
    bool boundary = false;
    for (int k = 0; k < dim; ++k) {
      const int g = rest % nv;
      rest /= nv;
      x[k] = length * static_cast<double>(g) / cells;
      boundary = boundary || g == 0 || g == cells;
    }
    m.vertices[v] = x;
    m.boundary_vertex[v] = boundary;
  }
  const int n_cells = ipow(cells, dim);
  m.cells.resize(n_cells);
  for (int c = 0; c < n_cells; ++c) {
    std::array<int, 3> g{0, 0, 0};
    int rest = c;
    for (int k = 0; k < dim; ++k) {
      g[k] = rest % cells;
      rest /= cells;
    }
    std::array<int, 8> verts{};
    for (int v = 0; v < (1 << dim); ++v) {
      std::array<int, 3> gv = g;
      for (int k = 0; k < dim; ++k) gv[k] += (v >> k) & 1;
      verts[v] = structured_vertex(dim, nv, gv);
    }
    m.cells[c] = verts;
  }
  return m;
}

// Shortest edge incident to each vertex.
std::vector<double> min_incident_edge(const MeshLevel& m) {
  std::vector<double> h(m.vertices.size(), std::numeric_limits<double>::infinity());
  for (const auto& cell : m.cells) {
    for (int v = 0; v < m.vertices_per_cell(); ++v) {
      for (int k = 0; k < m.dim; ++k) {
        const int w = v ^ (1 << k);
        if (w < v) continue;
        const double len = distance(m.vertices[cell[v]], m.vertices[cell[w]]);
        h[cell[v]] = std::min(h[cell[v]], len);
        h[cell[w]] = std::min(h[cell[w]], len);
      }
    }
  }
  return h;
}

// Displaces the selected vertices by delta * scale * h_v, with h_v measured
// before any displacement on this level.
void displace(MeshLevel& m, const std::vector<char>& selected, double delta, double scale,
              std::mt19937_64& rng) {
  const auto h = min_incident_edge(m);
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    if (!selected[v]) continue;
    const Point dir = random_direction(m.dim, rng);
    for (int k = 0; k < m.dim; ++k) m.vertices[v][k] += delta * scale * h[v] * dir[k];
  }
}

const std::array<double, 4>& lobatto4() {
  static const std::array<double, 4> pts = [] {
    const double a = 0.5 * (1.0 - 1.0 / std::sqrt(5.0));
    return std::array<double, 4>{0.0, a, 1.0 - a, 1.0};
  }();
  return pts;
}

}  // namespace

Point random_direction(int dim, std::mt19937_64& rng) {
  Point d{0.0, 0.0, 0.0};
  if (dim == 1) {
    d[0] = uniform01(rng) < 0.5 ? -1.0 : 1.0;
  } else if (dim == 2) {
    const double theta = 2.0 * std::numbers::pi * uniform01(rng);
    d[0] = std::cos(theta);
    d[1] = std::sin(theta);
  } else {
    const double z = 2.0 * uniform01(rng) - 1.0;
    const double phi = 2.0 * std::numbers::pi * uniform01(rng);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    d = {r * std::cos(phi), r * std::sin(phi), z};
  }
  return d;
}

Point MeshLevel::map(int cell, const Point& xi) const {
  Point x{0.0, 0.0, 0.0};
  const auto& c = cells[cell];
  for (int v = 0; v < vertices_per_cell(); ++v) {
    double w = 1.0;
    for (int k = 0; k < dim; ++k) w *= ((v >> k) & 1) ? xi[k] : 1.0 - xi[k];
    for (int a = 0; a < dim; ++a) x[a] += w * vertices[c[v]][a];
  }
  return x;
}

std::array<double, 9> MeshLevel::jacobian(int cell, const Point& xi) const {
  std::array<double, 9> J{};
  const auto& c = cells[cell];
  for (int v = 0; v < vertices_per_cell(); ++v) {
    for (int b = 0; b < dim; ++b) {
      double w = 1.0;
      for (int k = 0; k < dim; ++k) {
        const bool upper = (v >> k) & 1;
        if (k == b)
          w *= upper ? 1.0 : -1.0;
        else
          w *= upper ? xi[k] : 1.0 - xi[k];
      }
      for (int a = 0; a < dim; ++a) J[a * 3 + b] += w * vertices[c[v]][a];
    }
  }
  return J;
}

double min_jacobian(const MeshLevel& level, int cell) {
  const auto& pts = lobatto4();
  double lo = std::numeric_limits<double>::infinity();
  const int n = ipow(4, level.dim);
  for (int i = 0; i < n; ++i) {
    Point xi{0.0, 0.0, 0.0};
    int rest = i;
    for (int k = 0; k < level.dim; ++k) {
      xi[k] = pts[rest % 4];
      rest /= 4;
    }
    const auto J = level.jacobian(cell, xi);
    lo = std::min(lo, det(level.dim, J));
  }
  return lo;
}

void check_cells(const MeshLevel& level) {
  for (int c = 0; c < level.n_cells(); ++c) {
    if (!(min_jacobian(level, c) > 0.0))
      throw DegenerateMesh("cell " + std::to_string(c) + " on level " + std::to_string(level.level) +
                           " has a non-positive Jacobian determinant");
  }
}

MeshHierarchy build_cartesian_hierarchy(int dim, int n_levels, int coarse_cells_per_dir) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("build_cartesian_hierarchy: dim must be 1..3");
  if (n_levels < 1 || coarse_cells_per_dir < 1)
    throw std::invalid_argument("build_cartesian_hierarchy: need n_levels >= 1 and coarse cells >= 1");
  MeshHierarchy h;
  h.parent_map.resize(n_levels);
  h.child_position.resize(n_levels);
  for (int l = 0; l < n_levels; ++l) {
    const int cells = coarse_cells_per_dir << l;
    h.levels.push_back(structured_level(dim, cells, l + 1, 1.0));
    if (l == 0) continue;
    const int n_cells = ipow(cells, dim);
    auto& parent = h.parent_map[l];
    auto& pos = h.child_position[l];
    parent.resize(n_cells);
    pos.resize(n_cells);
    for (int c = 0; c < n_cells; ++c) {
      int rest = c, pc = 0, stride = 1, bits = 0;
      for (int k = 0; k < dim; ++k) {
        const int g = rest % cells;
        rest /= cells;
        pc += (g / 2) * stride;
        stride *= cells / 2;
        bits |= (g % 2) << k;
      }
      parent[c] = pc;
      pos[c] = bits;
    }
  }
  return h;
}

MeshHierarchy distort_hierarchy(const MeshHierarchy& h, const DistortionSpec& spec) {
  if (spec.delta < 0.0) throw std::invalid_argument("distort_hierarchy: delta must be >= 0");
  MeshHierarchy out = h;
  if (spec.delta == 0.0) return out;
  std::mt19937_64 rng(spec.seed);
  for (int l = 0; l < out.n_levels(); ++l) {
    MeshLevel& m = out.levels[l];
    if (!m.structured()) throw std::invalid_argument("distort_hierarchy: structured levels required");
    const int cells = *m.cells_per_dir;
    const int nv = cells + 1;
    std::vector<char> selected(m.vertices.size(), 0);
    for (int v = 0; v < m.n_vertices(); ++v) {
      int rest = v;
      bool fresh = (l == 0);
      std::array<int, 3> g{0, 0, 0};
      for (int k = 0; k < m.dim; ++k) {
        g[k] = rest % nv;
        rest /= nv;
        fresh = fresh || (g[k] % 2 == 1);
      }
      if (l > 0) {
        // Re-interpolate from the distorted parent cell.
        const MeshLevel& coarse = out.levels[l - 1];
        const int cc = *coarse.cells_per_dir;
        int pc = 0, stride = 1;
        Point xi{0.0, 0.0, 0.0};
        for (int k = 0; k < m.dim; ++k) {
          const int pk = std::min(g[k] / 2, cc - 1);
          pc += pk * stride;
          stride *= cc;
          xi[k] = 0.5 * (g[k] - 2 * pk);
        }
        m.vertices[v] = coarse.map(pc, xi);
      }
      selected[v] = fresh && !m.boundary_vertex[v];
    }
    displace(m, selected, spec.delta, 1.0, rng);
    check_cells(m);
  }
  return out;
}

Point kershaw_map(int dim, double eps, const Point& x) {
  auto right = [](double e, double t) { return t <= 0.5 ? (2.0 - e) * t : 1.0 + e * (t - 1.0); };
  auto left = [&](double e, double t) { return 1.0 - right(e, 1.0 - t); };
  auto step = [](double a, double b, double t) {
    if (t <= 0.0) return a;
    if (t >= 1.0) return b;
    return a + (b - a) * t;
  };
  const int layer = static_cast<int>(x[0] * 6.0);
  const double lambda = (x[0] - layer / 6.0) * 6.0;
  auto warp = [&](double t) {
    switch (layer) {
      case 0:
        return left(eps, t);
      case 1:
      case 4:
        return step(left(eps, t), right(eps, t), lambda);
      case 2:
        return step(right(eps, t), left(eps, t), lambda / 2.0);
      case 3:
        return step(right(eps, t), left(eps, t), (1.0 + lambda) / 2.0);
      default:
        return right(eps, t);
    }
  };
  Point X = x;
  if (dim >= 2) X[1] = warp(x[1]);
  if (dim >= 3) X[2] = warp(x[2]);
  return X;
}

MeshHierarchy build_kershaw_hierarchy(int dim, int n_levels, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("build_kershaw_hierarchy: epsilon must lie in (0,1]");
  MeshHierarchy h = build_cartesian_hierarchy(dim, n_levels, kershaw_coarse_cells);
  for (auto& m : h.levels) {
    for (auto& v : m.vertices) v = kershaw_map(dim, epsilon, v);
    check_cells(m);
  }
  return h;
}

MeshLevel build_standalone_patch(PatchKind kind, int dim, double delta, std::uint64_t seed) {
  if (dim < 2 || dim > 3) throw std::invalid_argument("build_standalone_patch: dim must be 2 or 3");
  MeshLevel m;
  if (kind == PatchKind::cartesian) {
    m = structured_level(dim, 2, 1, 2.0);
  } else {
    m.dim = dim;
    m.level = 1;
    // Vertices keyed by the sorted set of simplex corners they average.
    std::map<std::vector<int>, int> index;
    auto vertex = [&](std::vector<int> corners) {
      std::sort(corners.begin(), corners.end());
      auto it = index.find(corners);
      if (it != index.end()) return it->second;
      Point x{0.0, 0.0, 0.0};
      for (int c : corners)
        if (c > 0) x[c - 1] += 1.0 / static_cast<double>(corners.size());
      const int id = m.n_vertices();
      m.vertices.push_back(x);
      index.emplace(corners, id);
      return id;
    };
    std::vector<int> all(dim + 1);
    for (int i = 0; i <= dim; ++i) all[i] = i;
    const int center = vertex(all);
    for (int i = 0; i <= dim; ++i) {
      std::vector<int> others;
      for (int j = 0; j <= dim; ++j)
        if (j != i) others.push_back(j);
      std::array<int, 8> cell{};
      for (int v = 0; v < (1 << dim); ++v) {
        std::vector<int> corners{i};
        for (int k = 0; k < dim; ++k)
          if ((v >> k) & 1) corners.push_back(others[k]);
        cell[v] = (v == (1 << dim) - 1) ? center : vertex(corners);
      }
      m.cells.push_back(cell);
      if (min_jacobian(m, m.n_cells() - 1) <= 0.0) {
        // Swap the first two reference axes to fix the orientation.
        auto& c = m.cells.back();
        std::array<int, 8> swapped = c;
        for (int v = 0; v < (1 << dim); ++v) {
          const int b0 = v & 1, b1 = (v >> 1) & 1;
          const int w = (v & ~3) | (b0 << 1) | b1;
          swapped[w] = c[v];
        }
        c = swapped;
      }
    }
    m.boundary_vertex.assign(m.vertices.size(), 1);
    m.boundary_vertex[center] = 0;
  }
  if (delta > 0.0) {
    std::mt19937_64 rng(seed);
    std::vector<char> selected(m.vertices.size());
    for (std::size_t v = 0; v < selected.size(); ++v) selected[v] = !m.boundary_vertex[v];
    displace(m, selected, delta, 2.0, rng);
  }
  check_cells(m);
  return m;
}

void write_mesh(std::ostream& os, const MeshLevel& level) {
  for (const auto& v : level.vertices) {
    os << v[0];
    for (int k = 1; k < level.dim; ++k) os << ' ' << v[k];
    os << '\n';
  }
  for (const auto& c : level.cells) {
    for (int v = 0; v < level.vertices_per_cell(); ++v) os << (v ? " " : "") << c[v];
    os << '\n';
  }
}

}  // namespace pmg
