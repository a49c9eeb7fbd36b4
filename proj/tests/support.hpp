#pragma once

// Shared helpers for the tests: random vectors and a naive element-loop
// stiffness assembly that shares no kernel code with the library.

#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pmg/dof_map.hpp"
#include "pmg/mesh.hpp"
#include "pmg/patch.hpp"
#include "pmg/tensor_basis.hpp"

namespace testing_support {

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline double rel_diff(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Lagrange polynomial i on `nodes` and its derivative, by the product rule.
inline double lagrange(const std::vector<double>& nodes, int i, double x) {
  double v = 1.0;
  for (std::size_t j = 0; j < nodes.size(); ++j)
    if (static_cast<int>(j) != i) v *= (x - nodes[j]) / (nodes[i] - nodes[j]);
  return v;
}

inline double lagrange_deriv(const std::vector<double>& nodes, int i, double x) {
  double s = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (static_cast<int>(k) == i) continue;
    double t = 1.0 / (nodes[i] - nodes[k]);
    for (std::size_t j = 0; j < nodes.size(); ++j)
      if (static_cast<int>(j) != i && j != k) t *= (x - nodes[j]) / (nodes[i] - nodes[j]);
    s += t;
  }
  return s;
}

// Jacobian of the multilinear map of `cell` at xi (row-major d x d).
inline Eigen::MatrixXd jacobian(const pmg::MeshLevel& mesh, int cell, const std::array<double, 3>& xi) {
  const int d = mesh.dim;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d, d);
  for (int v = 0; v < (1 << d); ++v) {
    const auto& X = mesh.vertices[mesh.cells[cell][v]];
    for (int b = 0; b < d; ++b) {
      double w = 1.0;
      for (int k = 0; k < d; ++k) {
        const int bit = (v >> k) & 1;
        if (k == b)
          w *= bit ? 1.0 : -1.0;
        else
          w *= bit ? xi[k] : 1.0 - xi[k];
      }
      for (int a = 0; a < d; ++a) J(a, b) += w * X[a];
    }
  }
  return J;
}

// Element stiffness matrix with mu per cell, q = p + 1 Gauss points.
inline Eigen::MatrixXd element_matrix(const pmg::MeshLevel& mesh, int cell, int p, double mu) {
  const int d = mesh.dim;
  const auto nodes = pmg::gauss_lobatto_points(p + 1);
  const auto quad = pmg::gauss_legendre(p + 1);
  const int n = p + 1, q = p + 1;
  int nd = 1, nq = 1;
  for (int k = 0; k < d; ++k) {
    nd *= n;
    nq *= q;
  }
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nd, nd);
  Eigen::MatrixXd G(d, nd);
  for (int iq = 0; iq < nq; ++iq) {
    std::array<double, 3> xi{0, 0, 0};
    double w = 1.0;
    for (int k = 0, r = iq; k < d; ++k, r /= q) {
      xi[k] = quad.points[r % q];
      w *= quad.weights[r % q];
    }
    for (int i = 0; i < nd; ++i) {
      std::array<int, 3> l{0, 0, 0};
      for (int k = 0, r = i; k < d; ++k, r /= n) l[k] = r % n;
      for (int a = 0; a < d; ++a) {
        double g = 1.0;
        for (int k = 0; k < d; ++k)
          g *= (k == a) ? lagrange_deriv(nodes, l[k], xi[k]) : lagrange(nodes, l[k], xi[k]);
        G(a, i) = g;
      }
    }
    const Eigen::MatrixXd J = jacobian(mesh, cell, xi);
    const Eigen::MatrixXd Jinv = J.inverse();
    const Eigen::MatrixXd phys = Jinv.transpose() * G;
    K += mu * w * std::abs(J.determinant()) * phys.transpose() * phys;
  }
  return K;
}

// Global matrix with identity rows and columns for boundary DoFs.
inline Eigen::MatrixXd naive_global_matrix(const pmg::MeshLevel& mesh, const pmg::DofMap& dofs,
                                           const std::vector<double>& mu = {}) {
  const std::size_t N = dofs.n_dofs();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Eigen::MatrixXd K = element_matrix(mesh, c, dofs.degree(), mu.empty() ? 1.0 : mu[c]);
    const auto idx = dofs.cell_dofs(c);
    for (int i = 0; i < K.rows(); ++i)
      for (int j = 0; j < K.cols(); ++j) A(idx[i], idx[j]) += K(i, j);
  }
  for (std::size_t i = 0; i < N; ++i) {
    if (!dofs.is_boundary(i)) continue;
    A.row(i).setZero();
    A.col(i).setZero();
    A(i, i) = 1.0;
  }
  return A;
}

// Sub-matrix on the given index list.
inline Eigen::MatrixXd submatrix(const Eigen::MatrixXd& A, const std::vector<int>& idx) {
  Eigen::MatrixXd S(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) S(i, j) = A(idx[i], idx[j]);
  return S;
}

// Tensor Lagrange basis function `i` of degree p at reference point xi.
inline double tensor_basis(int dim, int p, int i, const std::array<double, 3>& xi) {
  const auto nodes = pmg::gauss_lobatto_points(p + 1);
  double v = 1.0;
  for (int k = 0; k < dim; ++k, i /= (p + 1)) v *= lagrange(nodes, i % (p + 1), xi[k]);
  return v;
}

inline std::array<double, 3> node_xi(int dim, int p, int i) {
  const auto nodes = pmg::gauss_lobatto_points(p + 1);
  std::array<double, 3> xi{0, 0, 0};
  for (int k = 0; k < dim; ++k, i /= (p + 1)) xi[k] = nodes[i % (p + 1)];
  return xi;
}

// Dense embedding between two levels, with boundary rows and columns zero.
inline Eigen::MatrixXd dense_h_embedding(const pmg::MeshHierarchy& h, int fine_level, const pmg::DofMap& coarse,
                                  const pmg::DofMap& fine) {
  const int d = fine.dim(), p = fine.degree();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(fine.n_dofs(), coarse.n_dofs());
  for (int c = 0; c < fine.n_cells(); ++c) {
    const int pc = h.parent_map[fine_level][c];
    const int bits = h.child_position[fine_level][c];
    const auto fidx = fine.cell_dofs(c);
    const auto cidx = coarse.cell_dofs(pc);
    for (int i = 0; i < fine.dofs_per_cell(); ++i) {
      auto xi = node_xi(d, p, i);
      for (int k = 0; k < d; ++k) xi[k] = 0.5 * (xi[k] + ((bits >> k) & 1));
      for (int j = 0; j < coarse.dofs_per_cell(); ++j) P(fidx[i], cidx[j]) = tensor_basis(d, p, j, xi);
    }
  }
  for (std::size_t i = 0; i < fine.n_dofs(); ++i)
    if (fine.is_boundary(i)) P.row(i).setZero();
  for (std::size_t j = 0; j < coarse.n_dofs(); ++j)
    if (coarse.is_boundary(j)) P.col(j).setZero();
  return P;
}

// Dense embedding of the degree-pc patch interior space into degree pf.
inline Eigen::MatrixXd dense_p_embedding(const pmg::PatchSpace& coarse, const pmg::PatchSpace& fine) {
  const int d = fine.dim;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(fine.n_interior, coarse.n_interior);
  for (int c = 0; c < fine.n_cells; ++c) {
    const auto fi = fine.interior_of(c);
    const auto ci = coarse.interior_of(c);
    for (int i = 0; i < fine.dofs_per_cell; ++i) {
      if (fi[i] < 0) continue;
      const auto xi = node_xi(d, fine.degree, i);
      for (int j = 0; j < coarse.dofs_per_cell; ++j)
        if (ci[j] >= 0) P(fi[i], ci[j]) = tensor_basis(d, coarse.degree, j, xi);
    }
  }
  return P;
}

inline Eigen::MatrixXd columns(int rows, int cols, const std::function<void(std::span<const double>, std::span<double>)>& f) {
  Eigen::MatrixXd M(rows, cols);
  std::vector<double> e(cols), y(rows);
  for (int j = 0; j < cols; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    f(e, y);
    for (int i = 0; i < rows; ++i) M(i, j) = y[i];
  }
  return M;
}


}  // namespace testing_support
