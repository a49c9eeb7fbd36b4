#pragma once

// One-dimensional nodal basis data and the sum-factorized tensor kernels
// built on top of it. All tensors are lexicographic with x fastest.

#include <array>
#include <span>
#include <vector>

#include "pmg/common.hpp"

namespace pmg {

/// Gauss-Legendre points and weights on [0,1].
struct Quadrature1D {
  std::vector<double> points;
  std::vector<double> weights;
};

Quadrature1D gauss_legendre(int n_points);

/// The n Gauss-Lobatto points on [0,1] (n >= 2), including both endpoints.
std::vector<double> gauss_lobatto_points(int n_points);

/// Values of the Lagrange polynomials on `nodes` at x.
std::vector<double> lagrange_values(std::span<const double> nodes, double x);
/// First derivatives of the Lagrange polynomials on `nodes` at x.
std::vector<double> lagrange_derivatives(std::span<const double> nodes, double x);

/// Row-major dense matrix used for 1D operators.
struct Matrix1D {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix1D() = default;
  Matrix1D(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
  Matrix1D transpose() const;
};

/// Degree-p Lagrange basis on Gauss-Lobatto nodes with q-point Gauss quadrature.
struct Basis1D {
  int degree = 0;
  std::vector<double> nodes;
  std::vector<double> quad_points;
  std::vector<double> quad_weights;
  /// values[i*q + k] = phi_i(x_k)
  std::vector<double> values;
  /// gradients[i*q + k] = phi_i'(x_k)
  std::vector<double> gradients;

  // Contraction matrices for the collocation form of the kernels.
  Matrix1D shape;           // q x (p+1): nodal values -> quadrature values
  Matrix1D shape_t;         // (p+1) x q
  Matrix1D colloc_deriv;    // q x q: derivative of the quadrature-point interpolant
  Matrix1D colloc_deriv_t;  // q x q

  int n_nodes() const { return degree + 1; }
  int n_quad() const { return static_cast<int>(quad_points.size()); }
};

/// Builds the basis tables. q = 0 selects q = p + 1.
Basis1D make_basis(int degree, int n_quad = 0);

/// Dense lexicographic tensor of rank `dim` (x fastest).
struct TensorField {
  int dim = 0;
  std::array<int, 3> extents{1, 1, 1};
  std::vector<double> data;

  TensorField() = default;
  TensorField(int d, std::array<int, 3> ext);
  static TensorField uniform(int d, int n) { return TensorField(d, {n, d > 1 ? n : 1, d > 2 ? n : 1}); }
  std::size_t size() const;
};

/// Contracts `matrix` (m x n) with axis `mode` of the field; throws
/// ShapeMismatch if the extent along `mode` differs from n.
TensorField apply_1d_contraction(int mode, const Matrix1D& matrix, const TensorField& field);

/// Span version: contracts axis `mode` of a tensor with the given extents.
/// Writes the result to `out` (extent along mode becomes matrix.rows).
void contract_axis(int mode, const Matrix1D& matrix, std::span<const int> extents,
                   std::span<const double> in, std::span<double> out, bool accumulate = false);

/// out = (M_{d-1} x ... x M_0) in for a tensor with extents M_k.cols; the
/// result has extents M_k.rows.
void apply_tensor_product(int dim, const std::array<const Matrix1D*, 3>& mats, std::span<const double> in,
                          std::span<double> out);

/// Reference-coordinate gradients of a degree-p field at the q^d quadrature
/// points: result[k] holds d/dxi_k at every point.
std::vector<std::vector<double>> cell_gradients(const Basis1D& basis, int dim,
                                                std::span<const double> coeffs);

/// Transpose of cell_gradients: out_i = sum_k sum_q flux_k(q) dphi_i/dxi_k(q).
/// Quadrature weights are expected to be folded into the fluxes.
std::vector<double> cell_integrate_gradients(const Basis1D& basis, int dim,
                                             std::span<const std::vector<double>> fluxes);

/// Reusable scratch for the cell kernels above; buffers grow on demand so
/// one instance serves any basis of its dimension. Not thread-safe.
class SumFactorization {
 public:
  explicit SumFactorization(int dim);

  /// Fills gradient(k), k < dim, at the q^d quadrature points.
  void evaluate_gradients(const Basis1D& basis, std::span<const double> coeffs);
  /// Integrates the fluxes stored in gradient(k) against basis gradients.
  void integrate_gradients(const Basis1D& basis, std::span<double> out, bool accumulate);

  std::span<double> gradient(int k) { return {grad_[k].data(), n_q_}; }
  std::size_t n_quad_points() const { return n_q_; }
  int dim() const { return dim_; }

 private:
  void reserve(const Basis1D& basis);

  int dim_;
  std::size_t n_q_ = 0;
  std::array<std::vector<double>, 3> grad_;
  std::vector<double> tmp0_;
  std::vector<double> tmp1_;
  std::vector<double> values_;
};

}  // namespace pmg
