#include "pmg/tensor_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pmg/kernels.hpp"

namespace pmg {

namespace {

// Legendre polynomial P_n and its derivative at x in [-1,1].
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

Quadrature1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  Quadrature1D q;
  q.points.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [p, dp] = legendre(n, x);
    (void)p;
    // Map from [-1,1] to [0,1]; x decreases with i so mirror the index.
    q.points[n - 1 - i] = 0.5 * (1.0 + x);
    q.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

std::vector<double> gauss_lobatto_points(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto_points: need at least two points");
  const int N = n - 1;
  std::vector<double> x(n), x_old(n, 2.0), P(static_cast<std::size_t>(n) * (N + 1));
  for (int i = 0; i < n; ++i) x[i] = std::cos(std::numbers::pi * i / N);
  for (int it = 0; it < 200; ++it) {
    double change = 0.0;
    for (int i = 0; i < n; ++i) change = std::max(change, std::abs(x[i] - x_old[i]));
    if (change < 1e-16) break;
    x_old = x;
    for (int i = 0; i < n; ++i) {
      double pkm1 = 1.0, pk = x[i];
      for (int k = 2; k <= N; ++k) {
        const double next = ((2.0 * k - 1.0) * x[i] * pk - (k - 1.0) * pkm1) / k;
        pkm1 = pk;
        pk = next;
      }
      // Newton step for (1-x^2) P_N'(x) expressed through P_N and P_{N-1}.
      if (N == 1) break;
      x[i] = x_old[i] - (x[i] * pk - pkm1) / ((N + 1) * pk);
    }
    if (N == 1) break;
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = 0.5 * (1.0 - x[i]);
  out.front() = 0.0;
  out.back() = 1.0;
  // Symmetrize to remove rounding asymmetry.
  for (int i = 0; i < n / 2; ++i) {
    const double a = 0.5 * (out[i] + (1.0 - out[n - 1 - i]));
    out[i] = a;
    out[n - 1 - i] = 1.0 - a;
  }
  if (n % 2 == 1) out[n / 2] = 0.5;
  return out;
}

std::vector<double> lagrange_values(std::span<const double> nodes, double x) {
  const std::size_t n = nodes.size();
  std::vector<double> v(n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) v[i] *= (x - nodes[j]) / (nodes[i] - nodes[j]);
  return v;
}

std::vector<double> lagrange_derivatives(std::span<const double> nodes, double x) {
  const std::size_t n = nodes.size();
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      double term = 1.0 / (nodes[i] - nodes[k]);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && j != k) term *= (x - nodes[j]) / (nodes[i] - nodes[j]);
      d[i] += term;
    }
  }
  return d;
}

Matrix1D Matrix1D::transpose() const {
  Matrix1D t(cols, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Basis1D make_basis(int degree, int n_quad) {
  if (degree < 1) throw std::invalid_argument("make_basis: degree must be >= 1");
  if (n_quad == 0) n_quad = degree + 1;
  if (n_quad < degree + 1) throw std::invalid_argument("make_basis: need q >= p + 1");

  Basis1D b;
  b.degree = degree;
  b.nodes = gauss_lobatto_points(degree + 1);
  auto quad = gauss_legendre(n_quad);
  b.quad_points = std::move(quad.points);
  b.quad_weights = std::move(quad.weights);

  const int n = degree + 1;
  const int q = n_quad;
  b.values.assign(static_cast<std::size_t>(n) * q, 0.0);
  b.gradients.assign(static_cast<std::size_t>(n) * q, 0.0);
  b.shape = Matrix1D(q, n);
  for (int k = 0; k < q; ++k) {
    const auto v = lagrange_values(b.nodes, b.quad_points[k]);
    const auto g = lagrange_derivatives(b.nodes, b.quad_points[k]);
    for (int i = 0; i < n; ++i) {
      b.values[static_cast<std::size_t>(i) * q + k] = v[i];
      b.gradients[static_cast<std::size_t>(i) * q + k] = g[i];
      b.shape(k, i) = v[i];
    }
  }
  b.shape_t = b.shape.transpose();

  b.colloc_deriv = Matrix1D(q, q);
  for (int k = 0; k < q; ++k) {
    const auto g = lagrange_derivatives(b.quad_points, b.quad_points[k]);
    for (int l = 0; l < q; ++l) b.colloc_deriv(k, l) = g[l];
  }
  b.colloc_deriv_t = b.colloc_deriv.transpose();
  return b;
}

TensorField::TensorField(int d, std::array<int, 3> ext) : dim(d), extents(ext) {
  if (d < 1 || d > 3) throw ShapeMismatch("TensorField: dimension must be 1, 2 or 3");
  for (int k = d; k < 3; ++k) extents[k] = 1;
  data.assign(size(), 0.0);
}

std::size_t TensorField::size() const {
  std::size_t s = 1;
  for (int k = 0; k < dim; ++k) s *= static_cast<std::size_t>(extents[k]);
  return s;
}

void contract_axis(int mode, const Matrix1D& matrix, std::span<const int> extents,
                   std::span<const double> in, std::span<double> out, bool accumulate) {
  std::size_t pre = 1, post = 1;
  for (int k = 0; k < mode; ++k) pre *= static_cast<std::size_t>(extents[k]);
  for (std::size_t k = mode + 1; k < extents.size(); ++k) post *= static_cast<std::size_t>(extents[k]);
  if (extents[mode] != matrix.cols) throw ShapeMismatch("contract_axis: extent does not match matrix");
  if (in.size() < pre * post * matrix.cols || out.size() < pre * post * matrix.rows)
    throw ShapeMismatch("contract_axis: buffer too small");
  kernels::contract(matrix.data.data(), matrix.rows, matrix.cols, in.data(), out.data(), pre, post,
                    accumulate);
}

TensorField apply_1d_contraction(int mode, const Matrix1D& matrix, const TensorField& field) {
  if (mode < 0 || mode >= field.dim) throw ShapeMismatch("apply_1d_contraction: invalid mode");
  if (field.extents[mode] != matrix.cols)
    throw ShapeMismatch("apply_1d_contraction: extent " + std::to_string(field.extents[mode]) +
                        " does not match matrix with " + std::to_string(matrix.cols) + " columns");
  auto ext = field.extents;
  ext[mode] = matrix.rows;
  TensorField out(field.dim, ext);
  contract_axis(mode, matrix, std::span<const int>(field.extents.data(), field.dim), field.data,
                out.data);
  return out;
}

void apply_tensor_product(int dim, const std::array<const Matrix1D*, 3>& mats, std::span<const double> in,
                          std::span<double> out) {
  thread_local std::vector<double> buf0, buf1;
  std::array<int, 3> ext{1, 1, 1};
  std::size_t biggest = 1;
  for (int k = 0; k < dim; ++k) ext[k] = mats[k]->cols;
  {
    // Largest intermediate size over the sweep.
    auto e = ext;
    for (int k = 0; k < dim; ++k) {
      e[k] = mats[k]->rows;
      std::size_t s = 1;
      for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(e[a]);
      biggest = std::max(biggest, s);
    }
  }
  if (buf0.size() < biggest) {
    buf0.resize(biggest);
    buf1.resize(biggest);
  }
  std::span<const double> src = in;
  for (int k = 0; k < dim; ++k) {
    const bool last = k == dim - 1;
    std::span<double> dst = last ? out : (k % 2 == 0 ? std::span<double>(buf0) : std::span<double>(buf1));
    contract_axis(k, *mats[k], std::span<const int>(ext.data(), dim), src, dst);
    ext[k] = mats[k]->rows;
    src = dst;
  }
}

SumFactorization::SumFactorization(int dim) : dim_(dim) {
  if (dim < 1 || dim > 3) throw ShapeMismatch("SumFactorization: dimension must be 1, 2 or 3");
}

void SumFactorization::reserve(const Basis1D& basis) {
  n_q_ = static_cast<std::size_t>(ipow(basis.n_quad(), dim_));
  const std::size_t big = static_cast<std::size_t>(ipow(std::max(basis.n_nodes(), basis.n_quad()), dim_));
  for (int k = 0; k < dim_; ++k)
    if (grad_[k].size() < n_q_) grad_[k].resize(n_q_);
  if (tmp0_.size() < big) {
    tmp0_.resize(big);
    tmp1_.resize(big);
  }
  if (values_.size() < n_q_) values_.resize(n_q_);
}

void SumFactorization::evaluate_gradients(const Basis1D& basis, std::span<const double> coeffs) {
  reserve(basis);
  const int n = basis.n_nodes();
  const int q = basis.n_quad();
  std::array<int, 3> ext{n, n, n};
  std::span<const double> in = coeffs;
  for (int k = 0; k < dim_; ++k) {
    std::span<double> dst = (k == dim_ - 1) ? std::span<double>(values_)
                                            : (k % 2 == 0 ? std::span<double>(tmp0_) : std::span<double>(tmp1_));
    contract_axis(k, basis.shape, std::span<const int>(ext.data(), dim_), in, dst);
    ext[k] = q;
    in = dst;
  }
  for (int k = 0; k < dim_; ++k)
    contract_axis(k, basis.colloc_deriv, std::span<const int>(ext.data(), dim_), values_, grad_[k]);
}

void SumFactorization::integrate_gradients(const Basis1D& basis, std::span<double> out, bool accumulate) {
  reserve(basis);
  const int n = basis.n_nodes();
  const int q = basis.n_quad();
  std::array<int, 3> ext{q, q, q};
  for (int k = 0; k < dim_; ++k)
    contract_axis(k, basis.colloc_deriv_t, std::span<const int>(ext.data(), dim_), grad_[k], values_, k > 0);
  std::span<const double> in(values_);
  for (int k = 0; k < dim_; ++k) {
    const bool last = (k == dim_ - 1);
    std::span<double> dst = last ? out : (k % 2 == 0 ? std::span<double>(tmp0_) : std::span<double>(tmp1_));
    contract_axis(k, basis.shape_t, std::span<const int>(ext.data(), dim_), in, dst, last && accumulate);
    ext[k] = n;
    in = dst;
  }
}

std::vector<std::vector<double>> cell_gradients(const Basis1D& basis, int dim,
                                                std::span<const double> coeffs) {
  if (coeffs.size() != static_cast<std::size_t>(ipow(basis.n_nodes(), dim)))
    throw ShapeMismatch("cell_gradients: coefficient count does not match (p+1)^d");
  SumFactorization sf(dim);
  sf.evaluate_gradients(basis, coeffs);
  std::vector<std::vector<double>> out(dim);
  for (int k = 0; k < dim; ++k) out[k].assign(sf.gradient(k).begin(), sf.gradient(k).end());
  return out;
}

std::vector<double> cell_integrate_gradients(const Basis1D& basis, int dim,
                                             std::span<const std::vector<double>> fluxes) {
  SumFactorization sf(dim);
  const std::size_t n_q = static_cast<std::size_t>(ipow(basis.n_quad(), dim));
  if (static_cast<int>(fluxes.size()) != dim) throw ShapeMismatch("cell_integrate_gradients: need d fluxes");
  for (int k = 0; k < dim; ++k) {
    if (fluxes[k].size() != n_q) throw ShapeMismatch("cell_integrate_gradients: flux size does not match q^d");
  }
  std::vector<double> out(static_cast<std::size_t>(ipow(basis.n_nodes(), dim)));
  sf.evaluate_gradients(basis, out);  // sizes the buffers
  for (int k = 0; k < dim; ++k) std::copy(fluxes[k].begin(), fluxes[k].end(), sf.gradient(k).begin());
  sf.integrate_gradients(basis, out, false);
  return out;
}

}  // namespace pmg
