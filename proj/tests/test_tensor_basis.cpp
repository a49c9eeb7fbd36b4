#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "pmg/kernels.hpp"
#include "pmg/tensor_basis.hpp"
#include "support.hpp"

using namespace pmg;
using testing_support::random_vector;

namespace {

Eigen::MatrixXd to_eigen(const Matrix1D& m) {
  Eigen::MatrixXd e(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
  return e;
}

// Kronecker product with axis 0 fastest: mats[d-1] x ... x mats[0].
Eigen::MatrixXd kron_all(const std::vector<Eigen::MatrixXd>& mats) {
  Eigen::MatrixXd K = mats[0];
  for (std::size_t k = 1; k < mats.size(); ++k) {
    const Eigen::MatrixXd& A = mats[k];
    Eigen::MatrixXd R(A.rows() * K.rows(), A.cols() * K.cols());
    for (int i = 0; i < A.rows(); ++i)
      for (int j = 0; j < A.cols(); ++j) R.block(i * K.rows(), j * K.cols(), K.rows(), K.cols()) = A(i, j) * K;
    K = R;
  }
  return K;
}

}  // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n = 1; n <= 16; ++n) {
    const auto q = gauss_legendre(n);
    for (int k = 0; k < 2 * n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += q.weights[i] * std::pow(q.points[i], k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("Gauss-Lobatto nodes") {
  const auto n2 = gauss_lobatto_points(3);
  CHECK(n2[1] == doctest::Approx(0.5).epsilon(1e-15));
  const auto n3 = gauss_lobatto_points(4);
  CHECK(n3[0] == 0.0);
  CHECK(n3[1] == doctest::Approx((1.0 - 1.0 / std::sqrt(5.0)) / 2.0).epsilon(1e-14));
  CHECK(n3[2] == doctest::Approx((1.0 + 1.0 / std::sqrt(5.0)) / 2.0).epsilon(1e-14));
  CHECK(n3[3] == 1.0);
  // Interior nodes are the roots of P_N'; check against the derivative of
  // the Legendre polynomial for larger N via the Lobatto quadrature exactness.
  for (int N = 2; N <= 16; ++N) {
    const auto x = gauss_lobatto_points(N + 1);
    // Lobatto weights w_i = 2 / (N (N+1) P_N(t_i)^2) on [-1,1] integrate degree 2N-1 exactly.
    auto legendre = [](int n, double t) {
      double p0 = 1.0, p1 = t;
      if (n == 0) return 1.0;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      return p1;
    };
    for (int k = 0; k <= 2 * N - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i <= N; ++i) {
        const double t = 2.0 * x[i] - 1.0;
        const double w = 1.0 / (N * (N + 1) * std::pow(legendre(N, t), 2));
        s += w * std::pow(x[i], k);
      }
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("basis tables satisfy partition of unity and the nodal property") {
  for (int p = 1; p <= 15; ++p) {
    const Basis1D b = make_basis(p);
    const int n = p + 1, q = b.n_quad();
    CHECK(q == p + 1);
    for (int k = 0; k < q; ++k) {
      double sv = 0.0, sg = 0.0;
      for (int i = 0; i < n; ++i) {
        sv += b.values[i * q + k];
        sg += b.gradients[i * q + k];
      }
      CHECK(std::abs(sv - 1.0) < 1e-13);
      CHECK(std::abs(sg) < 1e-11 * p * p);
    }
    for (int i = 0; i < n; ++i) {
      const auto v = lagrange_values(b.nodes, b.nodes[i]);
      for (int j = 0; j < n; ++j) CHECK(v[j] == doctest::Approx(i == j ? 1.0 : 0.0));
    }
  }
  const Basis1D b1 = make_basis(1);
  for (int k = 0; k < 2; ++k) {
    CHECK(b1.values[0 * 2 + k] == doctest::Approx(1.0 - b1.quad_points[k]));
    CHECK(b1.values[1 * 2 + k] == doctest::Approx(b1.quad_points[k]));
  }
  CHECK_THROWS(make_basis(3, 2));
}

TEST_CASE("apply_1d_contraction") {
  SUBCASE("identity leaves the field unchanged") {
    TensorField f = TensorField::uniform(2, 3);
    f.data = random_vector(9, 1);
    Matrix1D I(3, 3);
    for (int i = 0; i < 3; ++i) I(i, i) = 1.0;
    CHECK(apply_1d_contraction(1, I, f).data == f.data);
  }
  SUBCASE("row of ones on both axes sums all entries") {
    TensorField f = TensorField::uniform(2, 4);
    f.data = random_vector(16, 2);
    Matrix1D ones(1, 4);
    for (auto& v : ones.data) v = 1.0;
    const auto s = apply_1d_contraction(1, ones, apply_1d_contraction(0, ones, f));
    double ref = 0.0;
    for (double v : f.data) ref += v;
    REQUIRE(s.size() == 1);
    CHECK(s.data[0] == doctest::Approx(ref).epsilon(1e-14));
  }
  SUBCASE("shape mismatch throws") {
    TensorField f = TensorField::uniform(2, 3);
    CHECK_THROWS_AS(apply_1d_contraction(0, Matrix1D(2, 4), f), ShapeMismatch);
  }
  SUBCASE("matches the dense Kronecker product") {
    std::mt19937_64 rng(3);
    for (int d = 2; d <= 3; ++d)
      for (int n = 2; n <= 5; ++n)
        for (int trial = 0; trial < 100; ++trial) {
          TensorField f = TensorField::uniform(d, n);
          f.data = random_vector(f.size(), rng());
          std::vector<Matrix1D> mats;
          std::vector<Eigen::MatrixXd> dense;
          TensorField g = f;
          for (int k = 0; k < d; ++k) {
            Matrix1D M(n + (k % 2), n);
            M.data = random_vector(M.data.size(), rng());
            g = apply_1d_contraction(k, M, g);
            dense.push_back(to_eigen(M));
          }
          const Eigen::VectorXd ref = kron_all(dense) * testing_support::to_eigen(f.data);
          CHECK(testing_support::rel_diff(g.data, testing_support::to_std(ref)) < 1e-12);
        }
  }
}

TEST_CASE("cell gradients") {
  for (int d = 2; d <= 3; ++d) {
    for (int p = 1; p <= 4; ++p) {
      const Basis1D b = make_basis(p);
      const std::size_t nd = static_cast<std::size_t>(ipow(p + 1, d));
      SUBCASE("constant field has zero gradient") {
        std::vector<double> c(nd, 2.5);
        for (const auto& g : cell_gradients(b, d, c))
          for (double v : g) CHECK(std::abs(v) < 1e-12);
      }
      SUBCASE("linear reproduction") {
        std::vector<double> c(nd);
        for (std::size_t i = 0; i < nd; ++i) c[i] = b.nodes[i % (p + 1)];
        const auto g = cell_gradients(b, d, c);
        for (double v : g[0]) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
        for (double v : g[1]) CHECK(std::abs(v) < 1e-12);
      }
      SUBCASE("matches the dense differentiation matrix") {
        const int q = b.n_quad();
        Eigen::MatrixXd N(q, p + 1), D(q, p + 1);
        for (int k = 0; k < q; ++k)
          for (int i = 0; i <= p; ++i) {
            N(k, i) = testing_support::lagrange(b.nodes, i, b.quad_points[k]);
            D(k, i) = testing_support::lagrange_deriv(b.nodes, i, b.quad_points[k]);
          }
        for (int trial = 0; trial < 100; ++trial) {
          const auto c = random_vector(nd, 100 + trial);
          const auto g = cell_gradients(b, d, c);
          for (int k = 0; k < d; ++k) {
            std::vector<Eigen::MatrixXd> mats;
            for (int a = 0; a < d; ++a) mats.push_back(a == k ? D : N);
            const Eigen::VectorXd ref = kron_all(mats) * testing_support::to_eigen(c);
            CHECK(testing_support::rel_diff(g[k], testing_support::to_std(ref)) < 1e-12);
          }
        }
      }
      SUBCASE("integration is the adjoint of evaluation") {
        const std::size_t nq = static_cast<std::size_t>(ipow(b.n_quad(), d));
        for (int trial = 0; trial < 100; ++trial) {
          const auto u = random_vector(nd, 500 + trial);
          std::vector<std::vector<double>> flux;
          for (int k = 0; k < d; ++k) flux.push_back(random_vector(nq, 900 + 10 * trial + k));
          const auto Iu = cell_integrate_gradients(b, d, flux);
          const auto gu = cell_gradients(b, d, u);
          double lhs = testing_support::dot(Iu, u), rhs = 0.0;
          for (int k = 0; k < d; ++k) rhs += testing_support::dot(flux[k], gu[k]);
          CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
        std::vector<std::vector<double>> zero(d, std::vector<double>(nq, 0.0));
        for (double v : cell_integrate_gradients(b, d, zero)) CHECK(v == 0.0);
      }
    }
  }
}

TEST_CASE("1D integration of a unit flux gives -1, +1") {
  const Basis1D b = make_basis(1);
  std::vector<std::vector<double>> flux{{b.quad_weights[0], b.quad_weights[1]}};
  const auto out = cell_integrate_gradients(b, 1, flux);
  CHECK(out[0] == doctest::Approx(-1.0));
  CHECK(out[1] == doctest::Approx(1.0));
}

TEST_CASE("gradient FLOPs grow like p^(d+1)") {
  for (int d = 2; d <= 3; ++d) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int p = 3; p <= 15; ++p) {
      const Basis1D b = make_basis(p);
      const auto c = random_vector(static_cast<std::size_t>(ipow(p + 1, d)), p);
      kernels::flops::reset();
      (void)cell_gradients(b, d, c);
      const double f = static_cast<double>(kernels::flops::count());
      CHECK(f <= 4.0 * d * (p + 1) * std::pow(p + 1, d));
      const double x = std::log(p), y = std::log(f);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope <= d + 1 + 0.2);
  }
}
