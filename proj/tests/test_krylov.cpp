#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "pmg/krylov.hpp"
#include "support.hpp"

using namespace pmg;
namespace ts = testing_support;

namespace {

LinearOperator dense(const Eigen::MatrixXd& A) {
  return [A](std::span<const double> x, std::span<double> y) {
    Eigen::Map<Eigen::VectorXd>(y.data(), y.size()) = A * ts::to_eigen(x);
  };
}

Eigen::MatrixXd spd(int n, std::uint64_t seed) {
  const auto v = ts::random_vector(static_cast<std::size_t>(n) * n, seed);
  const Eigen::MatrixXd B = Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n);
  return B * B.transpose() + n * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("CG") {
  SUBCASE("identity converges in one iteration") {
    const auto b = ts::random_vector(10, 1);
    const auto res = cg(dense(Eigen::MatrixXd::Identity(10, 10)), {}, b, 1e-8, 100);
    CHECK(res.report.converged);
    CHECK(res.report.iterations == 1);
    CHECK(ts::rel_diff(res.x, b) < 1e-14);
  }
  SUBCASE("exact preconditioner converges in one iteration") {
    const Eigen::MatrixXd A = spd(20, 2);
    const auto res = cg(dense(A), dense(A.inverse()), ts::random_vector(20, 3), 1e-8, 100);
    CHECK(res.report.iterations == 1);
  }
  SUBCASE("diag(1,2)") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    A(0, 0) = 1;
    A(1, 1) = 2;
    const auto res = cg(dense(A), {}, std::vector<double>{1.0, 2.0}, 1e-12, 10);
    CHECK(res.report.iterations <= 2);
    CHECK(res.x[0] == doctest::Approx(1.0));
    CHECK(res.x[1] == doctest::Approx(1.0));
  }
  SUBCASE("report invariants and true residual") {
    const Eigen::MatrixXd A = spd(60, 4);
    const auto b = ts::random_vector(60, 5);
    const auto res = cg(dense(A), {}, b, 1e-10, 200);
    REQUIRE(res.report.converged);
    CHECK(res.report.residual_history.front() == 1.0);
    CHECK(res.report.residual_history.size() == static_cast<std::size_t>(res.report.iterations) + 1);
    const double true_res = (ts::to_eigen(b) - A * ts::to_eigen(res.x)).norm() / ts::to_eigen(b).norm();
    CHECK(std::abs(true_res - res.report.residual_history.back()) < 1e-10);
  }
  SUBCASE("iteration cap sets the sentinel flag") {
    const Eigen::MatrixXd A = spd(60, 6);
    const auto res = cg(dense(A), {}, ts::random_vector(60, 7), 1e-14, 3);
    CHECK_FALSE(res.report.converged);
    CHECK(res.report.sentinel_applied);
    CHECK(res.report.iterations == 3);
  }
  SUBCASE("indefinite operator breaks down") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
    A(1, 1) = -1.0;
    CHECK_THROWS_AS(cg(dense(A), {}, std::vector<double>{1.0, 1.0}, 1e-8, 10), BreakdownError);
  }
  SUBCASE("zero right-hand side") {
    const auto res = cg(dense(spd(5, 1)), {}, std::vector<double>(5, 0.0), 1e-8, 10);
    CHECK(res.report.converged);
    CHECK(res.report.iterations == 0);
    for (double v : res.x) CHECK(v == 0.0);
  }
}

TEST_CASE("GMRES") {
  SUBCASE("identity and exact preconditioner take one iteration") {
    const auto b = ts::random_vector(10, 1);
    CHECK(gmres(dense(Eigen::MatrixXd::Identity(10, 10)), {}, b, 1e-8, 50).report.iterations == 1);
    const Eigen::MatrixXd A = spd(20, 8) + Eigen::MatrixXd(Eigen::MatrixXd::Ones(20, 20).triangularView<Eigen::StrictlyUpper>());
    const auto res = gmres(dense(A), dense(A.inverse()), ts::random_vector(20, 9), 1e-8, 50);
    CHECK(res.report.iterations == 1);
  }
  SUBCASE("non-symmetric 2x2") {
    Eigen::MatrixXd A(2, 2);
    A << 2, 1, 0, 3;
    const auto res = gmres(dense(A), {}, std::vector<double>{3.0, 3.0}, 1e-12, 10);
    CHECK(res.report.converged);
    CHECK(res.report.iterations <= 2);
    CHECK(res.x[0] == doctest::Approx(1.0));
    CHECK(res.x[1] == doctest::Approx(1.0));
  }
  SUBCASE("monotone history and true residual") {
    const Eigen::MatrixXd A = spd(80, 10) + 3.0 * Eigen::MatrixXd(Eigen::MatrixXd::Ones(80, 80).triangularView<Eigen::StrictlyLower>());
    const auto b = ts::random_vector(80, 11);
    const Eigen::MatrixXd J = A.diagonal().cwiseInverse().asDiagonal();
    const auto res = gmres(dense(A), dense(J), b, 1e-10, 80);
    REQUIRE(res.report.converged);
    const auto& h = res.report.residual_history;
    CHECK(h.front() == 1.0);
    CHECK(h.size() == static_cast<std::size_t>(res.report.iterations) + 1);
    for (std::size_t k = 1; k < h.size(); ++k) CHECK(h[k] <= h[k - 1] * (1.0 + 1e-12));
    const double true_res = (ts::to_eigen(b) - A * ts::to_eigen(res.x)).norm() / ts::to_eigen(b).norm();
    CHECK(std::abs(true_res - h.back()) < 1e-10);
  }
  SUBCASE("iteration cap") {
    const Eigen::MatrixXd A = spd(50, 12);
    const auto res = gmres(dense(A), {}, ts::random_vector(50, 13), 1e-14, 4);
    CHECK_FALSE(res.report.converged);
    CHECK(res.report.sentinel_applied);
    CHECK(res.report.iterations == 4);
  }
  SUBCASE("singular operator stagnates") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
    A(0, 0) = 1.0;
    CHECK_THROWS_AS(gmres(dense(A), {}, std::vector<double>{0.0, 1.0, 0.0}, 1e-8, 10), StagnationError);
  }
  SUBCASE("deterministic") {
    const Eigen::MatrixXd A = spd(30, 14);
    const auto b = ts::random_vector(30, 15);
    const auto r1 = gmres(dense(A), {}, b, 1e-8, 30), r2 = gmres(dense(A), {}, b, 1e-8, 30);
    CHECK(r1.x == r2.x);
    CHECK(r1.report.residual_history == r2.report.residual_history);
  }
}
