#pragma once

// Preconditioned conjugate gradients and full GMRES on plain vectors.

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace pmg {

/// y = Op(x); x and y have the same length and do not alias.
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  /// ||r_k|| / ||b||, starting with 1 for the zero initial guess.
  std::vector<double> residual_history;
  /// Set when max_iter was reached without convergence.
  bool sentinel_applied = false;
};

/// p^T A p <= 0 in CG.
class BreakdownError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Arnoldi basis lost rank before the tolerance was reached.
class StagnationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KrylovResult {
  std::vector<double> x;
  SolveReport report;
};

/// Preconditioned CG from x = 0. An empty preconditioner means identity.
KrylovResult cg(const LinearOperator& A, const LinearOperator& prec, std::span<const double> b, double rel_tol,
                int max_iter);

/// Right-preconditioned GMRES without restart (modified Gram-Schmidt,
/// Givens rotations) from x = 0. Preconditioned directions are stored, so
/// a preconditioner that varies slightly between calls is tolerated.
KrylovResult gmres(const LinearOperator& A, const LinearOperator& prec, std::span<const double> b, double rel_tol,
                   int max_iter);

}  // namespace pmg
