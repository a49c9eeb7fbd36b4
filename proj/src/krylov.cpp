#include "pmg/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pmg {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void apply_or_copy(const LinearOperator& op, std::span<const double> x, std::span<double> y) {
  if (op)
    op(x, y);
  else
    std::copy(x.begin(), x.end(), y.begin());
}

}  // namespace

KrylovResult cg(const LinearOperator& A, const LinearOperator& prec, std::span<const double> b, double rel_tol,
                int max_iter) {
  const std::size_t n = b.size();
  KrylovResult out;
  out.x.assign(n, 0.0);
  auto& rep = out.report;
  rep.residual_history.push_back(1.0);
  const double bnorm = norm(b);
  if (bnorm == 0.0) {
    rep.converged = true;
    return out;
  }
  std::vector<double> r(b.begin(), b.end()), z(n), p(n), Ap(n);
  apply_or_copy(prec, r, z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    A(p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) throw BreakdownError("cg: p^T A p = " + std::to_string(pAp) + " at iteration " + std::to_string(it));
    const double alpha = rz / pAp;
    axpy(alpha, p, out.x);
    axpy(-alpha, Ap, r);
    const double rel = norm(r) / bnorm;
    rep.residual_history.push_back(rel);
    rep.iterations = it;
    if (rel <= rel_tol) {
      rep.converged = true;
      return out;
    }
    apply_or_copy(prec, r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  rep.sentinel_applied = true;
  return out;
}

KrylovResult gmres(const LinearOperator& A, const LinearOperator& prec, std::span<const double> b, double rel_tol,
                   int max_iter) {
  const std::size_t n = b.size();
  KrylovResult out;
  out.x.assign(n, 0.0);
  auto& rep = out.report;
  rep.residual_history.push_back(1.0);
  const double bnorm = norm(b);
  if (bnorm == 0.0) {
    rep.converged = true;
    return out;
  }
  const int m = max_iter;
  std::vector<std::vector<double>> V, Z;
  V.reserve(m + 1);
  Z.reserve(m);
  std::vector<std::vector<double>> H;  // column j has j + 2 entries
  std::vector<double> cs, sn, g{bnorm};
  V.emplace_back(b.begin(), b.end());
  for (double& v : V[0]) v /= bnorm;

  int k = 0;
  bool converged = false;
  for (; k < m;) {
    Z.emplace_back(n);
    apply_or_copy(prec, V[k], Z[k]);
    std::vector<double> w(n);
    A(Z[k], w);
    const double wnorm = norm(w);
    std::vector<double> h(k + 2, 0.0);
    for (int i = 0; i <= k; ++i) {
      h[i] = dot(w, V[i]);
      axpy(-h[i], V[i], w);
    }
    h[k + 1] = norm(w);
    for (int i = 0; i < k; ++i) {
      const double t = cs[i] * h[i] + sn[i] * h[i + 1];
      h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
      h[i] = t;
    }
    const double hkk = h[k], hk1 = h[k + 1];
    const double r = std::hypot(hkk, hk1);
    const double hk1_raw = hk1;
    if (r == 0.0) throw StagnationError("gmres: zero Arnoldi column at iteration " + std::to_string(k + 1));
    cs.push_back(hkk / r);
    sn.push_back(hk1 / r);
    h[k] = r;
    h[k + 1] = 0.0;
    g.push_back(-sn[k] * g[k]);
    g[k] = cs[k] * g[k];
    H.push_back(std::move(h));
    ++k;
    const double rel = std::abs(g[k]) / bnorm;
    rep.residual_history.push_back(rel);
    if (rel <= rel_tol) {
      converged = true;
      break;
    }
    if (hk1_raw <= 1e-14 * wnorm) throw StagnationError("gmres: Arnoldi basis degenerated at iteration " + std::to_string(k));
    V.emplace_back(std::move(w));
    for (double& v : V[k]) v /= hk1_raw;
  }
  // Back substitution for y, then x = Z y.
  std::vector<double> y(k);
  for (int i = k - 1; i >= 0; --i) {
    double s = g[i];
    for (int j = i + 1; j < k; ++j) s -= H[j][i] * y[j];
    y[i] = s / H[i][i];
  }
  for (int j = 0; j < k; ++j) axpy(y[j], Z[j], out.x);
  rep.iterations = k;
  rep.converged = converged;
  rep.sentinel_applied = !converged;
  return out;
}

}  // namespace pmg
