#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "bivarfun/dense/norms.hpp"
#include "bivarfun/function.hpp"

namespace bivarfun {

struct TaylorPlan {
  cplx lambda{0.0};
  cplx mu{0.0};
  double theta = 0.0;
  int degree = 0;
  double epsilon = 0x1p-53;
  double bound = 0.0;  // grid bound at the chosen degree
};

inline constexpr int kTaylorMaxDegree = 150;

namespace detail {

// Table of scaled partials at one point, grown on demand.
class TableCache {
public:
  TableCache(const BivariateFunction& f, cplx x, cplx y) : f_(&f), x_(x), y_(y) {}

  const TaylorTable& at_least(int order) {
    if (t_.order < order) {
      int want = std::max(16, t_.order < 0 ? 16 : 2 * t_.order);
      while (want < order) want *= 2;
      want = std::min(want, f_->max_order());
      t_ = f_->taylor(x_, y_, std::max(want, order));
    }
    return t_;
  }

  // sum_{i+j=k} |t(i,j)|
  double antidiagonal(int k) {
    const TaylorTable& t = at_least(k);
    double s = 0.0;
    for (int i = 0; i <= k; ++i) s += std::abs(t(i, k - i));
    return s;
  }

private:
  const BivariateFunction* f_;
  cplx x_, y_;
  TaylorTable t_;
};

inline std::vector<cplx> distinct_diag(const ComplexMatrix& T) {
  std::vector<cplx> d;
  for (std::size_t i = 0; i < T.rows(); ++i)
    if (std::find(d.begin(), d.end(), T(i, i)) == d.end()) d.push_back(T(i, i));
  return d;
}

inline ComplexMatrix shifted(const ComplexMatrix& T, cplx s) {
  ComplexMatrix N = T;
  for (std::size_t i = 0; i < N.rows(); ++i) N(i, i) -= s;
  return N;
}

// p(N) = sum_j c[j] N^j by Horner.
template <class Coef>
ComplexMatrix horner(const ComplexMatrix& N, int deg, Coef c) {
  const std::size_t n = N.rows();
  ComplexMatrix P = c(deg) * identity(n);
  for (int j = deg - 1; j >= 0; --j) {
    P = matmul(N, P);
    for (std::size_t i = 0; i < n; ++i) P(i, i) += c(j);
  }
  return P;
}

}  // namespace detail

/// theta^{k+1} ||C|| max over the grid of sum_{i+j=k+1} |f^{(i,j)}| / (i! j!).
inline double taylor_remainder_bound(const BivariateFunction& f, const TaylorPlan& plan,
                                     const std::vector<std::pair<cplx, cplx>>& grid, double normC) {
  if (plan.theta == 0.0 || normC == 0.0) return 0.0;
  const int k1 = plan.degree + 1;
  double worst = 0.0;
  auto visit = [&](cplx x, cplx y) {
    const TaylorTable t = f.taylor(x, y, k1);
    double s = 0.0;
    for (int i = 0; i <= k1; ++i) s += std::abs(t(i, k1 - i));
    worst = std::max(worst, s);
  };
  if (grid.empty()) visit(plan.lambda, plan.mu);
  for (const auto& [x, y] : grid) visit(x, y);
  return std::pow(plan.theta, k1) * normC * worst;
}

/// Chooses the truncation degree for the expansion of f{A,B}(C) around the trace means.
inline TaylorPlan taylor_plan(const BivariateFunction& f, const ComplexMatrix& A, const ComplexMatrix& B,
                              double normC, double epsilon, int k_max = kTaylorMaxDegree) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ArgumentError("fun2_atom_taylor: epsilon must lie in (0, 1)");
  const std::size_t m = A.rows(), n = B.rows();
  TaylorPlan p;
  p.epsilon = epsilon;
  cplx ta = 0.0, tb = 0.0;
  for (std::size_t i = 0; i < m; ++i) ta += A(i, i);
  for (std::size_t i = 0; i < n; ++i) tb += B(i, i);
  p.lambda = ta / static_cast<double>(m);
  p.mu = tb / static_cast<double>(n);
  // power iteration converges from below; inflate slightly so the bound stays a bound
  p.theta = 1.01 * std::max(spectral_norm(detail::shifted(A, p.lambda)), spectral_norm(detail::shifted(B, p.mu)));
  if (p.theta == 0.0 || normC == 0.0) return p;

  if (!f.has_derivatives())
    throw DerivativeRequiredError("function '" + f.name() + "' provides no partial derivatives");
  const int k_lim = std::min(k_max, f.max_order() - 1);
  detail::TableCache center(f, p.lambda, p.mu);
  std::vector<detail::TableCache> grid;
  for (cplx x : detail::distinct_diag(A))
    for (cplx y : detail::distinct_diag(B)) grid.emplace_back(f, x, y);

  double last = std::numeric_limits<double>::infinity();
  double tk = p.theta;  // theta^{k+1}
  for (int k = 0; k <= k_lim; ++k, tk *= p.theta) {
    const double cb = tk * normC * center.antidiagonal(k + 1);
    last = cb;
    if (!(cb <= epsilon)) continue;
    double gb = 0.0;
    for (auto& g : grid) gb = std::max(gb, tk * normC * g.antidiagonal(k + 1));
    last = gb;
    if (gb <= epsilon) {
      p.degree = k;
      p.bound = gb;
      return p;
    }
  }
  throw ConvergenceError("fun2_atom_taylor: no degree <= " + std::to_string(k_lim) +
                             " meets the tolerance (eigenvalues not clustered enough)",
                         last);
}

/// Truncated bivariate Taylor expansion of f{A,B}(C) for upper-triangular A, B
/// with clustered spectra, evaluated by the two-level Horner scheme.
inline ComplexMatrix fun2_atom_taylor(const BivariateFunction& f, const ComplexMatrix& A, const ComplexMatrix& B,
                                      const ComplexMatrix& C, double epsilon, TaylorPlan* plan_out = nullptr,
                                      int k_max = kTaylorMaxDegree) {
  const std::size_t m = A.rows(), n = B.rows();
  if (A.cols() != m || B.cols() != n || C.rows() != m || C.cols() != n)
    throw ArgumentError("fun2_atom_taylor: dimension mismatch");
  if (m == 0 || n == 0) return zeros(m, n);
  const TaylorPlan p = taylor_plan(f, A, B, spectral_norm(C), epsilon, k_max);
  if (plan_out) *plan_out = p;
  const int k = p.degree;
  if (k == 0) return f(p.lambda, p.mu) * C;

  const TaylorTable t = f.taylor(p.lambda, p.mu, k);
  const ComplexMatrix NA = detail::shifted(A, p.lambda);
  const ComplexMatrix NB = detail::shifted(B, p.mu);
  if (n <= m) {
    // sum_i N_A^i C P_i(N_B), P_i(y) = sum_j t(i,j) y^j
    auto P = [&](int i) { return detail::horner(NB, k - i, [&](int j) { return t(i, j); }); };
    ComplexMatrix R = matmul(C, P(k));
    for (int i = k - 1; i >= 0; --i) R = matmul(NA, R) + matmul(C, P(i));
    return R;
  }
  // roles swapped: sum_j Q_j(N_A) C N_B^j
  auto Q = [&](int j) { return detail::horner(NA, k - j, [&](int i) { return t(i, j); }); };
  ComplexMatrix R = matmul(Q(k), C);
  for (int j = k - 1; j >= 0; --j) R = matmul(R, NB) + matmul(Q(j), C);
  return R;
}

}  // namespace bivarfun
