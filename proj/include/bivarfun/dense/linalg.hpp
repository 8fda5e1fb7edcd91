#pragma once

// Triangular solves, LU with partial pivoting, Householder QR.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bivarfun/matrix.hpp"

namespace bivarfun {

enum class SolveSide { Left, Right };

/// Left: T^{-1} B.  Right: B T^{-1}.  T upper triangular.
inline ComplexMatrix solve_upper(const ComplexMatrix& T, ComplexMatrix B, SolveSide side = SolveSide::Left) {
  const std::size_t n = T.rows();
  if (!T.is_square()) throw ArgumentError("solve_upper: T must be square");
  for (std::size_t i = 0; i < n; ++i)
    if (T(i, i) == 0.0) throw SingularityError("solve_upper: zero diagonal entry at " + std::to_string(i));
  if (side == SolveSide::Left) {
    if (B.rows() != n) throw ArgumentError("solve_upper: dimension mismatch");
    for (std::size_t j = 0; j < B.cols(); ++j) {
      auto x = B.col(j);
      for (std::size_t i = n; i-- > 0;) {
        x[i] /= T(i, i);
        const cplx xi = x[i];
        for (std::size_t r = 0; r < i; ++r) x[r] -= T(r, i) * xi;
      }
    }
  } else {
    if (B.cols() != n) throw ArgumentError("solve_upper: dimension mismatch");
    for (std::size_t j = 0; j < n; ++j) {
      auto x = B.col(j);
      for (std::size_t k = 0; k < j; ++k) {
        const cplx t = T(k, j);
        if (t == 0.0) continue;
        const auto xk = B.col(k);
        for (std::size_t i = 0; i < B.rows(); ++i) x[i] -= xk[i] * t;
      }
      for (auto& v : x) v /= T(j, j);
    }
  }
  return B;
}

inline ComplexMatrix triangular_inverse(const ComplexMatrix& T) { return solve_upper(T, identity(T.rows())); }

struct LU {
  ComplexMatrix lu;
  std::vector<std::size_t> piv;
};

inline LU lu_factor(ComplexMatrix A) {
  if (!A.is_square()) throw ArgumentError("lu_factor: matrix must be square");
  const std::size_t n = A.rows();
  std::vector<std::size_t> piv(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(A(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > best) {
        best = std::abs(A(i, k));
        p = i;
      }
    piv[k] = p;
    if (best == 0.0) throw SingularityError("lu_factor: matrix is singular (column " + std::to_string(k) + ")");
    if (p != k)
      for (std::size_t j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
    const cplx inv = 1.0 / A(k, k);
    for (std::size_t i = k + 1; i < n; ++i) A(i, k) *= inv;
    for (std::size_t j = k + 1; j < n; ++j) {
      const cplx akj = A(k, j);
      if (akj == 0.0) continue;
      for (std::size_t i = k + 1; i < n; ++i) A(i, j) -= A(i, k) * akj;
    }
  }
  return {std::move(A), std::move(piv)};
}

inline ComplexMatrix lu_solve(const LU& f, ComplexMatrix B) {
  const std::size_t n = f.lu.rows();
  if (B.rows() != n) throw ArgumentError("lu_solve: dimension mismatch");
  for (std::size_t j = 0; j < B.cols(); ++j) {
    auto x = B.col(j);
    for (std::size_t k = 0; k < n; ++k)
      if (f.piv[k] != k) std::swap(x[k], x[f.piv[k]]);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = k + 1; i < n; ++i) x[i] -= f.lu(i, k) * x[k];
    for (std::size_t k = n; k-- > 0;) {
      x[k] /= f.lu(k, k);
      for (std::size_t i = 0; i < k; ++i) x[i] -= f.lu(i, k) * x[k];
    }
  }
  return B;
}

inline ComplexMatrix solve(const ComplexMatrix& A, const ComplexMatrix& B) { return lu_solve(lu_factor(A), B); }
inline ComplexMatrix inverse(const ComplexMatrix& A) { return solve(A, identity(A.rows())); }

/// Unitary factor of a Householder QR, with R's diagonal made real nonnegative so the
/// factor is unique (useful for Haar-distributed random unitaries).
inline ComplexMatrix qr_unitary(ComplexMatrix A) {
  if (!A.is_square()) throw ArgumentError("qr_unitary: matrix must be square");
  const std::size_t n = A.rows();
  std::vector<std::vector<cplx>> vs;
  std::vector<double> betas;
  std::vector<cplx> rdiag(n);
  for (std::size_t k = 0; k < n; ++k) {
    double nrm2 = 0.0;
    for (std::size_t i = k; i < n; ++i) nrm2 += std::norm(A(i, k));
    const double nrm = std::sqrt(nrm2);
    std::vector<cplx> v(n - k);
    for (std::size_t i = k; i < n; ++i) v[i - k] = A(i, k);
    const double a0 = std::abs(v[0]);
    const cplx phase = a0 == 0.0 ? cplx{1.0} : v[0] / a0;
    const cplx alpha = -phase * nrm;
    v[0] -= alpha;
    const double vv = 2.0 * nrm * (a0 + nrm);
    const double beta = vv == 0.0 ? 0.0 : 2.0 / vv;
    for (std::size_t j = k; j < n; ++j) {
      cplx t = 0.0;
      for (std::size_t i = k; i < n; ++i) t += std::conj(v[i - k]) * A(i, j);
      t *= beta;
      for (std::size_t i = k; i < n; ++i) A(i, j) -= v[i - k] * t;
    }
    rdiag[k] = A(k, k);
    vs.push_back(std::move(v));
    betas.push_back(beta);
  }
  ComplexMatrix Q = identity(n);
  for (std::size_t k = n; k-- > 0;) {
    const auto& v = vs[k];
    for (std::size_t j = 0; j < n; ++j) {
      cplx t = 0.0;
      for (std::size_t i = k; i < n; ++i) t += std::conj(v[i - k]) * Q(i, j);
      t *= betas[k];
      for (std::size_t i = k; i < n; ++i) Q(i, j) -= v[i - k] * t;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double a = std::abs(rdiag[k]);
    if (a == 0.0) continue;
    const cplx ph = rdiag[k] / a;
    for (std::size_t i = 0; i < n; ++i) Q(i, k) *= ph;
  }
  return Q;
}

}  // namespace bivarfun
