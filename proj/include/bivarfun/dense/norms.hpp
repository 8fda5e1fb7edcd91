#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "bivarfun/dense/linalg.hpp"

namespace bivarfun {

/// Singular values by one-sided Jacobi on the columns (descending). Meant for small or
/// thin matrices; cost grows like cols^2 * rows per sweep.
inline std::vector<double> singular_values_jacobi(ComplexMatrix X) {
  if (X.cols() > X.rows()) X = adjoint(X);
  const std::size_t m = X.rows(), n = X.cols();
  const double eps = 0x1p-53;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0;
        cplx gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += std::norm(X(i, p));
          beta += std::norm(X(i, q));
          gamma += std::conj(X(i, p)) * X(i, q);
        }
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const cplx ph = std::conj(gamma / g);
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const cplx xp = X(i, p), xq = X(i, q) * ph;
          X(i, p) = c * xp - s * xq;
          X(i, q) = s * xp + c * xq;
        }
      }
    if (!rotated) break;
  }
  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) sv[j] = frobenius_norm(X.block(0, j, m, 1));
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

/// Largest singular value. Power iteration on X*X (relative tolerance 1e-6, at most
/// 200 steps, fixed start vector); exact Jacobi when min(rows, cols) <= 3.
inline double spectral_norm(const ComplexMatrix& X) {
  if (X.empty()) return 0.0;
  const double fro = frobenius_norm(X);
  if (fro == 0.0) return 0.0;
  if (!std::isfinite(fro)) return fro;
  if (std::min(X.rows(), X.cols()) <= 3) return singular_values_jacobi(X)[0];
  const std::size_t n = X.cols();
  // deterministic, generic start vector
  ComplexMatrix v(n, 1);
  std::uint64_t s = 0x9E3779B97F4A7C15ull;
  for (std::size_t i = 0; i < n; ++i) {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    v(i, 0) = {1.0 + static_cast<double>(s % 1000) / 1000.0, static_cast<double>((s >> 20) % 1000) / 1000.0};
  }
  v *= cplx{1.0 / frobenius_norm(v)};
  const ComplexMatrix Xh = adjoint(X);
  double sigma = 0.0;
  for (int it = 0; it < 200; ++it) {
    ComplexMatrix w = matmul(X, v);
    const double nw = frobenius_norm(w);
    if (nw == 0.0) break;
    ComplexMatrix z = matmul(Xh, w);
    const double nz = frobenius_norm(z);
    const double next = std::sqrt(nz);  // ||X*X v|| -> sigma^2 at convergence
    v = z;
    v *= cplx{1.0 / nz};
    const double est = std::max(nw, next);
    if (it > 0 && std::abs(est - sigma) <= 1e-6 * est) {
      sigma = est;
      break;
    }
    sigma = est;
  }
  return std::min(sigma, fro);
}

/// ||A* A - A A*||_F
inline double normality_defect(const ComplexMatrix& A) {
  const ComplexMatrix Ah = adjoint(A);
  return frobenius_norm(matmul(Ah, A) - matmul(A, Ah));
}

/// Normality test with threshold 10 m u ||A||^2 (Frobenius norm on both sides).
inline bool is_numerically_normal(const ComplexMatrix& A) {
  const double nrm = frobenius_norm(A);
  if (nrm == 0.0) return true;
  return normality_defect(A) <= 10.0 * static_cast<double>(A.rows()) * 0x1p-53 * nrm * nrm;
}

/// ||V|| ||V^{-1}|| for upper-triangular V; +inf when the inverse overflows.
inline double cond_estimate(const ComplexMatrix& V) {
  for (std::size_t i = 0; i < V.rows(); ++i)
    if (V(i, i) == 0.0) throw SingularityError("cond_estimate: zero diagonal entry at " + std::to_string(i));
  const ComplexMatrix Vi = triangular_inverse(V);
  if (!all_finite(Vi)) return std::numeric_limits<double>::infinity();
  const double k = spectral_norm(V) * spectral_norm(Vi);
  return std::isfinite(k) ? k : std::numeric_limits<double>::infinity();
}

}  // namespace bivarfun
