#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include "bivarfun/dense/schur.hpp"

namespace bivarfun {

/// Solves A11 V - V A22 = C for upper-triangular A11 (p x p), A22 (q x q).
/// Column sweep: (A11 - A22(j,j) I) v_j = c_j + sum_{k<j} v_k A22(k,j).
inline ComplexMatrix sylvester_tri(const ComplexMatrix& A11, const ComplexMatrix& A22, const ComplexMatrix& C) {
  const std::size_t p = A11.rows(), q = A22.rows();
  if (!A11.is_square() || !A22.is_square() || C.rows() != p || C.cols() != q)
    throw ArgumentError("sylvester_tri: dimension mismatch");
  ComplexMatrix V = C;
  for (std::size_t j = 0; j < q; ++j) {
    auto v = V.col(j);
    for (std::size_t k = 0; k < j; ++k) {
      const cplx t = A22(k, j);
      if (t == 0.0) continue;
      const auto vk = V.col(k);
      for (std::size_t i = 0; i < p; ++i) v[i] += vk[i] * t;
    }
    const cplx mu = A22(j, j);
    for (std::size_t i = p; i-- > 0;) {
      const cplx d = A11(i, i) - mu;
      if (d == 0.0) {
        std::ostringstream os;
        os << "sylvester_tri: A11(" << i << "," << i << ") = A22(" << j << "," << j << ") = " << mu;
        throw SingularityError(os.str());
      }
      v[i] /= d;
      const cplx vi = v[i];
      for (std::size_t r = 0; r < i; ++r) v[r] -= A11(r, i) * vi;
    }
  }
  return V;
}

/// Triangular A X + X B = C by the scalar-corner sweep: peel the last row of A and the
/// first column of B at each step.
inline ComplexMatrix sylvester_bs_triangular(const ComplexMatrix& A, const ComplexMatrix& B, ComplexMatrix C) {
  const std::size_t m = A.rows(), n = B.rows();
  ComplexMatrix X = zeros(m, n);
  std::size_t ma = m, nb = 0;
  while (ma > 0 && nb < n) {
    const std::size_t r = ma - 1;
    const cplx a22 = A(r, r), b11 = B(nb, nb);
    // 1. corner scalar
    const cplx x21 = C(r, nb) / (a22 + b11);
    X(r, nb) = x21;
    // 2. (A11 + b11 I) x11 = c11 - A12 x21
    for (std::size_t i = 0; i < r; ++i) X(i, nb) = C(i, nb) - A(i, r) * x21;
    for (std::size_t i = r; i-- > 0;) {
      X(i, nb) /= A(i, i) + b11;
      const cplx xi = X(i, nb);
      for (std::size_t k = 0; k < i; ++k) X(k, nb) -= A(k, i) * xi;
    }
    // 3. x22 (B22 + a22 I) = c22 - x21 B12
    for (std::size_t j = nb + 1; j < n; ++j) {
      cplx s = C(r, j) - x21 * B(nb, j);
      for (std::size_t k = nb + 1; k < j; ++k) s -= X(r, k) * B(k, j);
      X(r, j) = s / (B(j, j) + a22);
    }
    // 4. remaining block: C12 <- C12 - A12 X22 - X11 B12
    for (std::size_t j = nb + 1; j < n; ++j) {
      const cplx x22 = X(r, j), b12 = B(nb, j);
      for (std::size_t i = 0; i < r; ++i) C(i, j) -= A(i, r) * x22 + X(i, nb) * b12;
    }
    --ma;
    ++nb;
  }
  return X;
}

/// Solves A X + X B = C for general square A, B via Schur forms of both coefficients.
inline ComplexMatrix sylvester_bartels_stewart(const ComplexMatrix& A, const ComplexMatrix& B, const ComplexMatrix& C) {
  if (!A.is_square() || !B.is_square() || C.rows() != A.rows() || C.cols() != B.rows())
    throw ArgumentError("sylvester_bartels_stewart: dimension mismatch");
  const SchurForm SA = schur(A);
  const SchurForm SB = schur(B);
  const double u = 0x1p-53;
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < B.rows(); ++j) {
      const cplx l = SA.T(i, i), m = SB.T(j, j);
      if (std::abs(l + m) <= 4.0 * u * (std::abs(l) + std::abs(m))) {
        std::ostringstream os;
        os << "sylvester_bartels_stewart: eigenvalues " << l << " and " << m << " nearly cancel";
        throw SingularityError(os.str());
      }
    }
  const ComplexMatrix F = matmul(adjoint(SA.Q), C, SB.Q);
  const ComplexMatrix Y = sylvester_bs_triangular(SA.T, SB.T, F);
  return matmul(SA.Q, Y, adjoint(SB.Q));
}

}  // namespace bivarfun
