#pragma once

#include <algorithm>
#include <cmath>

#include "bivarfun/function.hpp"

namespace bivarfun {

namespace detail {
inline void check_rotation_form(const ComplexMatrix& X, const char* which) {
  if (X.rows() != 2 || X.cols() != 2) throw ArgumentError(std::string("real_2x2_block: ") + which + " must be 2x2");
  double scale = 0.0;
  for (const cplx& v : X.values()) {
    if (v.imag() != 0.0) throw ArgumentError(std::string("real_2x2_block: ") + which + " must be real");
    scale = std::max(scale, std::abs(v.real()));
  }
  const double tol = 1e-14 * std::max(scale, 1e-300);
  if (std::abs(X(0, 0).real() - X(1, 1).real()) > tol || std::abs(X(0, 1).real() + X(1, 0).real()) > tol)
    throw ArgumentError(std::string("real_2x2_block: ") + which + " is not of the form [[a, b], [-b, a]]");
}
}  // namespace detail

/// f{A,B}(C) for real A = [[alpha, beta], [-beta, alpha]], B = [[gamma, delta], [-delta, gamma]]
/// and real C, in real arithmetic apart from two scalar evaluations of f.
inline ComplexMatrix real_2x2_block(const BivariateFunction& f, const ComplexMatrix& A, const ComplexMatrix& B,
                                    const ComplexMatrix& C) {
  detail::check_rotation_form(A, "A");
  detail::check_rotation_form(B, "B");
  if (C.rows() != 2 || C.cols() != 2) throw ArgumentError("real_2x2_block: C must be 2x2");
  for (const cplx& v : C.values())
    if (v.imag() != 0.0) throw ArgumentError("real_2x2_block: C must be real");
  if (!f.conj_symmetric())
    throw ContractError("real_2x2_block: function '" + f.name() + "' is not marked conjugate-symmetric");

  const cplx z(A(0, 0).real(), A(0, 1).real());
  const cplx w(B(0, 0).real(), B(0, 1).real());
  const cplx fw = f(z, w), fc = f(z, std::conj(w));
  const double c11 = C(0, 0).real(), c12 = C(0, 1).real(), c21 = C(1, 0).real(), c22 = C(1, 1).real();
  const double q1 = (c21 - c12) * fw.imag() + (c11 + c22) * fw.real();
  const double q2 = (c12 + c21) * fc.imag() + (c11 - c22) * fc.real();
  const double q3 = (c22 - c11) * fc.imag() + (c12 + c21) * fc.real();
  const double q4 = (c11 + c22) * fw.imag() + (c12 - c21) * fw.real();
  ComplexMatrix X(2, 2);
  X(0, 0) = 0.5 * (q1 + q2);
  X(0, 1) = 0.5 * (q3 + q4);
  X(1, 0) = 0.5 * (q3 - q4);
  X(1, 1) = 0.5 * (q1 - q2);
  return X;
}

}  // namespace bivarfun
