#pragma once

#include "bivarfun/atom/perturb_diag.hpp"
#include "bivarfun/dense/linalg.hpp"
#include "bivarfun/dense/norms.hpp"
#include "bivarfun/dense/schur.hpp"
#include "bivarfun/fun2m.hpp"

namespace bivarfun::bench {

/// Diagonalize both A and B^T in double precision whatever their conditioning
/// (Schur form plus triangular eigenvectors), then apply f entrywise.
/// near_defective is set when an eigenvector gap had to be clamped.
inline ComplexMatrix diag_baseline(const BivariateFunction& f, const ComplexMatrix& A, const ComplexMatrix& B,
                                   const ComplexMatrix& C, bool* near_defective = nullptr) {
  ::bivarfun::detail::check_dims(A, B, C, "diag_baseline");
  bool flagged = false;
  auto eig = [&flagged](const ComplexMatrix& X) {
    const SchurForm S = schur(X);
    const ComplexMatrix V = ::bivarfun::detail::triangular_eigvecs(S.T, &flagged);
    return std::tuple{matmul(S.Q, V), solve_upper(V, adjoint(S.Q)), diag_of(S.T)};
  };
  const auto [SA, SAi, da] = eig(A);
  const auto [SB, SBi, db] = eig(transpose(B));
  if (near_defective) *near_defective = flagged;
  ComplexMatrix X = matmul(SAi, C, SB);
  for (std::size_t j = 0; j < X.cols(); ++j)
    for (std::size_t i = 0; i < X.rows(); ++i) X(i, j) *= ::bivarfun::detail::eval_checked(f, da[i], db[j]);
  return matmul(SA, X, SBi);
}

/// Schur forms in double, then one perturb-and-diagonalize step on the full
/// triangular factors at the precision the eigenvector conditioning asks for.
inline ComplexMatrix diag_hp(const BivariateFunction& f, const ComplexMatrix& A, const ComplexMatrix& B,
                             const ComplexMatrix& C, std::uint64_t seed = kDefaultSeed, DiagPlan* plan = nullptr,
                             double delta1 = 5e-3) {
  ::bivarfun::detail::check_dims(A, B, C, "diag_hp");
  const SchurForm SA = schur(A);
  const SchurForm SM = schur(transpose(B));
  const ComplexMatrix F = fun2_atom_diag(f, SA.T, SM.T, matmul(adjoint(SA.Q), C, SM.Q), seed, plan, delta1);
  return matmul(SA.Q, F, adjoint(SM.Q));
}

/// ||X - R||_2 / ||R||_2, or the absolute error when R vanishes.
inline double relative_error(const ComplexMatrix& X, const ComplexMatrix& R) {
  if (!all_finite(X)) return std::numeric_limits<double>::infinity();
  const double nr = spectral_norm(R);
  const double e = spectral_norm(X - R);
  return nr > 0.0 ? e / nr : e;
}

}  // namespace bivarfun::bench
