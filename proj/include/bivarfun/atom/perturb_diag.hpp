#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bivarfun/blocking.hpp"
#include "bivarfun/dense/norms.hpp"
#include "bivarfun/function.hpp"
#include "bivarfun/mp/mpmatrix.hpp"
#include "bivarfun/rng.hpp"

namespace bivarfun {

inline constexpr double kUnitRoundoff = 0x1p-53;
inline constexpr double kLog10UnitRoundoff = -15.954589770191003;  // log10(2^-53)

struct DiagPlan {
  double kappa_A = 1.0, kappa_B = 1.0;
  double log10_kappa_A = 0.0, log10_kappa_B = 0.0;
  double u_h = kUnitRoundoff;
  double log10_u_h = kLog10UnitRoundoff;
  int digits = 16;  // precision of the final evaluation, u_h / max(kappa_A, kappa_B)
  int vector_digits = 32;
  double perturbation_A = 0.0, perturbation_B = 0.0;
  int refinements = 0;
};

namespace detail {

inline double pow10_or_inf(double l) {
  return l > 308.0 ? std::numeric_limits<double>::infinity() : std::pow(10.0, l);
}

// log10 of m zeta (zeta+1)^(m-2), never below 0. For m = 2 that formula undershoots the
// condition number of the unit-column eigenvector matrix, zeta + sqrt(1 + zeta^2), so use it exactly.
inline double kappa_bound_log10(std::size_t m, double zeta) {
  if (m <= 1 || zeta == 0.0) return 0.0;
  if (!std::isfinite(zeta)) return std::numeric_limits<double>::infinity();
  if (m == 2) return std::asinh(zeta) / std::numbers::ln10;
  const double l = std::log10(static_cast<double>(m)) + std::log10(zeta) +
                   static_cast<double>(m - 2) * std::log1p(zeta) / std::numbers::ln10;
  return std::max(0.0, l);
}

// gap(i, j) = |t_ii - t_jj|, off(i, j) = |t_ij| for i < j
template <class Gap, class Off>
double kappa_heuristic_log10(const std::vector<cplx>& d, double delta1, Gap gap, Off off) {
  if (d.size() <= 1) return 0.0;
  const Partition P = blocking(std::span<const cplx>(d), delta1);
  double worst = 0.0;
  for (const auto& blk : P.blocks) {
    if (blk.size() <= 1) continue;
    std::vector<std::size_t> s = blk;
    std::sort(s.begin(), s.end());
    double mx = 0.0, mn = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < s.size(); ++a)
      for (std::size_t b = a + 1; b < s.size(); ++b) {
        mx = std::max(mx, off(s[a], s[b]));
        mn = std::min(mn, gap(s[a], s[b]));
      }
    if (mn == 0.0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, kappa_bound_log10(s.size(), mx / mn));
  }
  return worst;
}

}  // namespace detail

/// log10 of the a priori bound on the eigenvector condition number of triangular T,
/// maximized over the sub-blocks obtained by blocking diag(T) at delta1.
inline double kappa_estimate_heuristic_log10(const ComplexMatrix& T, double delta1) {
  const auto d = diag_of(T);
  return detail::kappa_heuristic_log10(
      d, delta1, [&](std::size_t i, std::size_t j) { return std::abs(d[i] - d[j]); },
      [&](std::size_t i, std::size_t j) { return std::abs(T(i, j)); });
}

inline double kappa_estimate_heuristic_log10(const MpMatrix& T, double delta1) {
  std::vector<cplx> d(T.rows());
  for (std::size_t i = 0; i < T.rows(); ++i) d[i] = T(i, i).to_cplx();
  // the perturbation sits far below double resolution of the diagonal: gaps need full precision
  return detail::kappa_heuristic_log10(
      d, delta1, [&](std::size_t i, std::size_t j) { return abs(T(i, i) - T(j, j)).to_double(); },
      [&](std::size_t i, std::size_t j) { return abs(T(i, j)).to_double(); });
}

inline double kappa_estimate_heuristic(const ComplexMatrix& T, double delta1) {
  return detail::pow10_or_inf(kappa_estimate_heuristic_log10(T, delta1));
}

/// log10 of kappa(V) for triangular V: double estimate, then the comparison-matrix
/// bound, then a multiprecision computation as last resort.
inline double greedy_kappa_refine_log10(const MpMatrix& V) {
  const std::size_t n = V.rows();
  if (n == 0) return 0.0;
  const DemoteResult dv = demote_checked(V);
  double nV = 0.0, nVi = std::numeric_limits<double>::infinity();
  if (!dv.overflow) {
    nV = spectral_norm(dv.value);
    bool zero_diag = false;
    for (std::size_t i = 0; i < n; ++i) zero_diag |= dv.value(i, i) == 0.0;
    if (!zero_diag) {
      const ComplexMatrix Vi = triangular_inverse(dv.value);
      if (all_finite(Vi)) nVi = spectral_norm(Vi);
    }
    const double k1 = nV * nVi;
    if (std::isfinite(k1) && k1 <= 1e14) return std::log10(std::max(k1, 1.0));

    // comparison matrix: its inverse is entrywise nonnegative, so back substitution has no cancellation
    if (!zero_diag && std::isfinite(nVi)) {
      ComplexMatrix Ui(n, n);
      bool finite = true;
      for (std::size_t j = 0; j < n && finite; ++j) {
        Ui(j, j) = 1.0 / std::abs(dv.value(j, j));
        for (std::size_t i = j; i-- > 0;) {
          double s = 0.0;
          for (std::size_t k = i + 1; k <= j; ++k) s += std::abs(dv.value(i, k)) * Ui(k, j).real();
          Ui(i, j) = s / std::abs(dv.value(i, i));
          if (!std::isfinite(Ui(i, j).real())) finite = false;
        }
      }
      if (finite) {
        const double nUi = spectral_norm(Ui);
        if (std::isfinite(nUi) && nUi <= 1e4 * nVi) return std::log10(std::max(nV * nUi, 1.0));
      }
    }
  }
  // Frobenius norms in the working precision of V (an upper bound on the 2-norm condition number)
  const MpMatrix Vi = mp_triangular_inverse(V);
  const double l = mp_norm_fro(V).log10_abs() + mp_norm_fro(Vi).log10_abs();
  return std::isnan(l) ? std::numeric_limits<double>::infinity() : std::max(0.0, l);
}

inline double greedy_kappa_refine(const MpMatrix& V, double /*u_h*/ = kUnitRoundoff) {
  return detail::pow10_or_inf(greedy_kappa_refine_log10(V));
}

/// Perturbed copy of one triangular diagonal block with its eigenvectors, kept across
/// all the atomic evaluations that involve the block.
class DiagBlock {
public:
  DiagBlock() = default;
  DiagBlock(const ComplexMatrix& T, std::uint64_t seed, double delta1) : eigs_(diag_of(T)) {
    const std::size_t m = T.rows();
    if (!is_upper_triangular(T)) throw ArgumentError("fun2_atom_diag: block must be upper triangular");
    if (m == 0) return;
    const PrecisionContext c2(32);  // unit roundoff u^2
    const double nrm = spectral_norm(T);
    scale_ = (nrm > 0.0 ? nrm : 1.0) * kUnitRoundoff / std::sqrt(static_cast<double>(m));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (int attempt = 0;; ++attempt) {
      Tp_ = promote(T, c2);
      if (m > 1)
        for (std::size_t i = 0; i < m; ++i) {
          const double ph = phase(rng);
          Tp_(i, i) += MpComplex(scale_ * std::cos(ph), scale_ * std::sin(ph), c2.bits());
        }
      heuristic_ = kappa_estimate_heuristic_log10(Tp_, delta1);
      if (std::isfinite(heuristic_) && distinct_diagonal()) break;
      if (attempt == 3)
        throw ConvergenceError("fun2_atom_diag: diagonal collisions persist after 3 re-perturbations",
                               std::numeric_limits<double>::infinity());
    }
  }

  std::size_t size() const { return eigs_.size(); }
  const std::vector<cplx>& eigenvalues() const { return eigs_; }  // unperturbed
  double perturbation() const { return scale_ * std::sqrt(static_cast<double>(size())); }
  double heuristic_log10() const { return heuristic_; }
  const MpMatrix& perturbed() const { return Tp_; }

  /// Eigenvectors with at least `digits` digits.
  const MpMatrix& vectors(int digits) {
    if (vdigits_ < digits) {
      V_ = mp_triangular_eig(Tp_.with_ctx(PrecisionContext(digits))).V;
      // unit columns: the unit-diagonal scaling squares kappa on nearly defective blocks
      for (std::size_t j = 0; j < V_.cols(); ++j) {
        const MpReal nr = mp_norm_fro(V_.block(0, j, j + 1, 1));
        for (std::size_t i = 0; i <= j; ++i) V_(i, j) = MpComplex(V_(i, j).re() / nr, V_(i, j).im() / nr);
      }
      vdigits_ = digits;
      refined_valid_ = false;
      rounded_valid_ = false;
    }
    return V_;
  }
  int vector_digits() const { return vdigits_; }

  double refined_log10() {
    if (!refined_valid_) {
      refined_ = greedy_kappa_refine_log10(V_);
      refined_valid_ = true;
    }
    return refined_;
  }

  // eigenvectors and perturbed eigenvalues rounded to ctx
  const MpMatrix& vectors_at(PrecisionContext ctx) {
    if (V_.ctx() == ctx) return V_;
    round_to(ctx);
    return Vr_;
  }
  const std::vector<MpComplex>& eigenvalues_at(PrecisionContext ctx) {
    round_to(ctx);
    return Dr_;
  }

private:
  bool distinct_diagonal() const {
    for (std::size_t i = 0; i < Tp_.rows(); ++i)
      for (std::size_t j = i + 1; j < Tp_.rows(); ++j)
        if (Tp_(i, i) == Tp_(j, j)) return false;
    return true;
  }
  void round_to(PrecisionContext ctx) {
    if (rounded_valid_ && Dr_ctx_ == ctx) return;
    if (V_.ctx() != ctx) Vr_ = V_.with_ctx(ctx);
    Dr_.clear();
    for (std::size_t i = 0; i < Tp_.rows(); ++i) {
      MpComplex z = Tp_(i, i);
      z.set_prec_round(ctx.bits());
      Dr_.push_back(std::move(z));
    }
    Dr_ctx_ = ctx;
    rounded_valid_ = true;
  }

  std::vector<cplx> eigs_;
  MpMatrix Tp_;
  double scale_ = 0.0;
  double heuristic_ = 0.0;
  MpMatrix V_;
  int vdigits_ = 0;
  double refined_ = 0.0;
  bool refined_valid_ = false;
  MpMatrix Vr_;
  std::vector<MpComplex> Dr_;
  PrecisionContext Dr_ctx_{};
  bool rounded_valid_ = false;
};

namespace detail {

inline void check_analytic(const BivariateFunction& f, const std::vector<cplx>& la, const std::vector<cplx>& lb) {
  for (cplx x : la)
    for (cplx y : lb)
      if (f.is_singular(x, y)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "function '%s' is not analytic at (%.6g%+.6gi, %.6g%+.6gi)", f.name().c_str(),
                      x.real(), x.imag(), y.real(), y.imag());
        throw AnalyticityError(buf);
      }
}

}  // namespace detail

/// f{A,B}(C) for the two cached blocks: V_A [F o (V_A^{-1} C V_B)] V_B^{-1} in the
/// precision dictated by the eigenvector condition numbers.
inline ComplexMatrix diag_pair_eval(const BivariateFunction& f, DiagBlock& A, DiagBlock& B, const ComplexMatrix& C,
                                    DiagPlan* plan = nullptr) {
  const std::size_t m = A.size(), n = B.size();
  if (C.rows() != m || C.cols() != n) throw ArgumentError("fun2_atom_diag: dimension mismatch");
  if (m == 0 || n == 0) return zeros(m, n);
  detail::check_analytic(f, A.eigenvalues(), B.eigenvalues());

  const double lu = kLog10UnitRoundoff;
  double kA = A.heuristic_log10(), kB = B.heuristic_log10();
  double rA = kA, rB = kB;
  int iter = 0, vd = 0;
  for (;; ++iter) {
    const double lw = std::min(2.0 * lu, lu - kA - kB) - std::max(kA, kB);
    vd = PrecisionContext::for_log10_roundoff(lw).digits();
    A.vectors(vd);
    B.vectors(vd);
    rA = A.refined_log10();
    rB = B.refined_log10();
    if ((rA <= kA && rB <= kB) || iter == 3) break;
    kA = std::max(kA, rA);
    kB = std::max(kB, rB);
  }
  const double lu_h = lu - rA - rB;
  const PrecisionContext ce = PrecisionContext::for_log10_roundoff(lu_h - std::max(rA, rB));
  if (plan) {
    plan->log10_kappa_A = rA;
    plan->log10_kappa_B = rB;
    plan->kappa_A = detail::pow10_or_inf(rA);
    plan->kappa_B = detail::pow10_or_inf(rB);
    plan->log10_u_h = lu_h;
    plan->u_h = std::pow(10.0, lu_h);
    plan->digits = ce.digits();
    plan->vector_digits = vd;
    plan->perturbation_A = A.perturbation();
    plan->perturbation_B = B.perturbation();
    plan->refinements = iter;
  }

  const MpMatrix& VA = A.vectors_at(ce);
  const MpMatrix& VB = B.vectors_at(ce);
  const auto& DA = A.eigenvalues_at(ce);
  const auto& DB = B.eigenvalues_at(ce);
  MpMatrix X = mp_triangular_solve(VA, promote(C, ce), Side::Left, &ce);
  X = mp_matmul(X, VB, &ce);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      MpComplex fij(ce.bits());
      try {
        fij = f.eval_mp(DA[i], DB[j]);
      } catch (const SingularityError& e) {
        throw AnalyticityError("function '" + f.name() + "' could not be evaluated: " + e.what());
      }
      if (!fij.re().is_finite() || !fij.im().is_finite())
        throw AnalyticityError("function '" + f.name() + "' returned a non-finite value on the spectrum");
      MpComplex::mul_into(X(i, j), X(i, j), fij);
    }
  X = mp_matmul(VA, X, &ce);
  X = mp_triangular_solve(VB, X, Side::Right, &ce);
  const DemoteResult r = demote_checked(X);
  if (r.overflow) throw AnalyticityError("fun2_atom_diag: result overflows double precision");
  return r.value;
}

/// Perturb-and-diagonalize evaluation of f{A,B}(C) for upper-triangular A and B.
inline ComplexMatrix fun2_atom_diag(const BivariateFunction& f, const ComplexMatrix& A, const ComplexMatrix& B,
                                    const ComplexMatrix& C, std::uint64_t seed = kDefaultSeed,
                                    DiagPlan* plan = nullptr, double delta1 = 5e-3) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || C.rows() != A.rows() || C.cols() != B.rows())
    throw ArgumentError("fun2_atom_diag: dimension mismatch");
  DiagBlock a(A, substream_seed(seed, "perturb-A"), delta1);
  DiagBlock b(B, substream_seed(seed, "perturb-B"), delta1);
  return diag_pair_eval(f, a, b, C, plan);
}

}  // namespace bivarfun
