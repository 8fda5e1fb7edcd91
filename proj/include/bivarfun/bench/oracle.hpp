#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "bivarfun/atom/perturb_diag.hpp"
#include "bivarfun/bench/gallery.hpp"
#include "bivarfun/dense/schur.hpp"
#include "bivarfun/fun2m.hpp"

namespace bivarfun::bench {

namespace detail {

inline MpMatrix mp_transpose(const MpMatrix& X, bool conjugate) {
  MpMatrix Y(X.cols(), X.rows(), X.ctx());
  for (std::size_t j = 0; j < X.cols(); ++j)
    for (std::size_t i = 0; i < X.rows(); ++i) Y(j, i) = conjugate ? conj(X(i, j)) : X(i, j);
  return Y;
}

inline double log10_cond_fro(const MpMatrix& V) {
  const double l = mp_norm_fro(V).log10_abs() + mp_norm_fro(mp_triangular_inverse(V)).log10_abs();
  return std::isnan(l) ? std::numeric_limits<double>::infinity() : std::max(0.0, l);
}

}  // namespace detail

enum class OracleSchur {
  Double,         // Schur forms from the double-precision QR algorithm, as diag_hp does
  Multiprecision  // Schur forms recomputed at the oracle precision
};

/// Multiprecision reference for f{A,B^T}(C). The triangular Schur factors are
/// perturbed on the diagonal by ||T|| 10^{-d} and diagonalized at whatever precision
/// the eigenvector conditioning demands, so the result carries about d correct
/// digits relative to the Schur forms it started from. Preparation is independent
/// of f and C, so one instance serves every function of a test case.
class HpOracle {
public:
  HpOracle(const MpMatrix& A, const MpMatrix& B, std::uint64_t seed = kDefaultSeed, double delta1 = 5e-3)
      : ctx_(A.ctx()) {
    if (!A.is_square() || !B.is_square()) throw ArgumentError("oracle: A and B must be square");
    if (A.ctx() != B.ctx()) throw ArgumentError("oracle: A and B must share a precision");
    a_ = prepare(mp_schur(A), substream_seed(seed, "oracle-A"), delta1);
    b_ = prepare(mp_schur(detail::mp_transpose(B, false)), substream_seed(seed, "oracle-B"), delta1);
    settle();
  }
  HpOracle(const ComplexMatrix& A, const ComplexMatrix& B, int digits = 128, std::uint64_t seed = kDefaultSeed,
           OracleSchur mode = OracleSchur::Double, double delta1 = 5e-3)
      : ctx_(digits) {
    ::bivarfun::detail::check_dims(A, B, zeros(A.rows(), B.rows()), "oracle");
    if (mode == OracleSchur::Multiprecision) {
      a_ = prepare(mp_schur(promote(A, ctx_)), substream_seed(seed, "oracle-A"), delta1);
      b_ = prepare(mp_schur(promote(transpose(B), ctx_)), substream_seed(seed, "oracle-B"), delta1);
    } else {
      const SchurForm SA = schur(A), SM = schur(transpose(B));
      a_ = prepare({promote(SA.Q, ctx_), promote(SA.T, ctx_)}, substream_seed(seed, "oracle-A"), delta1);
      b_ = prepare({promote(SM.Q, ctx_), promote(SM.T, ctx_)}, substream_seed(seed, "oracle-B"), delta1);
    }
    settle();
  }

  int digits() const { return ctx_.digits(); }
  int working_digits() const { return work_.digits(); }
  double log10_kappa_A() const { return a_.kappa; }
  double log10_kappa_B() const { return b_.kappa; }

  MpMatrix evaluate(const BivariateFunction& f, const ComplexMatrix& C) const {
    const std::size_t m = a_.V.rows(), n = b_.V.rows();
    if (C.rows() != m || C.cols() != n) throw ArgumentError("oracle: C has the wrong shape");
    const PrecisionContext& w = work_;
    MpMatrix X = mp_matmul(mp_matmul(a_.Qh, promote(C, w)), b_.Q);
    X = mp_triangular_solve(a_.V, X, Side::Left);
    X = mp_matmul(X, b_.V);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < m; ++i) {
        // poles only: on a branch cut the perturbation picks a side, as a floating-point evaluation would
        if (f.is_singular(a_.d0[i], b_.d0[j]) && !std::isfinite(std::abs(f(a_.d0[i], b_.d0[j]))))
          throw AnalyticityError("oracle: function '" + f.name() + "' is not analytic on the spectrum");
        MpComplex v(w.bits());
        try {
          v = f.eval_mp(a_.d[i], b_.d[j]);
        } catch (const SingularityError& e) {
          throw AnalyticityError(std::string("oracle: ") + e.what());
        }
        if (!v.re().is_finite() || !v.im().is_finite())
          throw AnalyticityError("oracle: function '" + f.name() + "' is not finite on the perturbed spectrum");
        MpComplex::mul_into(X(i, j), X(i, j), v);
      }
    X = mp_matmul(a_.V, X);
    X = mp_triangular_solve(b_.V, X, Side::Right);
    return mp_matmul(mp_matmul(a_.Q, X), b_.Qh);
  }

  ComplexMatrix evaluate_double(const BivariateFunction& f, const ComplexMatrix& C) const {
    return demote(evaluate(f, C));
  }

private:
  struct Part {
    MpMatrix Q, Qh, Tp;  // Q, Q^* and the perturbed triangular factor, all at the oracle precision
    MpMatrix V;          // eigenvectors at the working precision
    std::vector<MpComplex> d;
    std::vector<cplx> d0;  // eigenvalues before the perturbation
    double kappa = 0.0;  // log10
  };

  Part prepare(MpSchurForm S, std::uint64_t seed, double delta1) const {
    Part p;
    const std::size_t m = S.T.rows();
    double nrm = spectral_norm(demote(S.T));
    if (!(nrm > 1e-250)) nrm = 1.0;
    const MpReal eps = MpReal(nrm, ctx_.bits()) * MpReal(std::pow(10.0, -0.5 * std::log10(double(m))), ctx_.bits());
    MpReal scale(ctx_.bits());
    mpfr_ui_pow_ui(scale.get(), 10, static_cast<unsigned long>(ctx_.digits()), MPFR_RNDN);
    mpfr_div(scale.get(), eps.get(), scale.get(), MPFR_RNDN);
    for (std::size_t i = 0; i < m; ++i) p.d0.push_back(S.T(i, i).to_cplx());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    if (m > 1)
      for (std::size_t i = 0; i < m; ++i) {
        const double ph = phase(rng);
        MpReal re = scale * MpReal(std::cos(ph), ctx_.bits());
        MpReal im = scale * MpReal(std::sin(ph), ctx_.bits());
        S.T(i, i) += MpComplex(re, im);
      }
    p.Qh = detail::mp_transpose(S.Q, true);
    p.Q = std::move(S.Q);
    p.Tp = std::move(S.T);
    p.kappa = kappa_estimate_heuristic_log10(p.Tp, delta1);
    return p;
  }

  // Working precision d + kA + kB + max(kA, kB) plus a guard, re-chosen while the
  // measured eigenvector conditioning exceeds the assumed one.
  void settle() {
    double kA = a_.kappa, kB = b_.kappa;
    for (int iter = 0;; ++iter) {
      const double lw = -ctx_.digits() - kA - kB - std::max(kA, kB) - 4.0;
      work_ = PrecisionContext::for_log10_roundoff(lw);
      a_.V = mp_triangular_eig(a_.Tp.with_ctx(work_)).V;
      b_.V = mp_triangular_eig(b_.Tp.with_ctx(work_)).V;
      const double rA = detail::log10_cond_fro(a_.V), rB = detail::log10_cond_fro(b_.V);
      const bool ok = rA <= kA + 0.5 && rB <= kB + 0.5;
      kA = std::max(kA, rA + 1.0);
      kB = std::max(kB, rB + 1.0);
      if (ok) break;
      if (iter == 5)
        throw ConvergenceError("oracle: eigenvector conditioning did not settle", std::pow(10.0, std::max(rA, rB)));
    }
    a_.kappa = kA;
    b_.kappa = kB;
    for (Part* p : {&a_, &b_}) {
      p->Q = p->Q.with_ctx(work_);
      p->Qh = p->Qh.with_ctx(work_);
      p->d.clear();
      for (std::size_t i = 0; i < p->Tp.rows(); ++i) {
        MpComplex z = p->Tp(i, i);
        z.set_prec_round(work_.bits());
        p->d.push_back(std::move(z));
      }
    }
  }

  PrecisionContext ctx_;
  PrecisionContext work_;
  Part a_, b_;
};

/// One-shot reference evaluation, rounded to double.
inline ComplexMatrix diag_hp_oracle(const BivariateFunction& f, const ComplexMatrix& A, const ComplexMatrix& B,
                                    const ComplexMatrix& C, int digits = 128, std::uint64_t seed = kDefaultSeed,
                                    OracleSchur mode = OracleSchur::Double) {
  ::bivarfun::detail::check_dims(A, B, C, "oracle");
  return HpOracle(A, B, digits, seed, mode).evaluate_double(f, C);
}

/// Relative difference ||X - Y||_2 / ||Y||_2 of two multiprecision results. The
/// difference is formed in multiprecision and only then rounded.
inline double mp_relative_difference(const MpMatrix& X, const MpMatrix& Y) {
  const PrecisionContext c = std::max(X.ctx(), Y.ctx());
  const DemoteResult d = demote_checked(mp_sub(X, Y, &c));
  const DemoteResult y = demote_checked(Y);
  const double ny = y.overflow ? 0.0 : spectral_norm(y.value);
  if (d.overflow || !(ny > 0.0) || !std::isfinite(ny)) {
    const double l = mp_norm_fro(mp_sub(X, Y, &c)).log10_abs() - mp_norm_fro(Y).log10_abs();
    return std::isnan(l) ? 0.0 : std::pow(10.0, l);
  }
  return spectral_norm(d.value) / ny;
}

/// Perturbed companion oracle for the condition number estimate: A + dA, B + dB with
/// complex Gaussian directions scaled to h ||A||_2 and h ||B||_2.
inline HpOracle perturbed_oracle(const ComplexMatrix& A, const ComplexMatrix& B, double h, int digits,
                                 std::uint64_t seed) {
  const PrecisionContext ctx(digits);
  auto ra = substream(seed, "kappa-dA"), rb = substream(seed, "kappa-dB");
  ComplexMatrix dA = random_complex(A.rows(), A.cols(), ra), dB = random_complex(B.rows(), B.cols(), rb);
  dA *= cplx{h * spectral_norm(A) / spectral_norm(dA)};
  dB *= cplx{h * spectral_norm(B) / spectral_norm(dB)};
  return HpOracle(mp_add(promote(A, ctx), promote(dA, ctx)), mp_add(promote(B, ctx), promote(dB, ctx)), seed);
}

/// ||f{A+dA, B^T+dB^T}(C) - f{A,B^T}(C)|| / (h ||f{A,B^T}(C)||) from two prepared oracles.
inline double kappa_f_estimate(const BivariateFunction& f, const HpOracle& base, const HpOracle& perturbed,
                               const ComplexMatrix& C, double h = 1e-32) {
  const MpMatrix X0 = base.evaluate(f, C);
  const MpMatrix X1 = perturbed.evaluate(f, C);
  if (mp_norm_fro(X0).to_double() == 0.0) return 0.0;
  return mp_relative_difference(X1, X0) / h;
}

inline double kappa_f_estimate(const BivariateFunction& f, const ComplexMatrix& A, const ComplexMatrix& B,
                               const ComplexMatrix& C, std::uint64_t seed = kDefaultSeed, int digits = 128,
                               double h = 1e-32) {
  ::bivarfun::detail::check_dims(A, B, C, "oracle");
  return kappa_f_estimate(f, HpOracle(A, B, digits, seed, OracleSchur::Multiprecision),
                          perturbed_oracle(A, B, h, digits, seed), C, h);
}

/// Everything the experiments need per test case: the reference oracle and the
/// unperturbed and perturbed multiprecision oracles behind the kappa_f estimate.
struct CaseOracles {
  HpOracle reference, base, perturbed;
  double h;

  CaseOracles(const ComplexMatrix& A, const ComplexMatrix& B, int digits, std::uint64_t seed,
              OracleSchur reference_schur = OracleSchur::Double, double h_ = 1e-32)
      : reference(A, B, digits, seed, reference_schur),
        base(A, B, digits, seed, OracleSchur::Multiprecision),
        perturbed(perturbed_oracle(A, B, h_, digits, seed)),
        h(h_) {}
};

}  // namespace bivarfun::bench
