#pragma once

// Arithmetic policies so the same factorization code runs on std::complex<double>
// and on MpComplex. Policies also build matrices of the right kind.

#include <cmath>
#include <complex>

#include "bivarfun/matrix.hpp"
#include "bivarfun/mp/mpmatrix.hpp"

namespace bivarfun {

struct DoubleOps {
  using S = cplx;
  using R = double;
  using Mat = ComplexMatrix;

  Mat make(std::size_t r, std::size_t c) const { return zeros(r, c); }
  Mat eye(std::size_t n) const { return identity(n); }
  R unit_roundoff() const { return 0x1p-53; }
  R real(double x) const { return x; }
  S scalar(double re, double im = 0.0) const { return {re, im}; }
  S from_real(const R& x) const { return {x, 0.0}; }
  double to_double(const R& x) const { return x; }

  static R abs(const S& z) { return std::abs(z); }
  static R abs1(const S& z) { return std::abs(z.real()) + std::abs(z.imag()); }
  static R abs2(const S& z) { return z.real() * z.real() + z.imag() * z.imag(); }
  static R sqrt(const R& x) { return std::sqrt(x); }
  static S csqrt(const S& z) { return std::sqrt(z); }
  static S conj(const S& z) { return std::conj(z); }
  static R re(const S& z) { return z.real(); }
  static bool is_zero(const S& z) { return z.real() == 0.0 && z.imag() == 0.0; }
  static void set_zero(S& z) { z = 0.0; }
  static S scale(const S& z, const R& x) { return {z.real() * x, z.imag() * x}; }

  /// acc += a * b
  void fma(S& acc, const S& a, const S& b) const {
    acc = {acc.real() + a.real() * b.real() - a.imag() * b.imag(), acc.imag() + a.real() * b.imag() + a.imag() * b.real()};
  }
  /// acc += conj(a) * b
  void fma_conj(S& acc, const S& a, const S& b) const {
    acc = {acc.real() + a.real() * b.real() + a.imag() * b.imag(), acc.imag() + a.real() * b.imag() - a.imag() * b.real()};
  }
  /// acc -= a * b
  void fms(S& acc, const S& a, const S& b) const {
    acc = {acc.real() - a.real() * b.real() + a.imag() * b.imag(), acc.imag() - a.real() * b.imag() - a.imag() * b.real()};
  }

  /// [a; b] <- [c s; -conj(s) c] [a; b]
  void rot(S& a, S& b, const R& c, const S& s) const {
    const double ar = a.real(), ai = a.imag(), br = b.real(), bi = b.imag();
    const double sr = s.real(), si = s.imag();
    a = {c * ar + sr * br - si * bi, c * ai + sr * bi + si * br};
    b = {c * br - sr * ar - si * ai, c * bi - sr * ai + si * ar};
  }
  /// (a, b) <- (a, b) [c s; -conj(s) c]^*  =  (c a + conj(s) b, -s a + c b)
  void rot_adj(S& a, S& b, const R& c, const S& s) const {
    const double ar = a.real(), ai = a.imag(), br = b.real(), bi = b.imag();
    const double sr = s.real(), si = s.imag();
    a = {c * ar + sr * br + si * bi, c * ai + sr * bi - si * br};
    b = {c * br - sr * ar + si * ai, c * bi - sr * ai - si * ar};
  }
};

/// Multiprecision policy. Holds scratch registers, so one instance per thread.
class MpOps {
public:
  using S = MpComplex;
  using R = MpReal;
  using Mat = MpMatrix;

  explicit MpOps(PrecisionContext ctx) : ctx_(ctx), t1_(ctx.bits()), t2_(ctx.bits()), t3_(ctx.bits()), t4_(ctx.bits()) {}

  const PrecisionContext& ctx() const { return ctx_; }
  Mat make(std::size_t r, std::size_t c) const { return MpMatrix(r, c, ctx_); }
  Mat eye(std::size_t n) const { return mp_identity(n, ctx_); }
  R unit_roundoff() const {
    MpReal u(1.0, ctx_.bits());
    mpfr_mul_2si(u.get(), u.get(), -static_cast<long>(ctx_.bits()), MPFR_RNDN);
    return u;
  }
  R real(double x) const { return MpReal(x, ctx_.bits()); }
  S scalar(double re, double im = 0.0) const { return MpComplex(re, im, ctx_.bits()); }
  S from_real(const R& x) const { return MpComplex(x, MpReal(ctx_.bits())); }
  double to_double(const R& x) const { return x.to_double(); }

  static R abs(const S& z) { return bivarfun::abs(z); }
  static R abs1(const S& z) { return bivarfun::abs1(z); }
  static R abs2(const S& z) {
    MpReal r(z.prec());
    mpfr_fmma(r.get(), z.re().get(), z.re().get(), z.im().get(), z.im().get(), MPFR_RNDN);
    return r;
  }
  static R sqrt(const R& x) { return bivarfun::sqrt(x); }
  static S csqrt(const S& z) { return bivarfun::sqrt(z); }
  static S conj(const S& z) { return bivarfun::conj(z); }
  static R re(const S& z) { return z.re(); }
  static bool is_zero(const S& z) { return z.is_zero(); }
  static void set_zero(S& z) {
    mpfr_set_zero(z.re().get(), 1);
    mpfr_set_zero(z.im().get(), 1);
  }
  static S scale(const S& z, const R& x) { return MpComplex(z.re() * x, z.im() * x); }

  void fma(S& acc, const S& a, const S& b) const { MpComplex::fma_into(acc, a, b, t1_); }
  void fms(S& acc, const S& a, const S& b) const { MpComplex::fms_into(acc, a, b, t1_); }
  void fma_conj(S& acc, const S& a, const S& b) const {
    // conj(a) b = (ar br + ai bi) + i (ar bi - ai br)
    mpfr_fmma(t1_.get(), a.re().get(), b.re().get(), a.im().get(), b.im().get(), MPFR_RNDN);
    mpfr_add(acc.re().get(), acc.re().get(), t1_.get(), MPFR_RNDN);
    mpfr_fmms(t1_.get(), a.re().get(), b.im().get(), a.im().get(), b.re().get(), MPFR_RNDN);
    mpfr_add(acc.im().get(), acc.im().get(), t1_.get(), MPFR_RNDN);
  }

  void rot(S& a, S& b, const R& c, const S& s) const {
    // a' = c a + s b ; b' = c b - conj(s) a
    mpfr_ptr ar = a.re().get(), ai = a.im().get(), br = b.re().get(), bi = b.im().get();
    mpfr_srcptr sr = s.re().get(), si = s.im().get(), cc = c.get();
    mpfr_fmma(t1_.get(), cc, ar, sr, br, MPFR_RNDN);
    mpfr_fms(t1_.get(), si, bi, t1_.get(), MPFR_RNDN);
    mpfr_neg(t1_.get(), t1_.get(), MPFR_RNDN);
    mpfr_fmma(t2_.get(), cc, ai, sr, bi, MPFR_RNDN);
    mpfr_fma(t2_.get(), si, br, t2_.get(), MPFR_RNDN);
    mpfr_fmms(t3_.get(), cc, br, sr, ar, MPFR_RNDN);
    mpfr_fms(t3_.get(), si, ai, t3_.get(), MPFR_RNDN);
    mpfr_neg(t3_.get(), t3_.get(), MPFR_RNDN);
    mpfr_fmms(t4_.get(), cc, bi, sr, ai, MPFR_RNDN);
    mpfr_fma(t4_.get(), si, ar, t4_.get(), MPFR_RNDN);
    mpfr_swap(ar, t1_.get());
    mpfr_swap(ai, t2_.get());
    mpfr_swap(br, t3_.get());
    mpfr_swap(bi, t4_.get());
  }
  void rot_adj(S& a, S& b, const R& c, const S& s) const {
    // a' = c a + conj(s) b ; b' = c b - s a
    mpfr_ptr ar = a.re().get(), ai = a.im().get(), br = b.re().get(), bi = b.im().get();
    mpfr_srcptr sr = s.re().get(), si = s.im().get(), cc = c.get();
    mpfr_fmma(t1_.get(), cc, ar, sr, br, MPFR_RNDN);
    mpfr_fma(t1_.get(), si, bi, t1_.get(), MPFR_RNDN);
    mpfr_fmma(t2_.get(), cc, ai, sr, bi, MPFR_RNDN);
    mpfr_fms(t2_.get(), si, br, t2_.get(), MPFR_RNDN);
    mpfr_neg(t2_.get(), t2_.get(), MPFR_RNDN);
    mpfr_fmms(t3_.get(), cc, br, sr, ar, MPFR_RNDN);
    mpfr_fma(t3_.get(), si, ai, t3_.get(), MPFR_RNDN);
    mpfr_fmms(t4_.get(), cc, bi, sr, ai, MPFR_RNDN);
    mpfr_fms(t4_.get(), si, ar, t4_.get(), MPFR_RNDN);
    mpfr_neg(t4_.get(), t4_.get(), MPFR_RNDN);
    mpfr_swap(ar, t1_.get());
    mpfr_swap(ai, t2_.get());
    mpfr_swap(br, t3_.get());
    mpfr_swap(bi, t4_.get());
  }

private:
  PrecisionContext ctx_;
  mutable MpReal t1_, t2_, t3_, t4_;
};

}  // namespace bivarfun
