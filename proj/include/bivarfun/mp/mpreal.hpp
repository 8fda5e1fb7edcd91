#pragma once

// RAII wrappers over MPFR. Each value carries its own binary precision; binary
// operators produce a result at the larger operand precision, compound
// assignments keep the precision of the left-hand side.

#include <mpfr.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "bivarfun/error.hpp"

namespace bivarfun {

/// Working precision expressed in decimal digits, u = 10^-digits.
class PrecisionContext {
public:
  static constexpr int kMinDigits = 16;
  static constexpr int kMaxDigits = 4096;

  explicit PrecisionContext(int digits = 32) : digits_(digits) {
    if (digits < kMinDigits || digits > kMaxDigits)
      throw ResourceError("PrecisionContext: digits must lie in [16, 4096], got " + std::to_string(digits));
  }

  /// Smallest context whose unit roundoff is <= 10^log10_u (clamped below at 16 digits).
  static PrecisionContext for_log10_roundoff(double log10_u) {
    if (!std::isfinite(log10_u) || -log10_u > kMaxDigits)
      throw ResourceError("requested unit roundoff 1e" + std::to_string(log10_u) + " exceeds 4096 digits");
    const int d = static_cast<int>(std::ceil(-log10_u - 1e-9));
    return PrecisionContext(d < kMinDigits ? kMinDigits : d);
  }

  int digits() const noexcept { return digits_; }
  mpfr_prec_t bits() const noexcept {
    return static_cast<mpfr_prec_t>(std::ceil(digits_ * 3.321928094887362));
  }
  double log10_unit_roundoff() const noexcept { return -static_cast<double>(digits_); }
  /// 10^-digits, or 0 when that underflows a double.
  double unit_roundoff() const noexcept { return std::pow(10.0, -static_cast<double>(digits_)); }

  bool operator==(const PrecisionContext&) const = default;
  auto operator<=>(const PrecisionContext&) const = default;

private:
  int digits_;
};

class MpReal {
public:
  explicit MpReal(mpfr_prec_t prec = 64) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  MpReal(double x, mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    mpfr_set_d(v_, x, MPFR_RNDN);
  }
  /// Decimal literal rounded to the requested precision ("0.1" is not double(0.1)).
  MpReal(std::string_view text, mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    const std::string s(text);
    if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0 && !mpfr_number_p(v_))
      throw ArgumentError("MpReal: cannot parse '" + s + "'");
  }
  MpReal(const MpReal& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  MpReal(MpReal&& o) noexcept {
    // Steal the limbs; the moved-from object is marked empty and skipped by the destructor.
    v_[0] = o.v_[0];
    o.v_[0]._mpfr_d = nullptr;
  }
  MpReal& operator=(const MpReal& o) {
    if (this != &o) {
      if (mpfr_get_prec(v_) != mpfr_get_prec(o.v_)) mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  MpReal& operator=(MpReal&& o) noexcept {
    if (this != &o) std::swap(v_[0], o.v_[0]);
    return *this;
  }
  ~MpReal() {
    if (v_[0]._mpfr_d != nullptr) mpfr_clear(v_);
  }

  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }
  mpfr_prec_t prec() const noexcept { return mpfr_get_prec(v_); }

  /// Change precision keeping the value (rounded).
  void set_prec_round(mpfr_prec_t p) { mpfr_prec_round(v_, p, MPFR_RNDN); }

  double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const noexcept { return mpfr_number_p(v_) != 0; }
  int sign() const noexcept { return mpfr_sgn(v_); }
  /// Base-2 exponent e with value = m * 2^e, 0.5 <= |m| < 1 (0 for zero).
  long exponent() const noexcept { return is_zero() ? 0 : static_cast<long>(mpfr_get_exp(v_)); }
  /// log10 |x| computed without overflow (-inf for zero).
  double log10_abs() const {
    if (is_zero()) return -INFINITY;
    long e = 0;
    const double m = mpfr_get_d_2exp(&e, v_, MPFR_RNDN);
    return std::log10(std::abs(m)) + static_cast<double>(e) * 0.30102999566398120;
  }

  std::string to_string(int digits = 20) const {
    char buf[128];
    mpfr_snprintf(buf, sizeof buf, "%.*Rg", digits, v_);
    return buf;
  }

  MpReal& operator+=(const MpReal& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  MpReal& operator-=(const MpReal& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  MpReal& operator*=(const MpReal& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  MpReal& operator/=(const MpReal& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

  friend MpReal operator-(const MpReal& a) {
    MpReal r(a.prec());
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend MpReal operator+(const MpReal& a, const MpReal& b) {
    MpReal r(std::max(a.prec(), b.prec()));
    mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend MpReal operator-(const MpReal& a, const MpReal& b) {
    MpReal r(std::max(a.prec(), b.prec()));
    mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend MpReal operator*(const MpReal& a, const MpReal& b) {
    MpReal r(std::max(a.prec(), b.prec()));
    mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend MpReal operator/(const MpReal& a, const MpReal& b) {
    MpReal r(std::max(a.prec(), b.prec()));
    mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend bool operator<(const MpReal& a, const MpReal& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator>(const MpReal& a, const MpReal& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const MpReal& a, const MpReal& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend bool operator==(const MpReal& a, const MpReal& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }

private:
  mpfr_t v_;
};

inline MpReal sqrt(const MpReal& a) {
  MpReal r(a.prec());
  mpfr_sqrt(r.get(), a.get(), MPFR_RNDN);
  return r;
}
inline MpReal abs(const MpReal& a) {
  MpReal r(a.prec());
  mpfr_abs(r.get(), a.get(), MPFR_RNDN);
  return r;
}

/// Complex number with MPFR parts of equal precision.
class MpComplex {
public:
  explicit MpComplex(mpfr_prec_t prec = 64) : re_(prec), im_(prec) {}
  MpComplex(double re, double im, mpfr_prec_t prec) : re_(re, prec), im_(im, prec) {}
  MpComplex(std::complex<double> z, mpfr_prec_t prec) : re_(z.real(), prec), im_(z.imag(), prec) {}
  MpComplex(MpReal re, MpReal im) : re_(std::move(re)), im_(std::move(im)) {
    if (re_.prec() != im_.prec()) {
      const auto p = std::max(re_.prec(), im_.prec());
      re_.set_prec_round(p);
      im_.set_prec_round(p);
    }
  }

  MpReal& re() noexcept { return re_; }
  MpReal& im() noexcept { return im_; }
  const MpReal& re() const noexcept { return re_; }
  const MpReal& im() const noexcept { return im_; }
  mpfr_prec_t prec() const noexcept { return re_.prec(); }
  void set_prec_round(mpfr_prec_t p) {
    re_.set_prec_round(p);
    im_.set_prec_round(p);
  }

  std::complex<double> to_cplx() const noexcept { return {re_.to_double(), im_.to_double()}; }
  bool is_zero() const noexcept { return re_.is_zero() && im_.is_zero(); }

  MpComplex& operator+=(const MpComplex& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  MpComplex& operator-=(const MpComplex& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  MpComplex& operator*=(const MpComplex& o) {
    MpReal t(prec());
    mpfr_fmms(t.get(), re_.get(), o.re_.get(), im_.get(), o.im_.get(), MPFR_RNDN);
    mpfr_fmma(im_.get(), re_.get(), o.im_.get(), im_.get(), o.re_.get(), MPFR_RNDN);
    re_ = std::move(t);
    return *this;
  }
  MpComplex& operator/=(const MpComplex& o) { return *this = *this / o; }

  friend MpComplex operator-(const MpComplex& a) { return MpComplex(-a.re_, -a.im_); }
  friend MpComplex operator+(const MpComplex& a, const MpComplex& b) {
    MpComplex r(std::max(a.prec(), b.prec()));
    mpfr_add(r.re_.get(), a.re_.get(), b.re_.get(), MPFR_RNDN);
    mpfr_add(r.im_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN);
    return r;
  }
  friend MpComplex operator-(const MpComplex& a, const MpComplex& b) {
    MpComplex r(std::max(a.prec(), b.prec()));
    mpfr_sub(r.re_.get(), a.re_.get(), b.re_.get(), MPFR_RNDN);
    mpfr_sub(r.im_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN);
    return r;
  }
  friend MpComplex operator*(const MpComplex& a, const MpComplex& b) {
    MpComplex r(std::max(a.prec(), b.prec()));
    mul_into(r, a, b);
    return r;
  }
  friend MpComplex operator/(const MpComplex& a, const MpComplex& b) {
    const auto p = std::max(a.prec(), b.prec());
    MpComplex r(p);
    // (a * conj b) / |b|^2 with the denominator formed by one correctly rounded fmma.
    MpReal den(p + 16);
    mpfr_fmma(den.get(), b.re_.get(), b.re_.get(), b.im_.get(), b.im_.get(), MPFR_RNDN);
    if (den.is_zero()) throw SingularityError("MpComplex: division by zero");
    MpReal nr(p + 16), ni(p + 16);
    mpfr_fmma(nr.get(), a.re_.get(), b.re_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN);
    mpfr_fmms(ni.get(), a.im_.get(), b.re_.get(), a.re_.get(), b.im_.get(), MPFR_RNDN);
    mpfr_div(r.re_.get(), nr.get(), den.get(), MPFR_RNDN);
    mpfr_div(r.im_.get(), ni.get(), den.get(), MPFR_RNDN);
    return r;
  }
  friend bool operator==(const MpComplex& a, const MpComplex& b) { return a.re_ == b.re_ && a.im_ == b.im_; }

  /// r = a * b, r keeps its own precision.
  static void mul_into(MpComplex& r, const MpComplex& a, const MpComplex& b) {
    if (&r == &a || &r == &b) {
      MpComplex t(r.prec());
      mul_into(t, a, b);
      r = std::move(t);
      return;
    }
    mpfr_fmms(r.re_.get(), a.re_.get(), b.re_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN);
    mpfr_fmma(r.im_.get(), a.re_.get(), b.im_.get(), a.im_.get(), b.re_.get(), MPFR_RNDN);
  }

  /// acc += a * b using caller-provided scratch of acc's precision.
  static void fma_into(MpComplex& acc, const MpComplex& a, const MpComplex& b, MpReal& t) {
    mpfr_fmms(t.get(), a.re_.get(), b.re_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN);
    mpfr_add(acc.re_.get(), acc.re_.get(), t.get(), MPFR_RNDN);
    mpfr_fmma(t.get(), a.re_.get(), b.im_.get(), a.im_.get(), b.re_.get(), MPFR_RNDN);
    mpfr_add(acc.im_.get(), acc.im_.get(), t.get(), MPFR_RNDN);
  }

  /// acc -= a * b.
  static void fms_into(MpComplex& acc, const MpComplex& a, const MpComplex& b, MpReal& t) {
    mpfr_fmms(t.get(), a.re_.get(), b.re_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN);
    mpfr_sub(acc.re_.get(), acc.re_.get(), t.get(), MPFR_RNDN);
    mpfr_fmma(t.get(), a.re_.get(), b.im_.get(), a.im_.get(), b.re_.get(), MPFR_RNDN);
    mpfr_sub(acc.im_.get(), acc.im_.get(), t.get(), MPFR_RNDN);
  }

private:
  MpReal re_;
  MpReal im_;
};

inline MpComplex conj(const MpComplex& z) { return MpComplex(z.re(), -z.im()); }

inline MpReal abs(const MpComplex& z) {
  MpReal r(z.prec());
  mpfr_hypot(r.get(), z.re().get(), z.im().get(), MPFR_RNDN);
  return r;
}

/// |re| + |im|, a cheap modulus surrogate within a factor sqrt(2).
inline MpReal abs1(const MpComplex& z) {
  MpReal r(z.prec());
  mpfr_abs(r.get(), z.re().get(), MPFR_RNDN);
  if (mpfr_sgn(z.im().get()) >= 0)
    mpfr_add(r.get(), r.get(), z.im().get(), MPFR_RNDN);
  else
    mpfr_sub(r.get(), r.get(), z.im().get(), MPFR_RNDN);
  return r;
}

/// Principal square root (branch cut on the negative real axis, continuous from above).
inline MpComplex sqrt(const MpComplex& z) {
  const auto p = z.prec();
  if (z.is_zero()) return MpComplex(p);
  const MpReal r = abs(z);
  MpReal t(p + 8);
  MpComplex out(p);
  if (z.re().sign() >= 0) {
    mpfr_add(t.get(), r.get(), z.re().get(), MPFR_RNDN);
    mpfr_div_2ui(t.get(), t.get(), 1, MPFR_RNDN);
    mpfr_sqrt(t.get(), t.get(), MPFR_RNDN);
    mpfr_set(out.re().get(), t.get(), MPFR_RNDN);
    mpfr_div(out.im().get(), z.im().get(), t.get(), MPFR_RNDN);
    mpfr_div_2ui(out.im().get(), out.im().get(), 1, MPFR_RNDN);
  } else {
    mpfr_sub(t.get(), r.get(), z.re().get(), MPFR_RNDN);
    mpfr_div_2ui(t.get(), t.get(), 1, MPFR_RNDN);
    mpfr_sqrt(t.get(), t.get(), MPFR_RNDN);
    mpfr_abs(out.re().get(), z.im().get(), MPFR_RNDN);
    mpfr_div(out.re().get(), out.re().get(), t.get(), MPFR_RNDN);
    mpfr_div_2ui(out.re().get(), out.re().get(), 1, MPFR_RNDN);
    mpfr_set(out.im().get(), t.get(), MPFR_RNDN);
    if (mpfr_signbit(z.im().get())) mpfr_neg(out.im().get(), out.im().get(), MPFR_RNDN);
  }
  return out;
}

inline MpComplex exp(const MpComplex& z) {
  const auto p = z.prec();
  MpReal e(p + 8), s(p + 8), c(p + 8);
  mpfr_exp(e.get(), z.re().get(), MPFR_RNDN);
  mpfr_sin_cos(s.get(), c.get(), z.im().get(), MPFR_RNDN);
  MpComplex out(p);
  mpfr_mul(out.re().get(), e.get(), c.get(), MPFR_RNDN);
  mpfr_mul(out.im().get(), e.get(), s.get(), MPFR_RNDN);
  return out;
}

/// (exp(h) - 1) / h, accurate for small |h| (value 1 at h = 0).
inline MpComplex expm1_div(const MpComplex& h) {
  const auto p = h.prec();
  const MpReal mag = abs(h);
  if (mag > MpReal(0.5, 64)) {
    MpComplex one(1.0, 0.0, p);
    return (exp(h) - one) / h;
  }
  // sum_{k>=0} h^k / (k+1)!
  MpComplex sum(1.0, 0.0, p + 16), term(1.0, 0.0, p + 16);
  MpComplex hh = h;
  hh.set_prec_round(p + 16);
  MpReal tol(1.0, 64);
  mpfr_mul_2si(tol.get(), tol.get(), -static_cast<long>(p) - 8, MPFR_RNDN);
  for (unsigned long k = 2; k < 100000; ++k) {
    term *= hh;
    mpfr_div_ui(term.re().get(), term.re().get(), k, MPFR_RNDN);
    mpfr_div_ui(term.im().get(), term.im().get(), k, MPFR_RNDN);
    sum += term;
    if (abs1(term) < tol) break;
  }
  sum.set_prec_round(p);
  return sum;
}

}  // namespace bivarfun
