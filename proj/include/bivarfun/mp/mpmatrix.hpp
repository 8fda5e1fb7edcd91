#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bivarfun/matrix.hpp"
#include "bivarfun/mp/mpreal.hpp"

namespace bivarfun {

/// Dense column-major matrix of MpComplex; every entry carries ctx().bits() bits.
class MpMatrix {
public:
  MpMatrix() = default;
  MpMatrix(std::size_t rows, std::size_t cols, PrecisionContext ctx) : rows_(rows), cols_(cols), ctx_(ctx) {
    data_.reserve(rows * cols);
    for (std::size_t k = 0; k < rows * cols; ++k) data_.emplace_back(ctx.bits());
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }
  const PrecisionContext& ctx() const noexcept { return ctx_; }
  mpfr_prec_t bits() const noexcept { return ctx_.bits(); }

  MpComplex& operator()(std::size_t i, std::size_t j) noexcept { return data_[i + j * rows_]; }
  const MpComplex& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i + j * rows_]; }

  MpMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw ArgumentError("MpMatrix::block: out of range");
    MpMatrix out;
    out.rows_ = nr;
    out.cols_ = nc;
    out.ctx_ = ctx_;
    out.data_.reserve(nr * nc);
    for (std::size_t j = 0; j < nc; ++j)
      for (std::size_t i = 0; i < nr; ++i) out.data_.push_back((*this)(r0 + i, c0 + j));
    return out;
  }

  /// Same values re-rounded to another context.
  MpMatrix with_ctx(PrecisionContext ctx) const {
    MpMatrix out = *this;
    out.ctx_ = ctx;
    for (auto& z : out.data_) z.set_prec_round(ctx.bits());
    return out;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  PrecisionContext ctx_{};
  std::vector<MpComplex> data_;
};

inline MpMatrix mp_identity(std::size_t n, PrecisionContext ctx) {
  MpMatrix I(n, n, ctx);
  for (std::size_t i = 0; i < n; ++i) mpfr_set_ui(I(i, i).re().get(), 1, MPFR_RNDN);
  return I;
}

inline MpMatrix promote(const ComplexMatrix& X, PrecisionContext ctx) {
  MpMatrix out(X.rows(), X.cols(), ctx);
  for (std::size_t j = 0; j < X.cols(); ++j)
    for (std::size_t i = 0; i < X.rows(); ++i) {
      mpfr_set_d(out(i, j).re().get(), X(i, j).real(), MPFR_RNDN);
      mpfr_set_d(out(i, j).im().get(), X(i, j).imag(), MPFR_RNDN);
    }
  return out;
}

struct DemoteResult {
  ComplexMatrix value;
  bool overflow = false;
};

inline DemoteResult demote_checked(const MpMatrix& X) {
  DemoteResult r{ComplexMatrix(X.rows(), X.cols()), false};
  for (std::size_t j = 0; j < X.cols(); ++j)
    for (std::size_t i = 0; i < X.rows(); ++i) {
      const cplx z = X(i, j).to_cplx();
      if (std::isinf(z.real()) || std::isinf(z.imag())) r.overflow = true;
      r.value(i, j) = z;
    }
  return r;
}

inline ComplexMatrix demote(const MpMatrix& X) { return demote_checked(X).value; }

namespace detail {
inline PrecisionContext pick_ctx(const MpMatrix& X, const MpMatrix& Y, const PrecisionContext* target, const char* op) {
  if (target) return *target;
  if (X.ctx() != Y.ctx())
    throw ArgumentError(std::string(op) + ": operands at " + std::to_string(X.ctx().digits()) + " and " +
                        std::to_string(Y.ctx().digits()) + " digits; name a target context");
  return X.ctx();
}
}  // namespace detail

inline MpMatrix mp_matmul(const MpMatrix& X, const MpMatrix& Y, const PrecisionContext* target = nullptr) {
  const PrecisionContext ctx = detail::pick_ctx(X, Y, target, "mp_matmul");
  if (X.cols() != Y.rows()) throw ArgumentError("mp_matmul: inner dimensions differ");
  MpMatrix Z(X.rows(), Y.cols(), ctx);
  MpReal t(ctx.bits());
  for (std::size_t j = 0; j < Y.cols(); ++j)
    for (std::size_t k = 0; k < X.cols(); ++k) {
      const MpComplex& y = Y(k, j);
      if (y.is_zero()) continue;
      for (std::size_t i = 0; i < X.rows(); ++i) MpComplex::fma_into(Z(i, j), X(i, k), y, t);
    }
  return Z;
}

inline MpMatrix mp_hadamard(const MpMatrix& X, const MpMatrix& Y, const PrecisionContext* target = nullptr) {
  const PrecisionContext ctx = detail::pick_ctx(X, Y, target, "mp_hadamard");
  if (X.rows() != Y.rows() || X.cols() != Y.cols()) throw ArgumentError("mp_hadamard: dimension mismatch");
  MpMatrix Z(X.rows(), X.cols(), ctx);
  for (std::size_t j = 0; j < X.cols(); ++j)
    for (std::size_t i = 0; i < X.rows(); ++i) MpComplex::mul_into(Z(i, j), X(i, j), Y(i, j));
  return Z;
}

inline MpMatrix mp_sub(const MpMatrix& X, const MpMatrix& Y, const PrecisionContext* target = nullptr) {
  const PrecisionContext ctx = detail::pick_ctx(X, Y, target, "mp_sub");
  if (X.rows() != Y.rows() || X.cols() != Y.cols()) throw ArgumentError("mp_sub: dimension mismatch");
  MpMatrix Z(X.rows(), X.cols(), ctx);
  for (std::size_t j = 0; j < X.cols(); ++j)
    for (std::size_t i = 0; i < X.rows(); ++i) {
      mpfr_sub(Z(i, j).re().get(), X(i, j).re().get(), Y(i, j).re().get(), MPFR_RNDN);
      mpfr_sub(Z(i, j).im().get(), X(i, j).im().get(), Y(i, j).im().get(), MPFR_RNDN);
    }
  return Z;
}

inline MpMatrix mp_add(const MpMatrix& X, const MpMatrix& Y, const PrecisionContext* target = nullptr) {
  const PrecisionContext ctx = detail::pick_ctx(X, Y, target, "mp_add");
  if (X.rows() != Y.rows() || X.cols() != Y.cols()) throw ArgumentError("mp_add: dimension mismatch");
  MpMatrix Z(X.rows(), X.cols(), ctx);
  for (std::size_t j = 0; j < X.cols(); ++j)
    for (std::size_t i = 0; i < X.rows(); ++i) {
      mpfr_add(Z(i, j).re().get(), X(i, j).re().get(), Y(i, j).re().get(), MPFR_RNDN);
      mpfr_add(Z(i, j).im().get(), X(i, j).im().get(), Y(i, j).im().get(), MPFR_RNDN);
    }
  return Z;
}

inline MpReal mp_norm_fro(const MpMatrix& X) {
  MpReal s(X.bits() + 8);
  MpReal t(X.bits() + 8);
  for (std::size_t j = 0; j < X.cols(); ++j)
    for (std::size_t i = 0; i < X.rows(); ++i) {
      mpfr_fmma(t.get(), X(i, j).re().get(), X(i, j).re().get(), X(i, j).im().get(), X(i, j).im().get(), MPFR_RNDN);
      s += t;
    }
  mpfr_sqrt(s.get(), s.get(), MPFR_RNDN);
  s.set_prec_round(X.bits());
  return s;
}

enum class Side { Left, Right };

/// Upper-triangular solve: Left gives T^{-1} B, Right gives B T^{-1}.
inline MpMatrix mp_triangular_solve(const MpMatrix& T, const MpMatrix& B, Side side,
                                    const PrecisionContext* target = nullptr) {
  const PrecisionContext ctx = detail::pick_ctx(T, B, target, "mp_triangular_solve");
  const std::size_t n = T.rows();
  if (T.rows() != T.cols()) throw ArgumentError("mp_triangular_solve: T must be square");
  MpMatrix X = B.with_ctx(ctx);
  MpReal t(ctx.bits());
  for (std::size_t i = 0; i < n; ++i)
    if (T(i, i).is_zero()) throw SingularityError("mp_triangular_solve: zero diagonal at " + std::to_string(i));
  if (side == Side::Left) {
    if (B.rows() != n) throw ArgumentError("mp_triangular_solve: dimension mismatch");
    for (std::size_t j = 0; j < X.cols(); ++j)
      for (std::size_t ii = n; ii-- > 0;) {
        MpComplex& x = X(ii, j);
        for (std::size_t k = ii + 1; k < n; ++k)
          if (!T(ii, k).is_zero()) MpComplex::fms_into(x, T(ii, k), X(k, j), t);
        x = x / T(ii, ii);
        x.set_prec_round(ctx.bits());
      }
  } else {
    if (B.cols() != n) throw ArgumentError("mp_triangular_solve: dimension mismatch");
    // x_j = (b_j - sum_{k<j} x_k T(k,j)) / T(j,j), columnwise.
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < j; ++k) {
        const MpComplex& tkj = T(k, j);
        if (tkj.is_zero()) continue;
        for (std::size_t i = 0; i < X.rows(); ++i) MpComplex::fms_into(X(i, j), X(i, k), tkj, t);
      }
      for (std::size_t i = 0; i < X.rows(); ++i) {
        X(i, j) = X(i, j) / T(j, j);
        X(i, j).set_prec_round(ctx.bits());
      }
    }
  }
  return X;
}

struct MpEigen {
  MpMatrix V;  // unit upper triangular
  MpMatrix D;  // diagonal, copied from T
};

/// Eigenvectors of an upper-triangular matrix by shifted back-substitution.
inline MpEigen mp_triangular_eig(const MpMatrix& T) {
  const std::size_t n = T.rows();
  const PrecisionContext ctx = T.ctx();
  MpEigen out{MpMatrix(n, n, ctx), MpMatrix(n, n, ctx)};
  MpReal t(ctx.bits());
  MpComplex s(ctx.bits());
  for (std::size_t j = 0; j < n; ++j) {
    out.D(j, j) = T(j, j);
    mpfr_set_ui(out.V(j, j).re().get(), 1, MPFR_RNDN);
    for (std::size_t i = j; i-- > 0;) {
      // (T(i,i) - T(j,j)) v_i = - sum_{k=i+1..j} T(i,k) v_k
      mpfr_set_zero(s.re().get(), 1);
      mpfr_set_zero(s.im().get(), 1);
      for (std::size_t k = i + 1; k <= j; ++k)
        if (!T(i, k).is_zero()) MpComplex::fma_into(s, T(i, k), out.V(k, j), t);
      const MpComplex gap = T(i, i) - T(j, j);
      if (gap.is_zero())
        throw SingularityError("mp_triangular_eig: repeated diagonal entry at (" + std::to_string(i) + ", " +
                               std::to_string(j) + "); re-perturb the matrix");
      out.V(i, j) = -(s / gap);
    }
  }
  return out;
}

/// Inverse of an upper-triangular matrix.
inline MpMatrix mp_triangular_inverse(const MpMatrix& T) {
  return mp_triangular_solve(T, mp_identity(T.rows(), T.ctx()), Side::Left);
}

}  // namespace bivarfun
