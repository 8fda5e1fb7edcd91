#pragma once

// Complex Schur decomposition: Householder reduction to Hessenberg form followed by
// implicit single-shift QR with Wilkinson shifts. Written once against a scalar
// policy (see scalar_ops.hpp) so the oracle can run it in multiprecision.

#include <algorithm>
#include <string>
#include <vector>

#include "bivarfun/dense/scalar_ops.hpp"

namespace bivarfun {

template <class Mat>
struct SchurFormT {
  Mat Q;  // unitary
  Mat T;  // upper triangular, A = Q T Q*
};
using SchurForm = SchurFormT<ComplexMatrix>;
using MpSchurForm = SchurFormT<MpMatrix>;

/// Plane rotation acting on rows/columns (i, i+1): G = [c s; -conj(s) c], c real.
template <class Ops>
struct GivensT {
  typename Ops::R c;
  typename Ops::S s;
  typename Ops::S r;  // G [x; y] = [r; 0]
};

struct GivensRotation {
  double c = 1.0;
  cplx s = 0.0;
  std::size_t i = 0;
};

namespace detail {

template <class Ops>
GivensT<Ops> make_givens(const Ops& ops, const typename Ops::S& x, const typename Ops::S& y) {
  using R = typename Ops::R;
  const R ax = Ops::abs(x);
  const R ay = Ops::abs(y);
  if (ay == ops.real(0.0)) return {ops.real(1.0), ops.scalar(0.0), x};
  if (ax == ops.real(0.0)) return {ops.real(0.0), ops.scalar(1.0), y};
  const R m = std::max(ax, ay);
  const R xs = ax / m, ys = ay / m;
  const R rho = m * Ops::sqrt(xs * xs + ys * ys);
  const typename Ops::S phase = Ops::scale(x, ops.real(1.0) / ax);
  return {ax / rho, Ops::scale(phase * Ops::conj(y), ops.real(1.0) / rho), Ops::scale(phase, rho)};
}

template <class Ops>
void hessenberg_reduce(const Ops& ops, typename Ops::Mat& H, typename Ops::Mat& Q) {
  using S = typename Ops::S;
  using R = typename Ops::R;
  const std::size_t n = H.rows();
  if (n < 3) return;
  std::vector<S> v(n, ops.scalar(0.0));
  std::vector<S> w(n, ops.scalar(0.0));
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t len = n - k - 1;
    bool tail_zero = true;
    for (std::size_t i = 1; i < len; ++i)
      if (!Ops::is_zero(H(k + 1 + i, k))) {
        tail_zero = false;
        break;
      }
    if (tail_zero) continue;
    R scale = ops.real(0.0);
    for (std::size_t i = 0; i < len; ++i) scale = std::max(scale, Ops::abs1(H(k + 1 + i, k)));
    const R inv_scale = ops.real(1.0) / scale;
    R nrm2 = ops.real(0.0);
    for (std::size_t i = 0; i < len; ++i) {
      v[i] = Ops::scale(H(k + 1 + i, k), inv_scale);
      nrm2 += Ops::abs2(v[i]);
    }
    const R nrm = Ops::sqrt(nrm2);
    const R a0 = Ops::abs(v[0]);
    const S phase = a0 == ops.real(0.0) ? ops.scalar(1.0) : Ops::scale(v[0], ops.real(1.0) / a0);
    const S alpha = Ops::scale(phase, -nrm);
    v[0] = Ops::scale(phase, a0 + nrm);
    const R beta = ops.real(1.0) / (nrm * (a0 + nrm));  // 2 / (v* v)

    // H <- (I - beta v v*) H on rows k+1.., columns k+1..
    for (std::size_t j = k + 1; j < n; ++j) {
      S t = ops.scalar(0.0);
      for (std::size_t i = 0; i < len; ++i) ops.fma_conj(t, v[i], H(k + 1 + i, j));
      t = Ops::scale(t, beta);
      for (std::size_t i = 0; i < len; ++i) ops.fms(H(k + 1 + i, j), v[i], t);
    }
    H(k + 1, k) = Ops::scale(alpha, scale);
    for (std::size_t i = 1; i < len; ++i) Ops::set_zero(H(k + 1 + i, k));

    // X <- X (I - beta v v*) for X = H and X = Q
    auto right = [&](typename Ops::Mat& X) {
      const std::size_t rows = X.rows();
      for (std::size_t i = 0; i < rows; ++i) Ops::set_zero(w[i]);
      for (std::size_t l = 0; l < len; ++l)
        for (std::size_t i = 0; i < rows; ++i) ops.fma(w[i], X(i, k + 1 + l), v[l]);
      for (std::size_t i = 0; i < rows; ++i) w[i] = Ops::scale(w[i], beta);
      for (std::size_t l = 0; l < len; ++l) {
        const S cv = Ops::conj(v[l]);
        for (std::size_t i = 0; i < rows; ++i) ops.fms(X(i, k + 1 + l), w[i], cv);
      }
    };
    right(H);
    right(Q);
  }
}

template <class Ops>
typename Ops::S wilkinson_shift(const Ops& ops, const typename Ops::S& a, const typename Ops::S& b,
                                const typename Ops::S& c, const typename Ops::S& d) {
  using S = typename Ops::S;
  const S t = Ops::scale(a - d, ops.real(0.5));
  const S bc = b * c;
  if (Ops::is_zero(bc)) return d;
  S disc = Ops::csqrt(t * t + bc);
  if (Ops::re(Ops::conj(t) * disc) < ops.real(0.0)) disc = ops.scalar(0.0) - disc;
  const S den = t + disc;
  if (Ops::is_zero(den)) return d;
  return d - bc / den;
}

template <class Ops>
void schur_qr(const Ops& ops, typename Ops::Mat& H, typename Ops::Mat& Q) {
  using S = typename Ops::S;
  using R = typename Ops::R;
  const std::size_t n = H.rows();
  if (n < 2) return;
  const R u = ops.unit_roundoff();
  R hnorm = ops.real(0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= std::min(j + 1, n - 1); ++i) hnorm = std::max(hnorm, Ops::abs1(H(i, j)));
  const long max_sweeps = 30L * static_cast<long>(n);
  long sweeps = 0;
  int its = 0;
  std::size_t ihi = n - 1;
  while (ihi > 0) {
    std::size_t l = ihi;
    for (; l > 0; --l) {
      const R h = Ops::abs1(H(l, l - 1));
      if (h == ops.real(0.0)) break;
      R tst = Ops::abs1(H(l - 1, l - 1)) + Ops::abs1(H(l, l));
      if (tst == ops.real(0.0)) tst = hnorm;
      if (h <= u * tst) {
        Ops::set_zero(H(l, l - 1));
        break;
      }
    }
    if (l == ihi) {
      --ihi;
      its = 0;
      continue;
    }
    if (++sweeps > max_sweeps)
      throw FactorizationError("schur: QR iteration did not converge after " + std::to_string(sweeps - 1) + " sweeps",
                               static_cast<int>(sweeps - 1));
    ++its;

    S sigma = ops.scalar(0.0);
    if (its % 10 == 0) {
      sigma = H(ihi, ihi) + ops.from_real(ops.real(0.75) * Ops::abs1(H(ihi, ihi - 1)));
    } else {
      sigma = wilkinson_shift(ops, H(ihi - 1, ihi - 1), H(ihi - 1, ihi), H(ihi, ihi - 1), H(ihi, ihi));
    }

    for (std::size_t k = l; k < ihi; ++k) {
      GivensT<Ops> g = k == l ? make_givens(ops, H(l, l) - sigma, H(l + 1, l)) : make_givens(ops, H(k, k - 1), H(k + 1, k - 1));
      if (k > l) {
        H(k, k - 1) = g.r;
        Ops::set_zero(H(k + 1, k - 1));
      }
      for (std::size_t j = k; j < n; ++j) ops.rot(H(k, j), H(k + 1, j), g.c, g.s);
      const std::size_t last = std::min(k + 2, ihi);
      for (std::size_t i = 0; i <= last; ++i) ops.rot_adj(H(i, k), H(i, k + 1), g.c, g.s);
      for (std::size_t i = 0; i < n; ++i) ops.rot_adj(Q(i, k), Q(i, k + 1), g.c, g.s);
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j + 1; i < n; ++i) Ops::set_zero(H(i, j));
}

template <class Ops>
SchurFormT<typename Ops::Mat> schur_generic(const Ops& ops, typename Ops::Mat A) {
  if (A.rows() != A.cols()) throw ArgumentError("schur: matrix must be square");
  typename Ops::Mat Q = ops.eye(A.rows());
  hessenberg_reduce(ops, A, Q);
  schur_qr(ops, A, Q);
  return {std::move(Q), std::move(A)};
}

}  // namespace detail

inline SchurForm schur(const ComplexMatrix& A) {
  if (!all_finite(A)) throw ArgumentError("schur: non-finite entries");
  return detail::schur_generic(DoubleOps{}, A);
}

/// Schur form computed entirely at the matrix's working precision.
inline MpSchurForm mp_schur(const MpMatrix& A) {
  MpOps ops(A.ctx());
  return detail::schur_generic(ops, A);
}

}  // namespace bivarfun
