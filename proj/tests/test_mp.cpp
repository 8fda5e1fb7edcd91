#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "bivarfun/dense/schur.hpp"
#include "bivarfun/mp/mpmatrix.hpp"
#include "oracles.hpp"

using namespace bivarfun;

namespace {

MpMatrix random_mp(std::size_t m, std::size_t n, PrecisionContext ctx, std::mt19937_64& rng) {
  return promote(oracle::gaussian(m, n, rng), ctx);
}

double mp_fro(const MpMatrix& X) { return mp_norm_fro(X).to_double(); }

MpMatrix perturbed_upper(std::size_t n, PrecisionContext ctx, std::mt19937_64& rng) {
  ComplexMatrix T = oracle::upper(n, rng);
  for (std::size_t i = 0; i < n; ++i) T(i, i) = cplx(static_cast<double>(i), 0.5 * static_cast<double>(i % 3));
  return promote(T, ctx);
}

}  // namespace

TEST(Precision, DigitRange) {
  EXPECT_THROW(PrecisionContext(15), ResourceError);
  EXPECT_THROW(PrecisionContext(4097), ResourceError);
  EXPECT_NO_THROW(PrecisionContext(16));
  EXPECT_NO_THROW(PrecisionContext(4096));
  EXPECT_THROW(PrecisionContext::for_log10_roundoff(-5000), ResourceError);
}

TEST(Precision, MonotoneRoundoff) {
  double last = 0.0;
  for (int d = 16; d <= 4096; d += 37) {
    const PrecisionContext c(d);
    EXPECT_LE(c.log10_unit_roundoff(), last);
    last = c.log10_unit_roundoff();
    EXPECT_GE(static_cast<double>(c.bits()) * 0.30102999566398120, d - 1e-9);
  }
  EXPECT_EQ(PrecisionContext::for_log10_roundoff(-3).digits(), 16);
  EXPECT_EQ(PrecisionContext::for_log10_roundoff(-40.5).digits(), 41);
}

TEST(MpMatrixTest, IdentityEntriesExact) {
  const MpMatrix I = mp_identity(2, PrecisionContext(64));
  EXPECT_EQ(mpfr_cmp_ui(I(0, 0).re().get(), 1), 0);
  EXPECT_TRUE(I(0, 1).is_zero());
  EXPECT_TRUE(I(1, 0).is_zero());
  EXPECT_EQ(mpfr_cmp_ui(I(1, 1).re().get(), 1), 0);
}

TEST(MpMatrixTest, PromoteDemoteIsBitwiseIdentity) {
  std::mt19937_64 rng(1);
  ComplexMatrix X = oracle::gaussian(5, 4, rng, 1e10);
  X(0, 0) = cplx(4.9e-324, -1.7976931348623157e308);
  X(1, 0) = cplx(-0.0, 0.1);
  const ComplexMatrix Y = demote(promote(X, PrecisionContext(16)));
  EXPECT_EQ(std::memcmp(X.data(), Y.data(), X.values().size() * sizeof(cplx)), 0);
}

TEST(MpMatrixTest, BinaryVersusDecimalTenth) {
  const PrecisionContext c(64);
  const MpMatrix X = promote(ComplexMatrix(1, 1, 0.1), c);
  MpReal tenth(c.bits());
  mpfr_set_ui(tenth.get(), 1, MPFR_RNDN);
  mpfr_div_ui(tenth.get(), tenth.get(), 10, MPFR_RNDN);
  const MpReal d = X(0, 0).re() - tenth;
  EXPECT_FALSE(d.is_zero());
  EXPECT_NEAR(d.to_double(), 5.551115123125783e-18, 1e-30);
}

TEST(MpMatrixTest, DemoteSmallIntegersAndOverflow) {
  const PrecisionContext c(40);
  MpMatrix X(1, 2, c);
  mpfr_set_si(X(0, 0).re().get(), -7, MPFR_RNDN);
  mpfr_set_str(X(0, 1).re().get(), "1e400", 10, MPFR_RNDN);
  const DemoteResult r = demote_checked(X);
  EXPECT_EQ(r.value(0, 0), cplx(-7.0));
  EXPECT_TRUE(r.overflow);
}

TEST(MpMatrixTest, PiRoundsToNearestDouble) {
  const PrecisionContext c(64);
  MpMatrix X(1, 1, c);
  mpfr_const_pi(X(0, 0).re().get(), MPFR_RNDN);
  const double p = demote(X)(0, 0).real();
  EXPECT_LE(std::abs(p - 3.141592653589793), 0x1p-53 * 3.141592653589793);
}

TEST(MpMatrixTest, IdentityTimesMatrixExact) {
  std::mt19937_64 rng(2);
  for (int d : {16, 64, 300}) {
    const PrecisionContext c(d);
    const MpMatrix M = random_mp(4, 4, c, rng);
    const MpMatrix P = mp_matmul(mp_identity(4, c), M);
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(P(i, j) == M(i, j));
  }
}

TEST(MpMatrixTest, OneThirdTimesThree) {
  const PrecisionContext c(128);
  MpReal third(c.bits());
  mpfr_set_ui(third.get(), 1, MPFR_RNDN);
  mpfr_div_ui(third.get(), third.get(), 3, MPFR_RNDN);
  MpReal r = third * MpReal(3.0, c.bits()) - MpReal(1.0, c.bits());
  EXPECT_LE(r.log10_abs(), -127.0);
}

TEST(MpMatrixTest, MixedPrecisionNeedsTarget) {
  std::mt19937_64 rng(3);
  const MpMatrix X = random_mp(2, 2, PrecisionContext(20), rng), Y = random_mp(2, 2, PrecisionContext(40), rng);
  EXPECT_THROW(mp_matmul(X, Y), ArgumentError);
  const PrecisionContext t(40);
  EXPECT_EQ(mp_matmul(X, Y, &t).ctx(), t);
}

TEST(MpMatrixTest, TriangularSolveResidual) {
  std::mt19937_64 rng(4);
  const PrecisionContext c(64);
  ComplexMatrix Td = oracle::upper(8, rng);
  for (std::size_t i = 0; i < 8; ++i) Td(i, i) += 3.0;
  const MpMatrix T = promote(Td, c), B = random_mp(8, 3, c, rng), Br = random_mp(3, 8, c, rng);
  const MpMatrix X = mp_triangular_solve(T, B, Side::Left);
  const double scale = mp_fro(T) * mp_fro(X) + mp_fro(B);
  EXPECT_LE(mp_norm_fro(mp_sub(mp_matmul(T, X), B)).log10_abs(), -60 + std::log10(scale));
  const MpMatrix Y = mp_triangular_solve(T, Br, Side::Right);
  EXPECT_LE(mp_norm_fro(mp_sub(mp_matmul(Y, T), Br)).log10_abs(), -60 + std::log10(mp_fro(T) * mp_fro(Y)));
}

TEST(MpMatrixTest, TriangularEigOfDiagonal) {
  const std::vector<cplx> d = {1.0, cplx(2, 1), -3.0};
  const MpEigen e = mp_triangular_eig(promote(diagonal(d), PrecisionContext(32)));
  EXPECT_EQ(demote(e.V), identity(3));
  EXPECT_EQ(demote(e.D), diagonal(d));
}

TEST(MpMatrixTest, TriangularEigTwoByTwo) {
  ComplexMatrix T(2, 2);
  T(0, 0) = 1.0;
  T(0, 1) = 1.0;
  T(1, 1) = 2.0;
  const MpEigen e = mp_triangular_eig(promote(T, PrecisionContext(32)));
  ComplexMatrix V(2, 2);
  V(0, 0) = 1.0;
  V(0, 1) = 1.0;
  V(1, 1) = 1.0;
  EXPECT_EQ(demote(e.V), V);
}

TEST(MpMatrixTest, TriangularEigResidualAndColumnSystems) {
  std::mt19937_64 rng(5);
  for (int d : {32, 80}) {
    const PrecisionContext c(d);
    const MpMatrix T = perturbed_upper(16, c, rng);
    const MpEigen e = mp_triangular_eig(T);
    const double res = mp_norm_fro(mp_sub(mp_matmul(T, e.V), mp_matmul(e.V, e.D))).log10_abs();
    EXPECT_LE(res, -(d - 4) + std::log10(mp_fro(T) * mp_fro(e.V))) << d;
    // column j solves the leading (j+1) x (j+1) shifted system
    for (std::size_t j = 0; j < 16; j += 5) {
      const MpMatrix Tj = T.block(0, 0, j + 1, j + 1);
      MpMatrix shifted = Tj;
      for (std::size_t i = 0; i <= j; ++i) shifted(i, i) = Tj(i, i) - T(j, j);
      const MpMatrix v = e.V.block(0, j, j + 1, 1);
      EXPECT_LE(mp_norm_fro(mp_matmul(shifted, v)).log10_abs(), -(d - 4) + std::log10(mp_fro(Tj) * mp_fro(v) + 1));
    }
  }
}

TEST(MpMatrixTest, RepeatedEigenvalueThrows) {
  EXPECT_THROW(mp_triangular_eig(promote(identity(2), PrecisionContext(32))), SingularityError);
}

TEST(MpMatrixTest, MoreDigitsNeverWorse) {
  std::mt19937_64 rng(6);
  const ComplexMatrix Td = [&] {
    ComplexMatrix T = oracle::upper(10, rng);
    for (std::size_t i = 0; i < 10; ++i) T(i, i) = cplx(1.0 + 0.1 * static_cast<double>(i), 0.0);
    return T;
  }();
  double last = 0.0;
  for (int d : {20, 40, 80, 160}) {
    const MpMatrix T = promote(Td, PrecisionContext(d));
    const MpEigen e = mp_triangular_eig(T);
    const double res = mp_norm_fro(mp_sub(mp_matmul(T, e.V), mp_matmul(e.V, e.D))).log10_abs();
    if (d > 20) EXPECT_LE(res, last + 1e-9);
    last = res;
  }
}

TEST(MpSchur, ReconstructionAtSixtyFourDigits) {
  std::mt19937_64 rng(7);
  const PrecisionContext c(64);
  const MpMatrix A = random_mp(10, 10, c, rng);
  const MpSchurForm S = mp_schur(A);
  for (std::size_t j = 0; j < 10; ++j)
    for (std::size_t i = j + 1; i < 10; ++i) EXPECT_TRUE(S.T(i, j).is_zero());
  MpMatrix Qh(10, 10, c);
  for (std::size_t j = 0; j < 10; ++j)
    for (std::size_t i = 0; i < 10; ++i) Qh(j, i) = conj(S.Q(i, j));
  EXPECT_LE(mp_norm_fro(mp_sub(mp_matmul(mp_matmul(S.Q, S.T), Qh), A)).log10_abs(), -60.0);
  EXPECT_LE(mp_norm_fro(mp_sub(mp_matmul(Qh, S.Q), mp_identity(10, c))).log10_abs(), -60.0);
  // eigenvalues agree with the double Schur form
  const SchurForm Sd = schur(demote(A));
  std::vector<cplx> a = diag_of(Sd.T), b = diag_of(demote(S.T));
  auto key = [](cplx z) { return std::pair{z.real(), z.imag()}; };
  std::sort(a.begin(), a.end(), [&](cplx x, cplx y) { return key(x) < key(y); });
  std::sort(b.begin(), b.end(), [&](cplx x, cplx y) { return key(x) < key(y); });
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(std::abs(a[i] - b[i]), 0.0, 1e-12);
}

TEST(MpScalar, Functions) {
  const mpfr_prec_t p = PrecisionContext(50).bits();
  const MpComplex z(-4.0, 0.0, p);
  const MpComplex r = sqrt(z);
  EXPECT_NEAR(r.re().to_double(), 0.0, 1e-40);
  EXPECT_NEAR(r.im().to_double(), 2.0, 1e-40);
  const MpComplex e = exp(MpComplex(0.0, std::acos(-1.0), p));
  EXPECT_NEAR(e.re().to_double(), -1.0, 1e-15);
  EXPECT_NEAR(abs(MpComplex(3.0, 4.0, p)).to_double(), 5.0, 1e-40);
}
