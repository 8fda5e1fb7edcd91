#include <gtest/gtest.h>

#include <random>

#include "bivarfun/bench/gallery.hpp"
#include "bivarfun/bivarfun.hpp"
#include "criteria.hpp"
#include "oracles.hpp"
#include "trials.hpp"

using namespace bivarfun;

namespace {

ComplexMatrix mat(std::initializer_list<std::initializer_list<cplx>> rows) {
  ComplexMatrix X(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (const cplx& v : r) X(i, j++) = v;
    ++i;
  }
  return X;
}

BivariateFunction product() {
  BivariateFunction f("x*y", [](cplx x, cplx y) { return x * y; });
  f.with_conj_symmetric(true);
  return f;
}

BivariateFunction affine() {
  BivariateFunction f("x+y", [](cplx x, cplx y) { return x + y; });
  f.with_taylor(
      [](cplx x, cplx y, int k) {
        TaylorTable t(k);
        t(0, 0) = x + y;
        if (k >= 1) t(1, 0) = t(0, 1) = 1.0;
        return t;
      },
      200);
  return f;
}

Partition singletons(std::size_t n) {
  Partition P;
  for (std::size_t i = 0; i < n; ++i) {
    P.blocks.push_back({i});
    P.permutation.push_back(i);
  }
  return P;
}

PartitionTree tree_for(const ComplexMatrix& T, SplitStrategy s = SplitStrategy::Balanced) {
  SylvesterOptions so;
  so.allow_merge = false;
  return precompute_sylvesters(T, build_tree(singletons(T.rows()), s), so);
}

// Well-conditioned similarity: I + 0.1 G / ||G||.
ComplexMatrix near_identity(std::size_t n, std::mt19937_64& rng) {
  ComplexMatrix G = oracle::gaussian(n, n, rng);
  const double s = spectral_norm(G);
  for (auto& v : G.values()) v *= 0.3 / s;
  return identity(n) + G;
}

ComplexMatrix nonnormal(std::size_t n, std::mt19937_64& rng, double shift) {
  ComplexMatrix A = oracle::gaussian(n, n, rng, 1.0 / std::sqrt(static_cast<double>(n)));
  for (std::size_t i = 0; i < n; ++i) A(i, i) += shift;
  for (std::size_t i = 0; i + 1 < n; ++i) A(i, i + 1) += 0.5;
  return A;
}

}  // namespace

// ---- diagonal fast paths

TEST(Fun2Diag, ScalarExample) {
  EXPECT_EQ(fun2_diag(f1(), mat({{1.0}}), mat({{2.0}}), mat({{3.0}})), mat({{1.0}}));
}

TEST(Fun2Diag, ProductOnDiagonals) {
  const std::vector<cplx> a = {1.0, 2.0}, b = {3.0, 4.0};
  const ComplexMatrix X = fun2_diag(product(), diagonal(a), diagonal(b), mat({{1.0, 1.0}, {1.0, 1.0}}));
  EXPECT_LE(oracle::rel_fro(X, mat({{3.0, 4.0}, {6.0, 8.0}})), 1e-15);
}

TEST(Fun2Diag, NormalInputsMatchSchurPath) {
  std::mt19937_64 rng(1);
  auto normal = [&](std::size_t n) {
    const ComplexMatrix Q = qr_unitary(oracle::gaussian(n, n, rng));
    std::vector<cplx> d(n);
    for (auto& v : d) v = cplx(2.0, 0.0) + oracle::gaussian(1, 1, rng)(0, 0) * 0.5;
    return matmul(Q, diagonal(d), adjoint(Q));
  };
  const ComplexMatrix A = normal(10), B = normal(10), C = oracle::gaussian(10, 10, rng);
  const auto f = inv_sqrt_sum();
  EvalOptions o;
  o.normal_fast_paths = false;
  const ComplexMatrix X = fun2_diag(f, A, B, C);
  const Fun2mResult r = fun2m(f, A, B, C, o);
  EXPECT_EQ(r.report.path, "schur");
  EXPECT_LE(spectral_norm(X - r.value), 1e-12 * spectral_norm(X));
  EXPECT_EQ(fun2m(f, A, B, C).report.path, "diag");
}

TEST(Fun2Diag, SingularValueNamesThePoint) {
  try {
    fun2_diag(f1(), mat({{1.0}}), mat({{-1.0}}), mat({{1.0}}));
    FAIL();
  } catch (const AnalyticityError& e) {
    EXPECT_NE(std::string(e.what()).find("f1"), std::string::npos);
  }
}

TEST(Fun2DiagB, NilpotentExponential) {
  const ComplexMatrix A = mat({{0.0, 1.0}, {0.0, 0.0}});
  const ComplexMatrix X = fun2_diagB(f3h("exp"), A, zeros(2, 2), identity(2));
  EXPECT_LE(oracle::rel_fro(X, mat({{1.0, 1.0}, {0.0, 1.0}})), 1e-15);
  EvalReport rep;
  EXPECT_LE(oracle::rel_fro(fun2m(f3h("exp"), A, zeros(2, 2), identity(2), {}, rep), mat({{1.0, 1.0}, {0.0, 1.0}})),
            1e-15);
  EXPECT_EQ(rep.path, "diagB");
}

TEST(Fun2DiagA, IdentityGivesShiftedSylvester) {
  std::mt19937_64 rng(2);
  const ComplexMatrix B = oracle::stable(6, rng);
  const ComplexMatrix C = oracle::gaussian(6, 6, rng);
  const ComplexMatrix X = fun2_diagA(f1(), identity(6), B, C);
  EXPECT_LE(oracle::rel_fro(X, sylvester_bartels_stewart(identity(6), transpose(B), C)), 1e-12);
}

TEST(Fun2DiagA, FunctionOfXOnlyAtZero) {
  std::mt19937_64 rng(3);
  const BivariateFunction fx("x", [](cplx x, cplx) { return x; });
  const ComplexMatrix X = fun2_diagA(fx, zeros(1, 1), nonnormal(5, rng, 1.0), oracle::gaussian(1, 5, rng));
  EXPECT_EQ(frobenius_norm(X), 0.0);
}

TEST(Fun2DiagAB, MatchFullPathOnMixedNormality) {
  std::mt19937_64 rng(4);
  const ComplexMatrix Q = qr_unitary(oracle::gaussian(7, 7, rng));
  std::vector<cplx> d = {1.0, 1.5, 2.0, cplx(2, 1), 3.0, cplx(1, -1), 2.5};
  const ComplexMatrix N = matmul(Q, diagonal(d), adjoint(Q));
  const ComplexMatrix M = nonnormal(5, rng, 2.0);
  const auto f = exp_sqrt_sum();
  EvalOptions full;
  full.normal_fast_paths = false;
  {
    const ComplexMatrix C = oracle::gaussian(7, 5, rng);
    EvalReport rep;
    const ComplexMatrix X = fun2m(f, N, M, C, {}, rep);
    EXPECT_EQ(rep.path, "diagA");
    EXPECT_LE(oracle::rel_fro(X, fun2m(f, N, M, C, full).value), 1e-12);
  }
  {
    const ComplexMatrix C = oracle::gaussian(5, 7, rng);
    EvalReport rep;
    const ComplexMatrix X = fun2m(f, M, N, C, {}, rep);
    EXPECT_EQ(rep.path, "diagB");
    EXPECT_LE(oracle::rel_fro(X, fun2m(f, M, N, C, full).value), 1e-12);
  }
}

// ---- driver

TEST(Fun2m, OneByOne) {
  const Fun2mResult r = fun2m(sqrt_sum(), mat({{2.0}}), mat({{2.0}}), mat({{3.0}}));
  EXPECT_EQ(r.value, mat({{6.0}}));
  EXPECT_EQ(r.report.max_digits, 16);
}

TEST(Fun2m, EmptyInputs) {
  EXPECT_EQ(fun2m(f1(), zeros(0, 0), identity(2), zeros(0, 2)).value.rows(), 0u);
}

TEST(Fun2m, DimensionMismatch) {
  EXPECT_THROW(fun2m(f1(), identity(2), identity(3), identity(2)), ArgumentError);
  EXPECT_THROW(fun2m(f1(), zeros(2, 3), identity(3), zeros(2, 3)), ArgumentError);
}

TEST(Fun2m, OptionValidation) {
  EvalOptions o;
  o.delta1 = 0.2;
  EXPECT_THROW(fun2m(f1(), identity(2), identity(2), identity(2), o), ArgumentError);
  o = {};
  o.epsilon = 0.0;
  EXPECT_THROW(fun2m(f1(), identity(2), identity(2), identity(2), o), ArgumentError);
  o = {};
  o.n_min = 0;
  EXPECT_THROW(fun2m(f1(), identity(2), identity(2), identity(2), o), ArgumentError);
}

TEST(Fun2m, SylvesterSixteen) {
  std::mt19937_64 rng(5);
  const ComplexMatrix A = oracle::stable(16, rng), B = oracle::stable(16, rng), C = oracle::gaussian(16, 16, rng);
  for (AtomMethod m : {AtomMethod::Diag, AtomMethod::Taylor}) {
    EvalOptions o;
    o.atom_method = m;
    const ComplexMatrix X = fun2m(f1(), A, B, C, o).value;
    EXPECT_LE(oracle::rel_fro(X, sylvester_bartels_stewart(A, transpose(B), C)), 1e-11) << to_string(m);
  }
}

TEST(Fun2m, SeparableExponential) {
  std::mt19937_64 rng(6);
  const ComplexMatrix A = nonnormal(12, rng, 0.0), B = nonnormal(12, rng, 0.5), C = oracle::gaussian(12, 12, rng);
  const ComplexMatrix R = oracle::naive_matmul(oracle::naive_matmul(oracle::expm(A), C), oracle::expm(transpose(B)));
  for (AtomMethod m : {AtomMethod::Diag, AtomMethod::Taylor}) {
    EvalOptions o;
    o.atom_method = m;
    EXPECT_LE(oracle::rel_fro(fun2m(f3h("exp"), A, B, C, o).value, R), 1e-11) << to_string(m);
  }
}

TEST(Fun2m, SylvesterCriterion) {
  const auto o = criteria::sylvester(11);
  EXPECT_TRUE(o.pass) << o.detail;
}

TEST(Fun2m, SeparableCriterion) {
  const auto o = criteria::separable(12);
  EXPECT_TRUE(o.pass) << o.detail;
}

TEST(Fun2m, FrechetDerivative) {
  const auto o = criteria::frechet(13, 6);
  EXPECT_TRUE(o.pass) << o.detail;
  const auto o8 = criteria::frechet(14, 8);
  EXPECT_TRUE(o8.pass) << o8.detail;
}

TEST(Fun2m, KroneckerSum) {
  const auto o = criteria::kronecker(15);
  EXPECT_TRUE(o.pass) << o.detail;
}

TEST(Fun2m, InvariantCriterion) {
  const auto o = criteria::invariants(17);
  EXPECT_TRUE(o.pass) << o.detail;
}

TEST(Fun2m, SimilarityCovariance) {
  std::mt19937_64 rng(7);
  for (const char* name : {"inv_sqrt_sum", "exp_over_sum", "f2g:sqrt"}) {
    const auto f = builtin_function(name);
    const ComplexMatrix A = nonnormal(9, rng, 2.0), B = nonnormal(7, rng, 2.5);
    const ComplexMatrix C = oracle::gaussian(9, 7, rng);
    const ComplexMatrix SA = near_identity(9, rng), SB = near_identity(7, rng);
    ASSERT_LE(spectral_norm(SA) * spectral_norm(inverse(SA)), 10.0);
    const ComplexMatrix A2 = matmul(SA, A, inverse(SA)), B2 = matmul(SB, B, inverse(SB));
    const ComplexMatrix X = fun2m(f, A, B, C).value;
    const ComplexMatrix Y = fun2m(f, A2, B2, matmul(SA, C, transpose(SB))).value;
    EXPECT_LE(oracle::rel_fro(Y, matmul(SA, X, transpose(SB))), 1e-9) << name;
  }
}

TEST(Fun2m, LinearInC) {
  std::mt19937_64 rng(8);
  const auto f = exp_sqrt_sum();
  const ComplexMatrix A = nonnormal(10, rng, 2.0), B = nonnormal(10, rng, 2.0);
  const ComplexMatrix C1 = oracle::gaussian(10, 10, rng), C2 = oracle::gaussian(10, 10, rng);
  const cplx alpha(0.7, -1.3);
  for (AtomMethod m : {AtomMethod::Diag, AtomMethod::Taylor}) {
    EvalOptions o;
    o.atom_method = m;
    const ComplexMatrix L = fun2m(f, A, B, alpha * C1 + C2, o).value;
    const ComplexMatrix R = alpha * fun2m(f, A, B, C1, o).value + fun2m(f, A, B, C2, o).value;
    EXPECT_LE(oracle::rel_fro(L, R), 1e-12) << to_string(m);
  }
}

TEST(Fun2m, StrategyInvarianceOnGallery) {
  for (const char* name : {"rand-eig", "randn", "grcar", "kahan"}) {
    const bench::GalleryPair p = bench::generate({name, 24, 3});
    const ComplexMatrix C = bench::random_rhs(24, 24, 3);
    const auto f = exp_over_sum();
    const BivariateFunction g = std::string(name) == "randn" ? f3h("exp") : f;
    EvalOptions a, b;
    b.strategy = SplitStrategy::Single;
    const ComplexMatrix X = fun2m(g, p.A, p.B, C, a).value;
    const ComplexMatrix Y = fun2m(g, p.A, p.B, C, b).value;
    EXPECT_LE(oracle::rel_fro(X, Y), 1e-11) << name;
  }
}

TEST(Fun2m, AtomAndLeafSizeInvariance) {
  std::mt19937_64 rng(9);
  const ComplexMatrix A = nonnormal(20, rng, 2.0), B = nonnormal(15, rng, 3.0), C = oracle::gaussian(20, 15, rng);
  const auto f = inv_sqrt_sum();
  const ComplexMatrix X = fun2m(f, A, B, C).value;
  for (std::size_t nmin : {1u, 2u, 8u, 64u}) {
    EvalOptions o;
    o.n_min = nmin;
    EXPECT_LE(oracle::rel_fro(fun2m(f, A, B, C, o).value, X), 1e-12) << nmin;
  }
  EvalOptions t;
  t.atom_method = AtomMethod::Taylor;
  EXPECT_LE(oracle::rel_fro(fun2m(f, A, B, C, t).value, X), 1e-12);
}

TEST(Fun2m, ReportCounts) {
  std::mt19937_64 rng(10);
  const ComplexMatrix A = nonnormal(12, rng, 2.0), B = nonnormal(12, rng, 2.0), C = oracle::gaussian(12, 12, rng);
  const Fun2mResult r = fun2m(sqrt_sum(), A, B, C);
  EXPECT_EQ(r.report.path, "schur");
  EXPECT_GE(r.report.n_blocks_A, 1u);
  EXPECT_GE(r.report.n_blocks_B, 1u);
  EXPECT_GE(r.report.max_digits, 16);
  EXPECT_GT(r.report.wall_time, 0.0);
  EvalOptions t;
  t.atom_method = AtomMethod::Taylor;
  EXPECT_GE(fun2m(sqrt_sum(), A, B, C, t).report.max_taylor_degree, 0);
}

TEST(Fun2m, ReportFilledOnFailure) {
  const ComplexMatrix A = mat({{-1.0, 1.0}, {0.0, 1.0}});
  EvalReport rep;
  EXPECT_THROW(fun2m(sqrt_sum(), A, A, identity(2), {}, rep), AnalyticityError);
  EXPECT_EQ(rep.path, "schur");
}

TEST(Fun2m, NearlyDefectiveMergesUnderDiag) {
  const bench::GalleryPair p = bench::generate({"jordbloc", 16, 1});
  const ComplexMatrix C = bench::random_rhs(16, 16, 1);
  const Fun2mResult r = fun2m(sqrt_sum(), p.A, p.B, C);
  EXPECT_GT(r.report.max_digits, 16);
  EXPECT_TRUE(all_finite(r.value));
}

// ---- recursion on triangular inputs

TEST(Fun2mRec, LeavesEqualAtom) {
  std::mt19937_64 rng(12);
  const ComplexMatrix A = trials::clustered_triangular(4, 1.0, 0.05, rng);
  const ComplexMatrix B = trials::clustered_triangular(3, 1.2, 0.05, rng);
  const ComplexMatrix C = oracle::gaussian(4, 3, rng);
  Partition PA, PB;
  PA.blocks = {{0, 1, 2, 3}};
  PA.permutation = {0, 1, 2, 3};
  PB.blocks = {{0, 1, 2}};
  PB.permutation = {0, 1, 2};
  const PartitionTree ta = build_tree(PA, SplitStrategy::Balanced), tb = build_tree(PB, SplitStrategy::Balanced);
  EvalOptions o;
  o.atom_method = AtomMethod::Taylor;
  EXPECT_EQ(fun2m_rec(sqrt_sum(), A, B, C, ta, tb, o), fun2_atom_taylor(sqrt_sum(), A, B, C, o.epsilon));
}

TEST(Fun2mRec, TwoByTwoMatchesClosedForm) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 20; ++t) {
    ComplexMatrix A = oracle::upper(2, rng), B = oracle::upper(2, rng);
    A(0, 0) += 3.0;
    A(1, 1) += 4.5;
    B(0, 0) += 2.0;
    B(1, 1) += 5.0;
    const ComplexMatrix C = oracle::gaussian(2, 2, rng);
    for (const char* name : {"f1", "inv_sqrt_sum", "exp_sqrt_sum"}) {
      const auto f = builtin_function(name);
      const ComplexMatrix X = fun2m_rec(f, A, B, C, tree_for(A), tree_for(B));
      EXPECT_LE(oracle::rel_fro(X, corollary_2x2(f, A, B, C)), 1e-13) << name;
      EXPECT_LE(oracle::rel_fro(X, oracle::tri_fun2(f, A, B, C)), 1e-13) << name;
    }
  }
}

TEST(Fun2mRec, EightByEightStrategyInvariance) {
  std::mt19937_64 rng(14);
  ComplexMatrix A = oracle::upper(8, rng, 0.5), B = oracle::upper(8, rng, 0.5);
  for (std::size_t i = 0; i < 8; ++i) {
    A(i, i) = cplx(2.0 + 0.4 * static_cast<double>(i), 0.1);
    B(i, i) = cplx(3.0 - 0.3 * static_cast<double>(i), -0.2);
  }
  const ComplexMatrix C = oracle::gaussian(8, 8, rng);
  const auto f = inv_sqrt_sum();
  const ComplexMatrix X = fun2m_rec(f, A, B, C, tree_for(A), tree_for(B));
  const ComplexMatrix Y =
      fun2m_rec(f, A, B, C, tree_for(A, SplitStrategy::Single), tree_for(B, SplitStrategy::Single));
  EXPECT_LE(oracle::rel_fro(X, Y), 1e-12);
  EXPECT_LE(oracle::rel_fro(X, oracle::tri_fun2(f, A, B, C)), 1e-12);
  // one side left unsplit
  Partition whole;
  whole.blocks = {{0, 1, 2, 3, 4, 5, 6, 7}};
  whole.permutation = {0, 1, 2, 3, 4, 5, 6, 7};
  const ComplexMatrix Z = fun2m_rec(f, A, B, C, tree_for(A), build_tree(whole, SplitStrategy::Balanced));
  EXPECT_LE(oracle::rel_fro(X, Z), 1e-12);
}

TEST(Fun2mRec, RejectsNonTriangular) {
  std::mt19937_64 rng(15);
  const ComplexMatrix A = oracle::gaussian(2, 2, rng);
  const ComplexMatrix D = diagonal(std::vector<cplx>{1.0, 2.0});
  EXPECT_THROW(fun2m_rec(f1(), A, D, identity(2), tree_for(D), tree_for(D)), ArgumentError);
}

// ---- 2x2 closed form

TEST(Closed2x2, DiagonalIsHadamard) {
  const std::vector<cplx> a = {1.0, 2.0}, b = {3.0, 5.0};
  const ComplexMatrix C = mat({{1.0, 2.0}, {3.0, 4.0}});
  const ComplexMatrix X = corollary_2x2(f1(), diagonal(a), diagonal(b), C);
  EXPECT_LE(oracle::rel_fro(X, mat({{0.25, 2.0 / 6.0}, {3.0 / 5.0, 4.0 / 7.0}})), 1e-15);
}

TEST(Closed2x2, AffineExample) {
  const ComplexMatrix X =
      corollary_2x2(affine(), mat({{1.0, 1.0}, {0.0, 2.0}}), zeros(2, 2), mat({{1.0, 1.0}, {1.0, 1.0}}));
  EXPECT_LE(oracle::rel_fro(X, mat({{2.0, 2.0}, {2.0, 2.0}})), 1e-15);
}

TEST(Closed2x2, MatchesSylvester) {
  std::mt19937_64 rng(16);
  for (int t = 0; t < 20; ++t) {
    ComplexMatrix A = oracle::upper(2, rng), B = oracle::upper(2, rng);
    for (std::size_t i = 0; i < 2; ++i) {
      A(i, i) += 3.0;
      B(i, i) += 3.0;
    }
    const ComplexMatrix C = oracle::gaussian(2, 2, rng);
    EXPECT_LE(oracle::rel_fro(corollary_2x2(f1(), A, B, C), sylvester_bartels_stewart(A, B, C)), 1e-12);
  }
}

TEST(Closed2x2, ConfluentUsesDerivatives) {
  const ComplexMatrix A = mat({{1.0, 1.0}, {0.0, 1.0}}), B = mat({{2.0, 0.5}, {0.0, 2.0}});
  const ComplexMatrix C = mat({{1.0, -1.0}, {2.0, 0.5}});
  EXPECT_LE(oracle::rel_fro(corollary_2x2(f1(), A, B, C), sylvester_bartels_stewart(A, B, C)), 1e-13);
  const BivariateFunction plain("plain", [](cplx x, cplx y) { return 1.0 / (x + y); });
  EXPECT_THROW(corollary_2x2(plain, A, B, C), DerivativeRequiredError);
  EXPECT_THROW(corollary_2x2(f1(), A, B, C, false), DerivativeRequiredError);
}

TEST(Closed2x2, ShapeErrors) {
  EXPECT_THROW(corollary_2x2(f1(), identity(3), identity(2), identity(2)), ArgumentError);
  EXPECT_THROW(corollary_2x2(f1(), mat({{1.0, 0.0}, {1.0, 1.0}}), identity(2), identity(2)), ArgumentError);
}
