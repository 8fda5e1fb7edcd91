#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bivarfun/atom/perturb_diag.hpp"
#include "bivarfun/atom/taylor.hpp"
#include "bivarfun/blocking.hpp"
#include "bivarfun/dense/norms.hpp"
#include "bivarfun/dense/reorder.hpp"
#include "bivarfun/dense/schur.hpp"
#include "bivarfun/function.hpp"

// Convention: fun2m(f, A, B, C) is the double Cauchy integral of f(x, y) (xI - A)^{-1} C (yI - B^T)^{-1},
// so f = 1/(x+y) solves A X + X B^T = C and f = g(x) h(y) gives g(A) C h(B^T).
// The triangular-level routines (fun2m_rec, the atoms, corollary_2x2) take the right-hand
// matrix as is: f = 1/(x+y) solves A X + X B = C there.

namespace bivarfun {

enum class AtomMethod { Taylor, Diag };

struct EvalOptions {
  AtomMethod atom_method = AtomMethod::Diag;
  double delta = 0.1;
  double delta1 = 5e-3;
  std::size_t n_min = 4;  // leaf size for the diag atom; Taylor leaves are single blocks
  SplitStrategy strategy = SplitStrategy::Balanced;
  double epsilon = 0x1p-53;
  double gamma = 10.0;
  std::uint64_t seed = kDefaultSeed;
  int k_max = kTaylorMaxDegree;
  bool normal_fast_paths = true;

  void validate() const {
    if (!(delta > 0.0)) throw ArgumentError("EvalOptions: delta must be positive");
    if (!(delta1 > 0.0 && delta1 < delta)) throw ArgumentError("EvalOptions: need 0 < delta1 < delta");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ArgumentError("EvalOptions: epsilon must lie in (0, 1)");
    if (n_min < 1) throw ArgumentError("EvalOptions: n_min must be at least 1");
    if (!(gamma > 0.0)) throw ArgumentError("EvalOptions: gamma must be positive");
    if (k_max < 0) throw ArgumentError("EvalOptions: k_max must be nonnegative");
  }
};

struct EvalReport {
  std::size_t n_blocks_A = 0, n_blocks_B = 0;
  int max_digits = 0;
  int max_taylor_degree = 0;
  std::size_t merges = 0;
  double wall_time = 0.0;
  std::size_t atom_calls = 0;
  std::string path;  // diag, diagA, diagB or schur
  std::vector<std::string> log;
};

struct Fun2mResult {
  ComplexMatrix value;
  EvalReport report;
};

inline const char* to_string(AtomMethod m) { return m == AtomMethod::Taylor ? "taylor" : "diag"; }
inline const char* to_string(SplitStrategy s) { return s == SplitStrategy::Balanced ? "balanced" : "single"; }

namespace detail {

struct Eig {
  ComplexMatrix S, Sinv;
  std::vector<cplx> d;
  bool normal = false;
  bool near_defective = false;
};

// Eigenvectors of upper-triangular T by back substitution, unit diagonal. Zero gaps are
// replaced by u ||T|| and flagged.
inline ComplexMatrix triangular_eigvecs(const ComplexMatrix& T, bool* flagged = nullptr) {
  const std::size_t n = T.rows();
  const double smin = std::max(0x1p-53 * frobenius_norm(T), std::numeric_limits<double>::min());
  ComplexMatrix V(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    V(j, j) = 1.0;
    for (std::size_t i = j; i-- > 0;) {
      cplx s = 0.0;
      for (std::size_t k = i + 1; k <= j; ++k) s += T(i, k) * V(k, j);
      cplx gap = T(i, i) - T(j, j);
      if (std::abs(gap) < smin) {
        gap = smin;
        if (flagged) *flagged = true;
      }
      V(i, j) = -s / gap;
    }
  }
  return V;
}

inline Eig eig_decomp(const ComplexMatrix& X) {
  const SchurForm S = schur(X);
  Eig e;
  e.d = diag_of(S.T);
  e.normal = is_numerically_normal(X);
  if (e.normal) {
    e.S = S.Q;
    e.Sinv = adjoint(S.Q);
    return e;
  }
  const ComplexMatrix V = triangular_eigvecs(S.T, &e.near_defective);
  e.S = matmul(S.Q, V);
  e.Sinv = solve_upper(V, adjoint(S.Q));
  return e;
}

inline cplx eval_checked(const BivariateFunction& f, cplx x, cplx y) {
  if (f.is_singular(x, y)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "function '%s' is not analytic at (%.6g%+.6gi, %.6g%+.6gi)", f.name().c_str(),
                  x.real(), x.imag(), y.real(), y.imag());
    throw AnalyticityError(buf);
  }
  const cplx v = f(x, y);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw AnalyticityError("function '" + f.name() + "' returned a non-finite value on the spectrum");
  return v;
}

inline void check_dims(const ComplexMatrix& A, const ComplexMatrix& B, const ComplexMatrix& C, const char* who) {
  if (!A.is_square() || !B.is_square() || C.rows() != A.rows() || C.cols() != B.rows())
    throw ArgumentError(std::string(who) + ": dimension mismatch (A " + std::to_string(A.rows()) + "x" +
                        std::to_string(A.cols()) + ", B " + std::to_string(B.rows()) + "x" +
                        std::to_string(B.cols()) + ", C " + std::to_string(C.rows()) + "x" +
                        std::to_string(C.cols()) + ")");
  if (!all_finite(A) || !all_finite(B) || !all_finite(C)) throw ArgumentError(std::string(who) + ": non-finite input");
}

// One side of the recursion: triangular factor, unitary basis and split tree.
struct Side {
  ComplexMatrix Q;
  ComplexMatrix T;
  PartitionTree tree;
  std::vector<std::unique_ptr<DiagBlock>> blocks;  // per tree node, built on first use
  char name = 'A';
};

inline Side prepare_side(const ComplexMatrix& X, char name, const EvalOptions& o, EvalReport& rep) {
  Side s;
  s.name = name;
  SchurForm S = schur(X);
  const Partition P = blocking(S, o.delta);
  S = reorder_schur(std::move(S), P.permutation);
  s.Q = std::move(S.Q);
  s.T = std::move(S.T);
  const bool diag = o.atom_method == AtomMethod::Diag;
  s.tree = build_tree(P, o.strategy, diag ? o.n_min : 1);
  SylvesterOptions so;
  so.gamma = o.gamma;
  so.delta = o.delta;
  so.allow_merge = diag;
  so.side = name;
  s.tree = precompute_sylvesters(s.T, std::move(s.tree), so, &rep.log);
  s.blocks.resize(s.tree.nodes.size());
  return s;
}

inline Side triangular_side(const ComplexMatrix& T, PartitionTree tree, char name) {
  Side s;
  s.name = name;
  s.Q = identity(T.rows());
  s.T = T;
  s.tree = std::move(tree);
  if (s.tree.nodes.empty()) s.tree.nodes.push_back({});
  s.blocks.resize(s.tree.nodes.size());
  return s;
}

inline Side scalar_side(cplx mu, char name) {
  ComplexMatrix T(1, 1, mu);
  PartitionTree t;
  t.nodes.push_back({});
  t.nodes[0].end = 1;
  t.nodes[0].last_block = 1;
  return triangular_side(T, std::move(t), name);
}

class Engine {
public:
  Engine(const BivariateFunction& f, const EvalOptions& o, EvalReport& rep, Side& a, Side& b)
      : f_(f), o_(o), rep_(rep), a_(a), b_(b) {}

  ComplexMatrix run(const ComplexMatrix& C) { return rec(0, 0, C); }

private:
  ComplexMatrix rec(int ia, int ib, const ComplexMatrix& C) {
    const TreeNode& na = a_.tree.node(ia);
    const TreeNode& nb = b_.tree.node(ib);
    if (na.size() == 0 || nb.size() == 0) return zeros(na.size(), nb.size());
    const bool la = na.is_leaf(), lb = nb.is_leaf();
    if (la && lb) return atom(ia, ib, C);
    if (!la && !lb) {
      const std::size_t m1 = na.mid(a_.tree.nodes) - na.begin, m2 = na.size() - m1;
      const std::size_t n1 = nb.mid(b_.tree.nodes) - nb.begin, n2 = nb.size() - n1;
      const ComplexMatrix& V = na.V;
      const ComplexMatrix& W = nb.V;
      const ComplexMatrix C11 = C.block(0, 0, m1, n1), C12 = C.block(0, n1, m1, n2);
      const ComplexMatrix C21 = C.block(m1, 0, m2, n1), C22 = C.block(m1, n1, m2, n2);
      const ComplexMatrix VC21 = matmul(V, C21);
      const ComplexMatrix F1 = rec(na.left, nb.left, C11 + VC21);
      const ComplexMatrix F2 = rec(na.right, nb.left, C21);
      const ComplexMatrix F3 = rec(na.left, nb.right, C12 - matmul(C11 + VC21, W) + matmul(V, C22));
      const ComplexMatrix F4 = rec(na.right, nb.right, C22 - matmul(C21, W));
      const ComplexMatrix top = F1 - matmul(V, F2);
      ComplexMatrix X(m1 + m2, n1 + n2);
      X.set_block(0, 0, top);
      X.set_block(0, n1, matmul(top, W) + F3 - matmul(V, F4));
      X.set_block(m1, 0, F2);
      X.set_block(m1, n1, matmul(F2, W) + F4);
      return X;
    }
    if (!la) {  // only A splits
      const std::size_t m1 = na.mid(a_.tree.nodes) - na.begin, m2 = na.size() - m1;
      const ComplexMatrix& V = na.V;
      const ComplexMatrix C11 = C.block(0, 0, m1, C.cols()), C21 = C.block(m1, 0, m2, C.cols());
      const ComplexMatrix F1 = rec(na.left, ib, C11 + matmul(V, C21));
      const ComplexMatrix F2 = rec(na.right, ib, C21);
      ComplexMatrix X(m1 + m2, C.cols());
      X.set_block(0, 0, F1 - matmul(V, F2));
      X.set_block(m1, 0, F2);
      return X;
    }
    const std::size_t n1 = nb.mid(b_.tree.nodes) - nb.begin, n2 = nb.size() - n1;
    const ComplexMatrix& W = nb.V;
    const ComplexMatrix C11 = C.block(0, 0, C.rows(), n1), C12 = C.block(0, n1, C.rows(), n2);
    const ComplexMatrix F1 = rec(ia, nb.left, C11);
    const ComplexMatrix F3 = rec(ia, nb.right, C12 - matmul(C11, W));
    ComplexMatrix X(C.rows(), n1 + n2);
    X.set_block(0, 0, F1);
    X.set_block(0, n1, matmul(F1, W) + F3);
    return X;
  }

  static ComplexMatrix diag_block(const Side& s, const TreeNode& n) {
    return s.T.block(n.begin, n.begin, n.size(), n.size());
  }

  DiagBlock& cached(Side& s, int i) {
    auto& slot = s.blocks[static_cast<std::size_t>(i)];
    if (!slot) {
      const TreeNode& n = s.tree.node(i);
      const std::string tag = std::string("perturb-") + s.name + "-" + std::to_string(n.begin);
      slot = std::make_unique<DiagBlock>(diag_block(s, n), substream_seed(o_.seed, tag), o_.delta1);
    }
    return *slot;
  }

  ComplexMatrix atom(int ia, int ib, const ComplexMatrix& C) {
    ++rep_.atom_calls;
    if (o_.atom_method == AtomMethod::Taylor) {
      TaylorPlan p;
      ComplexMatrix X = fun2_atom_taylor(f_, diag_block(a_, a_.tree.node(ia)), diag_block(b_, b_.tree.node(ib)), C,
                                         o_.epsilon, &p, o_.k_max);
      rep_.max_taylor_degree = std::max(rep_.max_taylor_degree, p.degree);
      return X;
    }
    DiagPlan p;
    ComplexMatrix X = diag_pair_eval(f_, cached(a_, ia), cached(b_, ib), C, &p);
    rep_.max_digits = std::max(rep_.max_digits, p.digits);
    if (p.refinements == 3 && (p.log10_kappa_A > 0.0 || p.log10_kappa_B > 0.0))
      rep_.log.push_back("WARN eigenvector condition estimate still growing after 3 refinements");
    return X;
  }

  const BivariateFunction& f_;
  const EvalOptions& o_;
  EvalReport& rep_;
  Side& a_;
  Side& b_;
};

class Timer {
public:
  explicit Timer(EvalReport& r) : r_(r), t0_(std::chrono::steady_clock::now()) {}
  ~Timer() { r_.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

private:
  EvalReport& r_;
  std::chrono::steady_clock::time_point t0_;
};

// Schur-based evaluation with no normality shortcuts.
inline ComplexMatrix fun2m_schur(const BivariateFunction& f, const ComplexMatrix& A, const ComplexMatrix& B,
                                 const ComplexMatrix& C, const EvalOptions& o, EvalReport& rep) {
  Side a = prepare_side(A, 'A', o, rep);
  Side b = prepare_side(transpose(B), 'B', o, rep);
  rep.n_blocks_A = a.tree.leaf_count();
  rep.n_blocks_B = b.tree.leaf_count();
  rep.merges = count_merged(a.tree) + count_merged(b.tree);
  Engine e(f, o, rep, a, b);
  const ComplexMatrix F = e.run(matmul(adjoint(a.Q), C, b.Q));
  return matmul(a.Q, F, adjoint(b.Q));
}

}  // namespace detail

/// S_A (F o (S_A^{-1} C S_B^{-T})) S_B^T with F_ij = f(lambda_i, mu_j), eigendecompositions in double.
inline ComplexMatrix fun2_diag(const BivariateFunction& f, const ComplexMatrix& A, const ComplexMatrix& B,
                               const ComplexMatrix& C, bool* near_defective = nullptr) {
  detail::check_dims(A, B, C, "fun2_diag");
  const detail::Eig ea = detail::eig_decomp(A);
  const detail::Eig eb = detail::eig_decomp(transpose(B));
  if (near_defective) *near_defective = ea.near_defective || eb.near_defective;
  ComplexMatrix X = matmul(ea.Sinv, C, eb.S);
  for (std::size_t j = 0; j < X.cols(); ++j)
    for (std::size_t i = 0; i < X.rows(); ++i) X(i, j) *= detail::eval_checked(f, ea.d[i], eb.d[j]);
  return matmul(ea.S, X, eb.Sinv);
}

/// A diagonalized: row i of the result is row i of S_A^{-1} C times f(lambda_i, B^T), then S_A from the left.
inline ComplexMatrix fun2_diagA(const BivariateFunction& f, const ComplexMatrix& A, const ComplexMatrix& B,
                                const ComplexMatrix& C, const EvalOptions& o = {}, EvalReport* report = nullptr) {
  detail::check_dims(A, B, C, "fun2_diagA");
  o.validate();
  EvalReport local;
  EvalReport& rep = report ? *report : local;
  const detail::Eig ea = detail::eig_decomp(A);
  detail::Side b = detail::prepare_side(transpose(B), 'B', o, rep);
  rep.n_blocks_B = b.tree.leaf_count();
  rep.n_blocks_A = A.rows();
  rep.merges += count_merged(b.tree);
  const ComplexMatrix Ct = matmul(ea.Sinv, C, b.Q);
  ComplexMatrix D(A.rows(), B.rows());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    detail::Side a = detail::scalar_side(ea.d[i], 'A');
    detail::Engine e(f, o, rep, a, b);
    D.set_block(i, 0, e.run(Ct.block(i, 0, 1, Ct.cols())));
  }
  return matmul(ea.S, D, adjoint(b.Q));
}

/// B^T diagonalized: column j is f(A, mu_j) applied to column j of C S, then S^{-1} from the right.
inline ComplexMatrix fun2_diagB(const BivariateFunction& f, const ComplexMatrix& A, const ComplexMatrix& B,
                                const ComplexMatrix& C, const EvalOptions& o = {}, EvalReport* report = nullptr) {
  detail::check_dims(A, B, C, "fun2_diagB");
  o.validate();
  EvalReport local;
  EvalReport& rep = report ? *report : local;
  const detail::Eig eb = detail::eig_decomp(transpose(B));
  detail::Side a = detail::prepare_side(A, 'A', o, rep);
  rep.n_blocks_A = a.tree.leaf_count();
  rep.n_blocks_B = B.rows();
  rep.merges += count_merged(a.tree);
  const ComplexMatrix Ct = matmul(adjoint(a.Q), C, eb.S);
  ComplexMatrix D(A.rows(), B.rows());
  for (std::size_t j = 0; j < B.rows(); ++j) {
    detail::Side b = detail::scalar_side(eb.d[j], 'B');
    detail::Engine e(f, o, rep, a, b);
    D.set_block(0, j, e.run(Ct.block(0, j, Ct.rows(), 1)));
  }
  return matmul(a.Q, D, eb.Sinv);
}

/// Evaluates f{A,B^T}(C); the report is filled even when an exception escapes.
inline ComplexMatrix fun2m(const BivariateFunction& f, const ComplexMatrix& A, const ComplexMatrix& B,
                           const ComplexMatrix& C, const EvalOptions& o, EvalReport& rep) {
  rep = EvalReport{};
  detail::Timer timer(rep);
  detail::check_dims(A, B, C, "fun2m");
  o.validate();
  rep.max_digits = 16;
  if (A.rows() == 0 || B.rows() == 0) return zeros(A.rows(), B.rows());
  const bool na = o.normal_fast_paths && is_numerically_normal(A);
  const bool nb = o.normal_fast_paths && is_numerically_normal(B);
  if (na && nb) {
    rep.path = "diag";
    rep.n_blocks_A = A.rows();
    rep.n_blocks_B = B.rows();
    return fun2_diag(f, A, B, C);
  }
  if (na) {
    rep.path = "diagA";
    return fun2_diagA(f, A, B, C, o, &rep);
  }
  if (nb) {
    rep.path = "diagB";
    return fun2_diagB(f, A, B, C, o, &rep);
  }
  rep.path = "schur";
  return detail::fun2m_schur(f, A, B, C, o, rep);
}

inline Fun2mResult fun2m(const BivariateFunction& f, const ComplexMatrix& A, const ComplexMatrix& B,
                         const ComplexMatrix& C, const EvalOptions& o = {}) {
  Fun2mResult r;
  r.value = fun2m(f, A, B, C, o, r.report);
  return r;
}

/// Splitting recursion on upper-triangular A, B whose trees already carry the Sylvester
/// solutions (see precompute_sylvesters). Result is f{A,B}(C) with B used as is.
inline ComplexMatrix fun2m_rec(const BivariateFunction& f, const ComplexMatrix& A, const ComplexMatrix& B,
                               const ComplexMatrix& C, const PartitionTree& treeA, const PartitionTree& treeB,
                               const EvalOptions& o = {}, EvalReport* report = nullptr) {
  detail::check_dims(A, B, C, "fun2m_rec");
  if (!is_upper_triangular(A) || !is_upper_triangular(B))
    throw ArgumentError("fun2m_rec: A and B must be upper triangular");
  EvalReport local;
  EvalReport& rep = report ? *report : local;
  detail::Side a = detail::triangular_side(A, treeA, 'A');
  detail::Side b = detail::triangular_side(B, treeB, 'B');
  if (a.tree.root().size() != A.rows() || b.tree.root().size() != B.rows())
    throw ArgumentError("fun2m_rec: tree does not cover the matrix");
  detail::Engine e(f, o, rep, a, b);
  return e.run(C);
}

/// Closed form for 2x2 upper-triangular A, B (B used as is): Hadamard term plus
/// divided-difference corrections. Nearly confluent eigenvalues switch to partial derivatives.
inline ComplexMatrix corollary_2x2(const BivariateFunction& f, const ComplexMatrix& A, const ComplexMatrix& B,
                                   const ComplexMatrix& C, bool derivative_fallback = true) {
  if (A.rows() != 2 || A.cols() != 2 || B.rows() != 2 || B.cols() != 2 || C.rows() != 2 || C.cols() != 2)
    throw ArgumentError("corollary_2x2: all arguments must be 2x2");
  if (!is_upper_triangular(A) || !is_upper_triangular(B))
    throw ArgumentError("corollary_2x2: A and B must be upper triangular");
  const cplx l1 = A(0, 0), l2 = A(1, 1), m1 = B(0, 0), m2 = B(1, 1);
  const cplx a12 = A(0, 1), b12 = B(0, 1);
  auto confluent = [](cplx p, cplx q) {
    return std::abs(p - q) <= 1e-8 * std::max({1.0, std::abs(p), std::abs(q)});
  };
  const bool cx = confluent(l1, l2), cy = confluent(m1, m2);
  if ((cx && a12 != 0.0) || (cy && b12 != 0.0)) {
    if (!derivative_fallback || !f.has_derivatives())
      throw DerivativeRequiredError("corollary_2x2: confluent eigenvalues need the partial derivatives of '" +
                                    f.name() + "'");
  }
  const cplx lm = 0.5 * (l1 + l2), mm = 0.5 * (m1 + m2);
  // D_x[l1, l2] f(x, y)
  auto dx = [&](cplx y) { return cx ? f.partial(1, 0, lm, y) : (f(l2, y) - f(l1, y)) / (l2 - l1); };
  auto dy = [&](cplx x) { return cy ? f.partial(0, 1, x, mm) : (f(x, m2) - f(x, m1)) / (m2 - m1); };
  auto dxy = [&]() -> cplx {
    if (cx && cy) return f.partial(1, 1, lm, mm);
    if (cx) return (f.partial(1, 0, lm, m2) - f.partial(1, 0, lm, m1)) / (m2 - m1);
    if (cy) return (f.partial(0, 1, l2, mm) - f.partial(0, 1, l1, mm)) / (l2 - l1);
    return (f(l2, m2) - f(l1, m2) - f(l2, m1) + f(l1, m1)) / ((l2 - l1) * (m2 - m1));
  };
  ComplexMatrix X(2, 2);
  X(0, 0) = f(l1, m1) * C(0, 0);
  X(0, 1) = f(l1, m2) * C(0, 1);
  X(1, 0) = f(l2, m1) * C(1, 0);
  X(1, 1) = f(l2, m2) * C(1, 1);
  if (a12 != 0.0) X(0, 0) += C(1, 0) * a12 * dx(m1);
  if (b12 != 0.0) X(1, 1) += C(1, 0) * b12 * dy(l2);
  cplx delta = 0.0;
  if (a12 != 0.0) delta += C(1, 1) * a12 * dx(m2);
  if (b12 != 0.0) delta += C(0, 0) * b12 * dy(l1);
  if (a12 != 0.0 && b12 != 0.0) delta += C(1, 0) * a12 * b12 * dxy();
  X(0, 1) += delta;
  return X;
}

}  // namespace bivarfun
