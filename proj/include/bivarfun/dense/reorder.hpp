#pragma once

#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "bivarfun/dense/schur.hpp"

namespace bivarfun {

/// Swap the adjacent diagonal entries (k, k+1) of S.T with one Givens rotation.
/// Returns false (and leaves S untouched) when the two eigenvalues are numerically equal.
inline bool swap_adjacent(SchurForm& S, std::size_t k) {
  ComplexMatrix& T = S.T;
  const std::size_t n = T.rows();
  const cplx a = T(k, k), b = T(k, k + 1), c = T(k + 1, k + 1);
  const double u = 0x1p-53;
  if (std::abs(a - c) < 4.0 * u * std::max(std::abs(a), std::abs(c)) || a == c) return false;
  // First column of G* spans the eigenvector (b, c - a) belonging to c.
  const DoubleOps ops;
  const auto g = detail::make_givens(ops, b, c - a);
  for (std::size_t j = k; j < n; ++j) ops.rot(T(k, j), T(k + 1, j), g.c, g.s);
  for (std::size_t i = 0; i <= k + 1; ++i) ops.rot_adj(T(i, k), T(i, k + 1), g.c, g.s);
  for (std::size_t i = 0; i < n; ++i) ops.rot_adj(S.Q(i, k), S.Q(i, k + 1), g.c, g.s);
  T(k, k) = c;
  T(k + 1, k + 1) = a;
  T(k + 1, k) = 0.0;
  return true;
}

/// Reorder so that new diagonal position p holds the eigenvalue originally at order[p].
inline SchurForm reorder_schur(SchurForm S, std::span<const std::size_t> order) {
  const std::size_t n = S.T.rows();
  if (order.size() != n) throw ArgumentError("reorder_schur: permutation has wrong length");
  std::vector<char> seen(n, 0);
  for (std::size_t v : order) {
    if (v >= n || seen[v]) throw ArgumentError("reorder_schur: not a permutation");
    seen[v] = 1;
  }
  std::vector<std::size_t> cur(n);
  std::iota(cur.begin(), cur.end(), std::size_t{0});
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t j = p;
    while (cur[j] != order[p]) ++j;
    for (; j > p; --j) {
      swap_adjacent(S, j - 1);  // numerically equal neighbours are just relabelled
      std::swap(cur[j - 1], cur[j]);
    }
  }
  return S;
}

}  // namespace bivarfun
