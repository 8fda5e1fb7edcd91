#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bivarfun/dense/linalg.hpp"
#include "bivarfun/dense/norms.hpp"
#include "bivarfun/dense/schur.hpp"
#include "bivarfun/rng.hpp"

namespace bivarfun::bench {

struct GalleryCase {
  std::string name;
  std::size_t n = 0;
  std::uint64_t seed = kDefaultSeed;
};

struct GalleryPair {
  ComplexMatrix A, B;
};

inline const std::vector<std::string>& gallery_names() {
  static const std::vector<std::string> names = {"rand-eig", "randn",    "jordbloc", "grcar",     "smoke",
                                                  "kahan",    "lesp",     "sampling", "grcar-rand"};
  return names;
}

/// Real and imaginary parts i.i.d. N(0, 1).
inline ComplexMatrix random_complex(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix X(rows, cols);
  for (auto& v : X.values()) {
    const double re = g(rng);
    v = {re, g(rng)};
  }
  return X;
}

inline ComplexMatrix random_unitary(std::size_t n, std::mt19937_64& rng) { return qr_unitary(random_complex(n, n, rng)); }

// G / ||G||_2 + shift * I
inline ComplexMatrix unit_norm_random(std::size_t n, double shift, std::mt19937_64& rng) {
  ComplexMatrix G = random_complex(n, n, rng);
  G *= cplx{1.0 / spectral_norm(G)};
  for (std::size_t i = 0; i < n; ++i) G(i, i) += shift;
  return G;
}

inline ComplexMatrix direct_sum(const ComplexMatrix& X, const ComplexMatrix& Y) {
  ComplexMatrix Z = zeros(X.rows() + Y.rows(), X.cols() + Y.cols());
  Z.set_block(0, 0, X);
  Z.set_block(X.rows(), X.cols(), Y);
  return Z;
}

/// Grcar matrix: -1 on the subdiagonal, 1 on the diagonal and the first k superdiagonals.
inline ComplexMatrix grcar(std::size_t n, std::size_t k = 3) {
  ComplexMatrix A = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j <= i + k && j < n; ++j) A(i, j) = 1.0;
    if (i + 1 < n) A(i + 1, i) = -1.0;
  }
  return A;
}

/// Smoke matrix: diag(w, w^2, ..., w^n) with w = exp(2 pi i / n), ones on the
/// superdiagonal and a one in the bottom-left corner.
inline ComplexMatrix smoke(std::size_t n) {
  ComplexMatrix A = zeros(n, n);
  const double t = 2.0 * std::acos(-1.0) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    A(i, i) = std::polar(1.0, t * static_cast<double>(i + 1));
    if (i + 1 < n) A(i, i + 1) = 1.0;
  }
  if (n > 1) A(n - 1, 0) = 1.0;
  return A;
}

/// Kahan matrix diag(1, s, ..., s^{n-1}) (I - c * strict upper ones) + pert * eps * diag(n, ..., 1),
/// s = sin(theta), c = cos(theta), with the usual defaults theta = 1.2, pert = 25.
inline ComplexMatrix kahan(std::size_t n, double theta = 1.2, double pert = 25.0) {
  const double s = std::sin(theta), c = std::cos(theta);
  ComplexMatrix A = zeros(n, n);
  double si = 1.0;
  for (std::size_t i = 0; i < n; ++i, si *= s) {
    A(i, i) = si + pert * 0x1p-52 * static_cast<double>(n - i);
    for (std::size_t j = i + 1; j < n; ++j) A(i, j) = -c * si;
  }
  return A;
}

/// Tridiagonal lesp matrix: diagonal -(5, 7, ..., 2n+3), subdiagonal 2, ..., n and
/// superdiagonal 1/2, ..., 1/n. Real, sensitive eigenvalues in [-2n-3.5, -4.5].
inline ComplexMatrix lesp(std::size_t n) {
  ComplexMatrix A = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    A(i, i) = -(2.0 * static_cast<double>(i + 1) + 3.0);
    if (i + 1 < n) {
      A(i + 1, i) = static_cast<double>(i + 2);
      A(i, i + 1) = 1.0 / static_cast<double>(i + 2);
    }
  }
  return A;
}

/// Sampling-theory matrix for nodes x_k = k/n: A(i,j) = x_i / (x_i - x_j) off the diagonal,
/// A(j,j) the sum of the off-diagonal entries of column j. Eigenvalues 0, 1, ..., n-1.
inline ComplexMatrix sampling(std::size_t n) {
  ComplexMatrix A = zeros(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      const double xi = static_cast<double>(i + 1) / static_cast<double>(n);
      const double xj = static_cast<double>(j + 1) / static_cast<double>(n);
      A(i, j) = xi / (xi - xj);
      s += A(i, j);
    }
    A(j, j) = s;
  }
  return A;
}

inline ComplexMatrix jordan_block(std::size_t n, cplx lambda) {
  ComplexMatrix J = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    J(i, i) = lambda;
    if (i + 1 < n) J(i, i + 1) = 1.0;
  }
  return J;
}

namespace detail {

inline ComplexMatrix rand_eig(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(1.0, 2.0);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cplx> d(n);
  for (auto& v : d) {
    const double re = u(rng);
    v = {re, g(rng)};
  }
  const ComplexMatrix V = random_complex(n, n, rng);
  // V D V^{-1} = (V^{-T} (V D)^T)^T
  return transpose(solve(transpose(V), transpose(matmul(V, diagonal(d)))));
}

inline ComplexMatrix jordbloc(std::size_t n, std::mt19937_64& rng) {
  const ComplexMatrix J = direct_sum(jordan_block(8, 0.1), unit_norm_random(n - 8, 1.0, rng));
  const ComplexMatrix Q = random_unitary(n, rng);
  return matmul(Q, J, adjoint(Q));
}

inline void require(bool ok, const GalleryCase& c, const char* what) {
  if (!ok) throw ArgumentError("gallery case '" + c.name + "' needs " + what + ", got n = " + std::to_string(c.n));
}

}  // namespace detail

/// Test pair for one named case. Every random matrix draws from its own substream of c.seed.
inline GalleryPair generate(const GalleryCase& c) {
  const std::size_t n = c.n;
  detail::require(n >= 1, c, "n >= 1");
  auto rng = [&](const char* which) { return substream(c.seed, c.name + "/" + which); };
  if (c.name == "rand-eig") {
    auto ra = rng("A"), rb = rng("B");
    return {detail::rand_eig(n, ra), detail::rand_eig(n, rb)};
  }
  if (c.name == "randn") {
    auto ra = rng("A"), rb = rng("B");
    return {random_complex(n, n, ra), random_complex(n, n, rb)};
  }
  if (c.name == "jordbloc") {
    detail::require(n >= 9, c, "n >= 9");
    auto ra = rng("A"), rb = rng("B");
    return {detail::jordbloc(n, ra), detail::jordbloc(n, rb)};
  }
  if (c.name == "grcar") return {grcar(n), grcar(n)};
  if (c.name == "smoke") {
    const ComplexMatrix T = schur(smoke(n)).T;
    return {T, T};
  }
  if (c.name == "kahan") return {kahan(n), kahan(n)};
  if (c.name == "lesp") {
    detail::require(n >= 33, c, "n >= 33");
    const ComplexMatrix L = schur(lesp(32)).T;
    auto ra = rng("A"), rb = rng("B");
    GalleryPair p{direct_sum(L, unit_norm_random(n - 32, -1.0, ra)), direct_sum(L, unit_norm_random(n - 32, -1.0, rb))};
    p.A *= cplx{-1.0};
    p.B *= cplx{-1.0};
    return p;
  }
  if (c.name == "sampling") {
    detail::require(n >= 33, c, "n >= 33");
    const ComplexMatrix S = sampling(32);
    auto ra = rng("A"), rb = rng("B");
    return {direct_sum(S, unit_norm_random(n - 32, 1.0, ra)), direct_sum(S, unit_norm_random(n - 32, 1.0, rb))};
  }
  if (c.name == "grcar-rand") {
    auto rb = rng("B");
    return {grcar(n), detail::rand_eig(n, rb)};
  }
  throw ArgumentError("unknown gallery case '" + c.name + "'");
}

/// The right-hand side C used by the experiments: complex Gaussian, its own substream.
inline ComplexMatrix random_rhs(std::size_t m, std::size_t n, std::uint64_t seed) {
  auto r = substream(seed, "C");
  return random_complex(m, n, r);
}

}  // namespace bivarfun::bench
