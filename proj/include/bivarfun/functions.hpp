#pragma once

// Built-in bivariate functions with closed-form scaled partials.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "bivarfun/function.hpp"

namespace bivarfun {

namespace series {

using Coeffs = std::vector<cplx>;  // c[n] = g^{(n)}(s0) / n!

/// (s0 + t)^alpha
inline Coeffs power(cplx s0, double alpha, int N) {
  Coeffs c(static_cast<std::size_t>(N + 1));
  if (alpha == -1.0)
    c[0] = 1.0 / s0;
  else if (alpha == 0.5)
    c[0] = std::sqrt(s0);
  else if (alpha == -0.5)
    c[0] = 1.0 / std::sqrt(s0);
  else
    c[0] = std::pow(s0, alpha);
  for (int n = 1; n <= N; ++n) c[static_cast<std::size_t>(n)] = c[static_cast<std::size_t>(n - 1)] * ((alpha - n + 1) / n) / s0;
  return c;
}

inline Coeffs exp(cplx s0, int N) {
  Coeffs c(static_cast<std::size_t>(N + 1));
  c[0] = std::exp(s0);
  for (int n = 1; n <= N; ++n) c[static_cast<std::size_t>(n)] = c[static_cast<std::size_t>(n - 1)] / static_cast<double>(n);
  return c;
}

inline Coeffs mul(const Coeffs& a, const Coeffs& b) {
  const std::size_t N = std::min(a.size(), b.size());
  Coeffs c(N, cplx{0.0});
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t k = 0; k <= n; ++k) c[n] += a[k] * b[n - k];
  return c;
}

/// exp(v(t)) from the series of v; n w_n = sum_{k=1}^n k v_k w_{n-k}.
inline Coeffs exp_of(const Coeffs& v) {
  const std::size_t N = v.size();
  Coeffs w(N, cplx{0.0});
  w[0] = std::exp(v[0]);
  for (std::size_t n = 1; n < N; ++n) {
    cplx s = 0.0;
    for (std::size_t k = 1; k <= n; ++k) s += static_cast<double>(k) * v[k] * w[n - k];
    w[n] = s / static_cast<double>(n);
  }
  return w;
}

inline double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Table of a function of s = x + y: t(i, j) = c_{i+j} C(i+j, i).
inline TaylorTable of_sum(const Coeffs& c, int order) {
  TaylorTable t(order);
  for (int i = 0; i <= order; ++i)
    for (int j = 0; i + j <= order; ++j) t(i, j) = c[static_cast<std::size_t>(i + j)] * binom(i + j, i);
  return t;
}

/// Table of a function of d = x - y: t(i, j) = c_{i+j} C(i+j, i) (-1)^j.
inline TaylorTable of_diff(const Coeffs& c, int order) {
  TaylorTable t = of_sum(c, order);
  for (int i = 0; i <= order; ++i)
    for (int j = 1; i + j <= order; j += 2) t(i, j) = -t(i, j);
  return t;
}

/// Truncated product of two bivariate tables.
inline TaylorTable product(const TaylorTable& a, const TaylorTable& b, int order) {
  TaylorTable t(order);
  for (int i = 0; i <= order; ++i)
    for (int j = 0; i + j <= order; ++j) {
      cplx s = 0.0;
      for (int i1 = 0; i1 <= i; ++i1)
        for (int j1 = 0; j1 <= j; ++j1) s += a(i1, j1) * b(i - i1, j - j1);
      t(i, j) = s;
    }
  return t;
}

struct GaussLegendre {
  std::vector<double> x, w;  // nodes and weights on [0, 1]
};

inline GaussLegendre gauss_legendre(int n) {
  GaussLegendre g;
  g.x.resize(static_cast<std::size_t>(n));
  g.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    const std::size_t a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(n - 1 - i);
    g.x[a] = 0.5 * (1.0 - z);
    g.x[b] = 0.5 * (1.0 + z);
    g.w[a] = g.w[b] = 0.5 * w;
  }
  return g;
}

}  // namespace series

namespace detail {

inline bool on_cut(cplx s) { return s.imag() == 0.0 && s.real() <= 0.0; }

/// (e^h - 1) / h
inline cplx expm1_div(cplx h) {
  if (std::abs(h) >= 0.5) return (std::exp(h) - 1.0) / h;
  cplx sum = 1.0, term = 1.0;
  for (int k = 2; k < 40; ++k) {
    term *= h / static_cast<double>(k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

inline MpComplex mp_one(mpfr_prec_t p) { return MpComplex(1.0, 0.0, p); }

inline series::Coeffs univariate(const std::string& g, cplx z, int N) {
  if (g == "exp") return series::exp(z, N);
  if (g == "sqrt") return series::power(z, 0.5, N);
  throw ArgumentError("unknown univariate function '" + g + "' (supported: exp, sqrt)");
}

inline cplx univariate_eval(const std::string& g, cplx z) {
  return g == "exp" ? std::exp(z) : std::sqrt(z);
}

inline MpComplex univariate_eval(const std::string& g, const MpComplex& z) {
  return g == "exp" ? exp(z) : sqrt(z);
}

}  // namespace detail

inline constexpr int kBuiltinMaxOrder = 200;

/// 1/(x+y)
inline BivariateFunction f1() {
  BivariateFunction f("f1", [](cplx x, cplx y) { return 1.0 / (x + y); });
  f.with_mp([](const MpComplex& x, const MpComplex& y) { return detail::mp_one(x.prec()) / (x + y); });
  f.with_taylor([](cplx x, cplx y, int k) { return series::of_sum(series::power(x + y, -1.0, k), k); }, kBuiltinMaxOrder);
  f.with_singular([](cplx x, cplx y) { return x + y == 0.0; });
  f.with_conj_symmetric(true);
  return f;
}

/// Divided difference (g(x) - g(y)) / (x - y), with g'(x) on the diagonal.
inline BivariateFunction f2g(const std::string& g) {
  detail::univariate(g, 1.0, 0);  // validates the name
  BivariateFunction f("f2" + g, {});
  if (g == "exp") {
    f = BivariateFunction("f2exp", [](cplx x, cplx y) { return std::exp(y) * detail::expm1_div(x - y); });
    f.with_mp([](const MpComplex& x, const MpComplex& y) { return exp(y) * expm1_div(x - y); });
  } else {
    f = BivariateFunction("f2sqrt", [](cplx x, cplx y) { return 1.0 / (std::sqrt(x) + std::sqrt(y)); });
    f.with_mp([](const MpComplex& x, const MpComplex& y) { return detail::mp_one(x.prec()) / (sqrt(x) + sqrt(y)); });
    f.with_singular([](cplx x, cplx y) { return detail::on_cut(x) || detail::on_cut(y); });
  }
  f.with_taylor(
      [g](cplx x, cplx y, int k) {
        // t(i,j) = ((i+j+1)! / (i! j!)) int_0^1 t^i (1-t)^j c_{i+j+1}(y + t (x - y)) dt
        TaylorTable t(k);
        const int nodes = k / 2 + 24;
        const auto gl = series::gauss_legendre(nodes);
        for (int q = 0; q < nodes; ++q) {
          const double tq = gl.x[static_cast<std::size_t>(q)], wq = gl.w[static_cast<std::size_t>(q)];
          const auto c = detail::univariate(g, y + tq * (x - y), k + 1);
          std::vector<double> tp(static_cast<std::size_t>(k + 1), 1.0), sp(static_cast<std::size_t>(k + 1), 1.0);
          for (int i = 1; i <= k; ++i) {
            tp[static_cast<std::size_t>(i)] = tp[static_cast<std::size_t>(i - 1)] * tq;
            sp[static_cast<std::size_t>(i)] = sp[static_cast<std::size_t>(i - 1)] * (1.0 - tq);
          }
          for (int i = 0; i <= k; ++i)
            for (int j = 0; i + j <= k; ++j) {
              const double mult = (i + j + 1) * series::binom(i + j, i);
              t(i, j) += wq * mult * tp[static_cast<std::size_t>(i)] * sp[static_cast<std::size_t>(j)] *
                         c[static_cast<std::size_t>(i + j + 1)];
            }
        }
        return t;
      },
      kBuiltinMaxOrder);
  f.with_conj_symmetric(true);
  return f;
}

/// h(x + y)
inline BivariateFunction f3h(const std::string& h) {
  detail::univariate(h, 1.0, 0);
  BivariateFunction f("f3" + h, [h](cplx x, cplx y) { return detail::univariate_eval(h, x + y); });
  f.with_mp([h](const MpComplex& x, const MpComplex& y) { return detail::univariate_eval(h, x + y); });
  f.with_taylor([h](cplx x, cplx y, int k) { return series::of_sum(detail::univariate(h, x + y, k), k); },
                kBuiltinMaxOrder);
  if (h == "sqrt") f.with_singular([](cplx x, cplx y) { return detail::on_cut(x + y); });
  f.with_conj_symmetric(true);
  return f;
}

inline BivariateFunction sqrt_sum() {
  BivariateFunction f("sqrt_sum", [](cplx x, cplx y) { return std::sqrt(x + y); });
  f.with_mp([](const MpComplex& x, const MpComplex& y) { return sqrt(x + y); });
  f.with_taylor([](cplx x, cplx y, int k) { return series::of_sum(series::power(x + y, 0.5, k), k); }, kBuiltinMaxOrder);
  f.with_singular([](cplx x, cplx y) { return detail::on_cut(x + y); });
  f.with_conj_symmetric(true);
  return f;
}

inline BivariateFunction inv_sqrt_sum() {
  BivariateFunction f("inv_sqrt_sum", [](cplx x, cplx y) { return 1.0 / std::sqrt(x + y); });
  f.with_mp([](const MpComplex& x, const MpComplex& y) { return detail::mp_one(x.prec()) / sqrt(x + y); });
  f.with_taylor([](cplx x, cplx y, int k) { return series::of_sum(series::power(x + y, -0.5, k), k); },
                kBuiltinMaxOrder);
  f.with_singular([](cplx x, cplx y) { return detail::on_cut(x + y); });
  f.with_conj_symmetric(true);
  return f;
}

inline BivariateFunction exp_over_sum() {
  BivariateFunction f("exp_over_sum", [](cplx x, cplx y) { return std::exp(x + y) / (x + y); });
  f.with_mp([](const MpComplex& x, const MpComplex& y) {
    const MpComplex s = x + y;
    return exp(s) / s;
  });
  f.with_taylor(
      [](cplx x, cplx y, int k) {
        const cplx s = x + y;
        return series::of_sum(series::mul(series::exp(s, k), series::power(s, -1.0, k)), k);
      },
      kBuiltinMaxOrder);
  f.with_singular([](cplx x, cplx y) { return x + y == 0.0; });
  f.with_conj_symmetric(true);
  return f;
}

inline BivariateFunction exp_sqrt_sum() {
  BivariateFunction f("exp_sqrt_sum", [](cplx x, cplx y) { return std::exp(std::sqrt(x + y)); });
  f.with_mp([](const MpComplex& x, const MpComplex& y) { return exp(sqrt(x + y)); });
  f.with_taylor([](cplx x, cplx y, int k) { return series::of_sum(series::exp_of(series::power(x + y, 0.5, k)), k); },
                kBuiltinMaxOrder);
  f.with_singular([](cplx x, cplx y) { return detail::on_cut(x + y); });
  f.with_conj_symmetric(true);
  return f;
}

/// 1 / (sqrt(x + y) (x - y))
inline BivariateFunction inv_sqrt_sum_diff() {
  BivariateFunction f("inv_sqrt_sum_diff", [](cplx x, cplx y) { return 1.0 / (std::sqrt(x + y) * (x - y)); });
  f.with_mp([](const MpComplex& x, const MpComplex& y) { return detail::mp_one(x.prec()) / (sqrt(x + y) * (x - y)); });
  f.with_taylor(
      [](cplx x, cplx y, int k) {
        const TaylorTable a = series::of_sum(series::power(x + y, -0.5, k), k);
        const TaylorTable b = series::of_diff(series::power(x - y, -1.0, k), k);
        return series::product(a, b, k);
      },
      kBuiltinMaxOrder);
  f.with_singular([](cplx x, cplx y) { return detail::on_cut(x + y) || x == y; });
  f.with_conj_symmetric(true);
  return f;
}

/// Names accepted by builtin_function: f1, f2g:<g>, f3h:<h>, sqrt_sum, inv_sqrt_sum,
/// exp_over_sum, exp_sqrt_sum, inv_sqrt_sum_diff. f2g and f3h default to exp.
inline BivariateFunction builtin_function(const std::string& spec) {
  std::string name = spec, arg = "exp";
  if (const auto p = spec.find(':'); p != std::string::npos) {
    name = spec.substr(0, p);
    arg = spec.substr(p + 1);
  }
  if (name == "f1") return f1();
  if (name == "f2g" || name == "f2") return f2g(arg);
  if (name == "f3h" || name == "f3") return f3h(arg);
  if (name == "sqrt_sum") return sqrt_sum();
  if (name == "inv_sqrt_sum") return inv_sqrt_sum();
  if (name == "exp_over_sum") return exp_over_sum();
  if (name == "exp_sqrt_sum") return exp_sqrt_sum();
  if (name == "inv_sqrt_sum_diff") return inv_sqrt_sum_diff();
  throw ArgumentError("unknown function '" + spec + "'");
}

inline std::vector<std::string> builtin_function_names() {
  return {"f1", "f2g", "f3h", "sqrt_sum", "inv_sqrt_sum", "exp_over_sum", "exp_sqrt_sum", "inv_sqrt_sum_diff"};
}

}  // namespace bivarfun
