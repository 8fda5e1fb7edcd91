#pragma once

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bivarfun/matrix.hpp"
#include "bivarfun/mp/mpreal.hpp"

namespace bivarfun {

/// Scaled mixed partials t(i, j) = f^{(i,j)}(x, y) / (i! j!) for i + j <= order.
struct TaylorTable {
  int order = -1;
  std::vector<cplx> c;  // (order+1)^2, row i holds j = 0..order

  TaylorTable() = default;
  explicit TaylorTable(int k) : order(k), c(static_cast<std::size_t>((k + 1) * (k + 1)), cplx{0.0}) {}
  cplx& operator()(int i, int j) { return c[static_cast<std::size_t>(i * (order + 1) + j)]; }
  cplx operator()(int i, int j) const { return c[static_cast<std::size_t>(i * (order + 1) + j)]; }
};

class BivariateFunction {
public:
  using Eval = std::function<cplx(cplx, cplx)>;
  using EvalMp = std::function<MpComplex(const MpComplex&, const MpComplex&)>;
  using Taylor = std::function<TaylorTable(cplx, cplx, int)>;
  using Singular = std::function<bool(cplx, cplx)>;

  BivariateFunction() = default;
  BivariateFunction(std::string name, Eval eval) : name_(std::move(name)), eval_(std::move(eval)) {}

  /// Build from a generic callable usable with both cplx and MpComplex arguments.
  template <class F>
  static BivariateFunction generic(std::string name, F f) {
    BivariateFunction out(std::move(name), [f](cplx x, cplx y) { return cplx(f(x, y)); });
    out.eval_mp_ = [f](const MpComplex& x, const MpComplex& y) { return MpComplex(f(x, y)); };
    return out;
  }

  BivariateFunction& with_mp(EvalMp e) {
    eval_mp_ = std::move(e);
    return *this;
  }
  BivariateFunction& with_taylor(Taylor t, int max_order) {
    taylor_ = std::move(t);
    max_order_ = max_order;
    return *this;
  }
  BivariateFunction& with_singular(Singular s) {
    singular_ = std::move(s);
    return *this;
  }
  BivariateFunction& with_conj_symmetric(bool v) {
    conj_symmetric_ = v;
    return *this;
  }

  const std::string& name() const { return name_; }
  cplx operator()(cplx x, cplx y) const { return eval_(x, y); }
  cplx eval(cplx x, cplx y) const { return eval_(x, y); }

  bool has_mp() const { return static_cast<bool>(eval_mp_); }
  /// Multiprecision evaluation; without a native one, falls back to double and promotes.
  MpComplex eval_mp(const MpComplex& x, const MpComplex& y) const {
    if (eval_mp_) return eval_mp_(x, y);
    return MpComplex(eval_(x.to_cplx(), y.to_cplx()), std::max(x.prec(), y.prec()));
  }

  bool has_derivatives() const { return static_cast<bool>(taylor_); }
  int max_order() const { return taylor_ ? max_order_ : 0; }
  TaylorTable taylor(cplx x, cplx y, int order) const {
    if (!taylor_) throw DerivativeRequiredError("function '" + name_ + "' provides no partial derivatives");
    if (order > max_order_)
      throw DerivativeRequiredError("function '" + name_ + "': partials of order " + std::to_string(order) +
                                    " exceed the supported " + std::to_string(max_order_));
    return taylor_(x, y, order);
  }
  /// f^{(i,j)}(x, y)
  cplx partial(int i, int j, cplx x, cplx y) const {
    if (i == 0 && j == 0) return eval_(x, y);
    const TaylorTable t = taylor(x, y, i + j);
    double fact = 1.0;
    for (int k = 2; k <= i; ++k) fact *= k;
    for (int k = 2; k <= j; ++k) fact *= k;
    return t(i, j) * fact;
  }

  bool conj_symmetric() const { return conj_symmetric_; }
  bool is_singular(cplx x, cplx y) const { return singular_ && singular_(x, y); }

private:
  std::string name_;
  Eval eval_;
  EvalMp eval_mp_;
  Taylor taylor_;
  Singular singular_;
  int max_order_ = 0;
  bool conj_symmetric_ = false;
};

}  // namespace bivarfun
