#pragma once

#include <stdexcept>
#include <string>

namespace bivarfun {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad dimensions, malformed input, out-of-range parameters.
class ArgumentError : public Error {
public:
  using Error::Error;
};

/// QR iteration or an eigendecomposition did not converge.
class FactorizationError : public Error {
public:
  FactorizationError(const std::string& what, int iterations)
      : Error(what), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

private:
  int iterations_;
};

/// Exactly (or numerically) singular shifted system.
class SingularityError : public Error {
public:
  using Error::Error;
};

/// The bivariate function was evaluated on its singular set.
class AnalyticityError : public Error {
public:
  using Error::Error;
};

/// A confluent divided difference needed a derivative the function does not provide.
class DerivativeRequiredError : public Error {
public:
  using Error::Error;
};

/// An iterative procedure (Taylor degree search, re-perturbation) gave up.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double last_bound)
      : Error(what), last_bound_(last_bound) {}
  double last_bound() const noexcept { return last_bound_; }

private:
  double last_bound_;
};

/// Requested precision exceeds what the library is willing to allocate.
class ResourceError : public Error {
public:
  using Error::Error;
};

/// A caller-supplied object violates a documented contract (e.g. symmetry flags).
class ContractError : public Error {
public:
  using Error::Error;
};

/// Broken internal invariant; indicates a bug rather than bad input.
class InternalError : public Error {
public:
  using Error::Error;
};

}  // namespace bivarfun
