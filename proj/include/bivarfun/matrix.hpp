#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bivarfun/error.hpp"

namespace bivarfun {

using cplx = std::complex<double>;

/// Dense column-major matrix. Element (i, j) lives at data()[i + j * rows()].
template <class T>
class Matrix {
public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, const T& fill)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i + j * rows_]; }
  const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i + j * rows_]; }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  std::span<T> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
  std::span<const T> col(std::size_t j) const noexcept { return {data_.data() + j * rows_, rows_}; }

  /// Copy of the nr x nc block starting at (r0, c0).
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw ArgumentError("Matrix::block: out of range");
    Matrix out;
    out.rows_ = nr;
    out.cols_ = nc;
    out.data_.reserve(nr * nc);
    for (std::size_t j = 0; j < nc; ++j)
      for (std::size_t i = 0; i < nr; ++i) out.data_.push_back((*this)(r0 + i, c0 + j));
    return out;
  }

  void set_block(std::size_t r0, std::size_t c0, const Matrix& src) {
    if (r0 + src.rows() > rows_ || c0 + src.cols() > cols_)
      throw ArgumentError("Matrix::set_block: out of range");
    for (std::size_t j = 0; j < src.cols(); ++j)
      for (std::size_t i = 0; i < src.rows(); ++i) (*this)(r0 + i, c0 + j) = src(i, j);
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using ComplexMatrix = Matrix<cplx>;

inline ComplexMatrix identity(std::size_t n) {
  ComplexMatrix I(n, n, cplx{0.0});
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

inline ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return ComplexMatrix(rows, cols, cplx{0.0}); }

inline ComplexMatrix diagonal(std::span<const cplx> d) {
  ComplexMatrix D = zeros(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) D(i, i) = d[i];
  return D;
}

inline std::vector<cplx> diag_of(const ComplexMatrix& A) {
  std::vector<cplx> d(std::min(A.rows(), A.cols()));
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = A(i, i);
  return d;
}

inline ComplexMatrix adjoint(const ComplexMatrix& A) {
  ComplexMatrix out(A.cols(), A.rows());
  for (std::size_t j = 0; j < A.cols(); ++j)
    for (std::size_t i = 0; i < A.rows(); ++i) out(j, i) = std::conj(A(i, j));
  return out;
}

template <class T>
Matrix<T> transpose(const Matrix<T>& A) {
  Matrix<T> out(A.cols(), A.rows());
  for (std::size_t j = 0; j < A.cols(); ++j)
    for (std::size_t i = 0; i < A.rows(); ++i) out(j, i) = A(i, j);
  return out;
}

namespace detail {
inline void check_same_shape(const ComplexMatrix& X, const ComplexMatrix& Y, const char* op) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols())
    throw ArgumentError(std::string(op) + ": dimension mismatch " + std::to_string(X.rows()) + "x" +
                        std::to_string(X.cols()) + " vs " + std::to_string(Y.rows()) + "x" +
                        std::to_string(Y.cols()));
}
}  // namespace detail

inline ComplexMatrix& operator+=(ComplexMatrix& X, const ComplexMatrix& Y) {
  detail::check_same_shape(X, Y, "operator+=");
  auto x = X.values();
  auto y = Y.values();
  for (std::size_t k = 0; k < x.size(); ++k) x[k] += y[k];
  return X;
}

inline ComplexMatrix& operator-=(ComplexMatrix& X, const ComplexMatrix& Y) {
  detail::check_same_shape(X, Y, "operator-=");
  auto x = X.values();
  auto y = Y.values();
  for (std::size_t k = 0; k < x.size(); ++k) x[k] -= y[k];
  return X;
}

inline ComplexMatrix& operator*=(ComplexMatrix& X, cplx a) {
  for (auto& v : X.values()) v *= a;
  return X;
}

inline ComplexMatrix operator+(ComplexMatrix X, const ComplexMatrix& Y) { return X += Y; }
inline ComplexMatrix operator-(ComplexMatrix X, const ComplexMatrix& Y) { return X -= Y; }
inline ComplexMatrix operator*(cplx a, ComplexMatrix X) { return X *= a; }

/// Product X * Y. The loop nest is fixed (j, k, i), so results are bit-reproducible.
inline ComplexMatrix matmul(const ComplexMatrix& X, const ComplexMatrix& Y) {
  if (X.cols() != Y.rows())
    throw ArgumentError("matmul: inner dimensions differ (" + std::to_string(X.cols()) + " vs " +
                        std::to_string(Y.rows()) + ")");
  const std::size_t m = X.rows(), p = X.cols(), n = Y.cols();
  ComplexMatrix Z(m, n, cplx{0.0});
  // Plain real arithmetic; std::complex operator* goes through the NaN-recovery slow path.
  auto* z = reinterpret_cast<double*>(Z.data());
  const auto* x = reinterpret_cast<const double*>(X.data());
  for (std::size_t j = 0; j < n; ++j) {
    double* zc = z + 2 * j * m;
    for (std::size_t k = 0; k < p; ++k) {
      const cplx y = Y(k, j);
      const double yr = y.real(), yi = y.imag();
      if (yr == 0.0 && yi == 0.0) continue;
      const double* xc = x + 2 * k * m;
      for (std::size_t i = 0; i < m; ++i) {
        const double xr = xc[2 * i], xi = xc[2 * i + 1];
        zc[2 * i] += xr * yr - xi * yi;
        zc[2 * i + 1] += xr * yi + xi * yr;
      }
    }
  }
  return Z;
}

inline ComplexMatrix matmul(const ComplexMatrix& X, const ComplexMatrix& Y, const ComplexMatrix& Z) {
  return matmul(matmul(X, Y), Z);
}

/// Hadamard (entrywise) product.
inline ComplexMatrix hadamard(const ComplexMatrix& X, const ComplexMatrix& Y) {
  detail::check_same_shape(X, Y, "hadamard");
  ComplexMatrix Z(X.rows(), X.cols());
  for (std::size_t k = 0; k < Z.size(); ++k) Z.data()[k] = X.data()[k] * Y.data()[k];
  return Z;
}

inline double frobenius_norm(const ComplexMatrix& X) {
  double scale = 0.0, ssq = 1.0;
  for (const auto& v : X.values()) {
    for (double c : {v.real(), v.imag()}) {
      if (c == 0.0) continue;
      const double a = std::abs(c);
      if (scale < a) {
        ssq = 1.0 + ssq * (scale / a) * (scale / a);
        scale = a;
      } else {
        ssq += (a / scale) * (a / scale);
      }
    }
  }
  return scale * std::sqrt(ssq);
}

inline double max_abs(const ComplexMatrix& X) {
  double m = 0.0;
  for (const auto& v : X.values()) m = std::max(m, std::abs(v));
  return m;
}

inline bool all_finite(const ComplexMatrix& X) {
  return std::all_of(X.values().begin(), X.values().end(),
                     [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

inline bool is_upper_triangular(const ComplexMatrix& T) {
  for (std::size_t j = 0; j < T.cols(); ++j)
    for (std::size_t i = j + 1; i < T.rows(); ++i)
      if (T(i, j) != 0.0) return false;
  return true;
}

}  // namespace bivarfun
