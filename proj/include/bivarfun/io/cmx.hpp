#pragma once

// "cmx v1" text format: a header line `cmx <rows> <cols>` followed by rows*cols lines
// `<re> <im>` in column-major order.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "bivarfun/matrix.hpp"

namespace bivarfun {

inline void write_cmx(std::ostream& os, const ComplexMatrix& X) {
  os << "cmx " << X.rows() << ' ' << X.cols() << '\n';
  char buf[96];
  for (const cplx& v : X.values()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.real(), v.imag());
    os << buf;
  }
}

inline ComplexMatrix read_cmx(std::istream& is) {
  std::string tag;
  long long rows = -1, cols = -1;
  if (!(is >> tag >> rows >> cols) || tag != "cmx" || rows < 0 || cols < 0)
    throw ArgumentError("cmx: bad header (expected 'cmx <rows> <cols>')");
  ComplexMatrix X(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (std::size_t k = 0; k < X.size(); ++k) {
    std::string re, im;
    if (!(is >> re >> im)) throw ArgumentError("cmx: expected " + std::to_string(X.size()) + " entries, got " + std::to_string(k));
    // strtod rather than stod: subnormal values are legitimate input
    char* er = nullptr;
    char* ei = nullptr;
    const double r = std::strtod(re.c_str(), &er);
    const double i = std::strtod(im.c_str(), &ei);
    if (er != re.c_str() + re.size() || ei != im.c_str() + im.size())
      throw ArgumentError("cmx: cannot parse entry " + std::to_string(k) + ": '" + re + " " + im + "'");
    if (!std::isfinite(r) || !std::isfinite(i)) throw ArgumentError("cmx: non-finite entry " + std::to_string(k));
    X.data()[k] = {r, i};
  }
  std::string extra;
  if (is >> extra) throw ArgumentError("cmx: trailing data after " + std::to_string(X.size()) + " entries");
  return X;
}

inline ComplexMatrix load_cmx(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cmx: cannot open '" + path + "'");
  return read_cmx(in);
}

inline void save_cmx(const std::string& path, const ComplexMatrix& X) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cmx: cannot write '" + path + "'");
  write_cmx(out, X);
}

inline std::string to_cmx_string(const ComplexMatrix& X) {
  std::ostringstream os;
  write_cmx(os, X);
  return os.str();
}

inline ComplexMatrix from_cmx_string(const std::string& s) {
  std::istringstream is(s);
  return read_cmx(is);
}

}  // namespace bivarfun
