#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "bivarfun/bench/baselines.hpp"
#include "bivarfun/bench/gallery.hpp"
#include "bivarfun/bench/oracle.hpp"
#include "bivarfun/functions.hpp"
#include "bivarfun/fun2m.hpp"

namespace bivarfun::bench {

struct ExperimentRow {
  std::string test;  // "<case>@<function>"
  std::size_t size = 0;
  std::string method;
  double err = 0.0;
  double time_s = 0.0;
  std::size_t nA = 0, nB = 0;
  int digits = 0;
  int maxdeg = 0;
  double kfu = 0.0;  // kappa_f * u

  bool operator==(const ExperimentRow& o) const {
    auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
    return test == o.test && size == o.size && method == o.method && same(err, o.err) && same(time_s, o.time_s) &&
           nA == o.nA && nB == o.nB && digits == o.digits && maxdeg == o.maxdeg && same(kfu, o.kfu);
  }
};

inline constexpr const char* kCsvHeader = "test,size,method,err,time_s,nA,nB,digits,maxdeg,kfu";

namespace detail {
inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

inline void write_csv(std::ostream& os, const std::vector<ExperimentRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    if (r.test.find(',') != std::string::npos || r.method.find(',') != std::string::npos)
      throw ArgumentError("write_csv: commas are not allowed in test or method names");
    os << r.test << ',' << r.size << ',' << r.method << ',' << detail::fmt_double(r.err) << ','
       << detail::fmt_double(r.time_s) << ',' << r.nA << ',' << r.nB << ',' << r.digits << ',' << r.maxdeg << ','
       << detail::fmt_double(r.kfu) << '\n';
  }
}

inline std::vector<ExperimentRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw ArgumentError("read_csv: missing or unexpected header");
  std::vector<ExperimentRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 10) throw ArgumentError("read_csv: line " + std::to_string(lineno) + " has " +
                                            std::to_string(f.size()) + " fields, expected 10");
    auto num = [&](const std::string& s) {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (end == s.c_str() || *end != '\0') throw ArgumentError("read_csv: bad number '" + s + "' on line " +
                                                                std::to_string(lineno));
      return v;
    };
    auto count = [&](const std::string& s) {
      const double v = num(s);
      if (v < 0 || v != std::floor(v)) throw ArgumentError("read_csv: bad count '" + s + "'");
      return v;
    };
    ExperimentRow r;
    r.test = f[0];
    r.size = static_cast<std::size_t>(count(f[1]));
    r.method = f[2];
    r.err = num(f[3]);
    r.time_s = num(f[4]);
    r.nA = static_cast<std::size_t>(count(f[5]));
    r.nB = static_cast<std::size_t>(count(f[6]));
    r.digits = static_cast<int>(count(f[7]));
    r.maxdeg = static_cast<int>(count(f[8]));
    r.kfu = num(f[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline void sort_rows(std::vector<ExperimentRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ExperimentRow& a, const ExperimentRow& b) {
    return std::tie(a.test, a.size, a.method) < std::tie(b.test, b.size, b.method);
  });
}

struct ExperimentConfig {
  std::vector<std::size_t> sizes;  // empty: the experiment's default
  std::uint64_t seed = kDefaultSeed;
  int oracle_digits = 128;
  OracleSchur reference_schur = OracleSchur::Double;
  int repeats = 3;  // timing runs in experiment 3
  std::function<void(const std::string&)> progress;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline void note(const ExperimentConfig& cfg, const std::string& msg) {
  if (cfg.progress) cfg.progress(msg);
}

// Runs fun2m and fills the row; a numerical failure leaves err = NaN.
inline ExperimentRow fun2m_row(const std::string& test, std::size_t n, const std::string& method,
                               const BivariateFunction& f, const GalleryPair& p, const ComplexMatrix& C,
                               const EvalOptions& o, const ComplexMatrix* ref, ComplexMatrix* out = nullptr) {
  ExperimentRow r{test, n, method};
  EvalReport rep;
  try {
    const ComplexMatrix X = fun2m(f, p.A, p.B, C, o, rep);
    r.err = ref ? relative_error(X, *ref) : 0.0;
    if (out) *out = X;
  } catch (const Error&) {
    r.err = std::numeric_limits<double>::quiet_NaN();
  }
  r.time_s = rep.wall_time;
  r.nA = rep.n_blocks_A;
  r.nB = rep.n_blocks_B;
  r.digits = rep.max_digits;
  r.maxdeg = rep.max_taylor_degree;
  return r;
}

template <class Fn>
inline ExperimentRow timed_row(const std::string& test, std::size_t n, const std::string& method, Fn&& fn,
                               const ComplexMatrix* ref, ComplexMatrix* out = nullptr) {
  ExperimentRow r{test, n, method};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    ComplexMatrix X = fn();
    r.time_s = seconds_since(t0);
    r.err = ref ? relative_error(X, *ref) : 0.0;
    if (out) *out = std::move(X);
  } catch (const Error&) {
    r.time_s = seconds_since(t0);
    r.err = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

struct Reference {
  ComplexMatrix X;
  double kfu = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
};

inline Reference reference(const BivariateFunction& f, const CaseOracles& o, const ComplexMatrix& C) {
  Reference R;
  try {
    R.X = o.reference.evaluate_double(f, C);
    R.ok = all_finite(R.X);
    R.kfu = kappa_f_estimate(f, o.base, o.perturbed, C, o.h) * kUnitRoundoff;
  } catch (const Error&) {
  }
  return R;
}

}  // namespace detail

/// Taylor atom against the diag atom on rand-eig and grcar-rand, f = 1/sqrt(x+y).
inline std::vector<ExperimentRow> experiment1(const ExperimentConfig& cfg) {
  const std::vector<std::size_t> sizes = cfg.sizes.empty() ? std::vector<std::size_t>{32, 64} : cfg.sizes;
  const BivariateFunction f = builtin_function("inv_sqrt_sum");
  std::vector<ExperimentRow> rows;
  for (const char* name : {"rand-eig", "grcar-rand"})
    for (std::size_t n : sizes) {
      const GalleryPair p = generate({name, n, cfg.seed});
      const ComplexMatrix C = random_rhs(n, n, cfg.seed);
      const std::string test = std::string(name) + "@" + f.name();
      detail::note(cfg, "experiment 1: " + test + " n=" + std::to_string(n));
      const CaseOracles orc(p.A, p.B, cfg.oracle_digits, cfg.seed, cfg.reference_schur);
      const detail::Reference R = detail::reference(f, orc, C);
      const ComplexMatrix* ref = R.ok ? &R.X : nullptr;
      for (AtomMethod m : {AtomMethod::Taylor, AtomMethod::Diag}) {
        EvalOptions o;
        o.atom_method = m;
        o.seed = cfg.seed;
        ExperimentRow r = detail::fun2m_row(test, n, std::string("fun2m-") + to_string(m), f, p, C, o, ref);
        if (!ref) r.err = std::numeric_limits<double>::quiet_NaN();
        r.kfu = R.kfu;
        rows.push_back(r);
      }
    }
  sort_rows(rows);
  return rows;
}

inline const std::vector<std::string>& experiment2_cases() {
  static const std::vector<std::string> c = {"jordbloc", "grcar", "smoke", "kahan", "lesp", "sampling", "grcar-rand"};
  return c;
}
inline const std::vector<std::string>& experiment2_functions() {
  static const std::vector<std::string> f = {"sqrt_sum", "inv_sqrt_sum", "exp_over_sum", "exp_sqrt_sum"};
  return f;
}

/// The ill-conditioned gallery: fun2m with the diag atom, the double-precision
/// diagonalization and diag_hp, all measured against the oracle.
inline std::vector<ExperimentRow> experiment2(const ExperimentConfig& cfg,
                                              const std::vector<std::string>& cases = experiment2_cases(),
                                              const std::vector<std::string>& functions = experiment2_functions()) {
  const std::vector<std::size_t> sizes = cfg.sizes.empty() ? std::vector<std::size_t>{64} : cfg.sizes;
  std::vector<ExperimentRow> rows;
  for (const std::string& name : cases)
    for (std::size_t n : sizes) {
      const GalleryPair p = generate({name, n, cfg.seed});
      const ComplexMatrix C = random_rhs(n, n, cfg.seed);
      detail::note(cfg, "experiment 2: " + name + " n=" + std::to_string(n) + ", preparing oracles");
      const CaseOracles orc(p.A, p.B, cfg.oracle_digits, cfg.seed, cfg.reference_schur);
      for (const std::string& fname : functions) {
        const BivariateFunction f = builtin_function(fname);
        const std::string test = name + "@" + fname;
        detail::note(cfg, "experiment 2: " + test);
        const detail::Reference R = detail::reference(f, orc, C);
        const ComplexMatrix* ref = R.ok ? &R.X : nullptr;

        EvalOptions o;
        o.seed = cfg.seed;
        ExperimentRow a = detail::fun2m_row(test, n, "fun2m-diag", f, p, C, o, ref);

        ExperimentRow b = detail::timed_row(test, n, "diag", [&] { return diag_baseline(f, p.A, p.B, C); }, ref);
        b.nA = b.nB = n;
        b.digits = 16;

        DiagPlan plan;
        ExperimentRow c =
            detail::timed_row(test, n, "diag_hp", [&] { return diag_hp(f, p.A, p.B, C, cfg.seed, &plan); }, ref);
        c.nA = c.nB = 1;
        c.digits = plan.digits;

        for (ExperimentRow* r : {&a, &b, &c}) {
          if (!ref) r->err = std::numeric_limits<double>::quiet_NaN();
          r->kfu = R.kfu;
          rows.push_back(*r);
        }
      }
    }
  sort_rows(rows);
  return rows;
}

/// Timing sweep on randn with f = 1/(sqrt(x+y)(x-y)). No oracle at these sizes: err is
/// measured against the double-precision diagonalization and kfu is NaN.
inline std::vector<ExperimentRow> experiment3(const ExperimentConfig& cfg) {
  const std::vector<std::size_t> sizes =
      cfg.sizes.empty() ? std::vector<std::size_t>{64, 128, 256, 512} : cfg.sizes;
  const BivariateFunction f = builtin_function("inv_sqrt_sum_diff");
  const std::string test = "randn@" + f.name();
  std::vector<ExperimentRow> rows;
  for (std::size_t n : sizes) {
    detail::note(cfg, "experiment 3: n=" + std::to_string(n));
    const GalleryPair p = generate({"randn", n, cfg.seed});
    const ComplexMatrix C = random_rhs(n, n, cfg.seed);

    ComplexMatrix Xd;
    ExperimentRow d = detail::timed_row(test, n, "diag", [&] { return diag_baseline(f, p.A, p.B, C); }, nullptr, &Xd);
    const bool have_ref = !std::isnan(d.err);
    d.nA = d.nB = n;
    d.digits = 16;
    d.kfu = std::numeric_limits<double>::quiet_NaN();

    EvalOptions o;
    o.seed = cfg.seed;
    std::vector<ExperimentRow> runs;
    for (int k = 0; k < std::max(1, cfg.repeats); ++k)
      runs.push_back(detail::fun2m_row(test, n, "fun2m-diag", f, p, C, o, have_ref ? &Xd : nullptr));
    std::sort(runs.begin(), runs.end(), [](const auto& x, const auto& y) { return x.time_s < y.time_s; });
    ExperimentRow r = runs[runs.size() / 2];
    if (!have_ref) r.err = std::numeric_limits<double>::quiet_NaN();
    r.kfu = std::numeric_limits<double>::quiet_NaN();
    rows.push_back(r);
    rows.push_back(d);
  }
  sort_rows(rows);
  return rows;
}

inline std::vector<ExperimentRow> run_experiment(int which, const ExperimentConfig& cfg) {
  switch (which) {
    case 1: return experiment1(cfg);
    case 2: return experiment2(cfg);
    case 3: return experiment3(cfg);
    default: throw ArgumentError("experiment must be 1, 2 or 3, got " + std::to_string(which));
  }
}

}  // namespace bivarfun::bench
