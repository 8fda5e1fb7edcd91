// Prints one PASS/FAIL line per acceptance criterion and exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>

#include "bivarfun/bench/experiments.hpp"
#include "bivarfun/bench/oracle.hpp"
#include "criteria.hpp"

using namespace bivarfun;
using namespace bivarfun::bench;
using criteria::Outcome;

namespace {

constexpr std::uint64_t kSeed = kDefaultSeed;

double bound_for(const ExperimentRow& r) { return 100 * std::max(r.kfu, kUnitRoundoff); }

bool within(const ExperimentRow& r) { return std::isfinite(r.err) && std::isfinite(r.kfu) && r.err <= bound_for(r); }

void dump(const std::vector<ExperimentRow>& rows) {
  std::cout << "    " << kCsvHeader << '\n';
  for (const auto& r : rows) {
    std::ostringstream os;
    write_csv(os, {r});
    const std::string s = os.str();
    std::cout << "    " << s.substr(s.find('\n') + 1);
  }
}

Outcome gallery_accuracy() {
  ExperimentConfig cfg;
  cfg.seed = kSeed;
  const auto rows = experiment2(cfg);
  dump(rows);
  int cells = 0, ok = 0;
  std::set<std::string> diag_fails;
  std::string worst;
  double worst_ratio = 0;
  for (const auto& r : rows) {
    const std::string name = r.test.substr(0, r.test.find('@'));
    if (r.method == "fun2m-diag") {
      ++cells;
      if (within(r)) ++ok;
      const double ratio = r.err / bound_for(r);
      if (!(ratio <= worst_ratio)) {
        worst_ratio = ratio;
        worst = r.test;
      }
    } else if (r.method == "diag" && !within(r)) {
      diag_fails.insert(name);
    }
  }
  const bool diag_ok = diag_fails.count("jordbloc") && diag_fails.count("grcar") && diag_fails.count("kahan");
  std::string fails;
  for (const auto& n : diag_fails) fails += (fails.empty() ? "" : " ") + n;
  char buf[320];
  std::snprintf(buf, sizeof buf, "fun2m-diag within bound on %d/%d cells (max err/bound %.2e at %s); diag violates on: %s",
                ok, cells, worst_ratio, worst.c_str(), fails.c_str());
  return {ok == cells && cells == 28 && diag_ok, buf};
}

Outcome taylor_vs_diag() {
  ExperimentConfig cfg;
  cfg.seed = kSeed;
  const auto rows = experiment1(cfg);
  dump(rows);
  bool pass = true;
  std::string detail;
  std::map<std::size_t, const ExperimentRow*> diag, taylor;
  for (const auto& r : rows) {
    if (r.test.rfind("grcar-rand@", 0) != 0) continue;
    (r.method == "fun2m-diag" ? diag : taylor)[r.size] = &r;
  }
  for (std::size_t n : {32u, 64u}) {
    if (!diag.count(n) || !taylor.count(n)) return {false, "missing grcar-rand rows"};
    const ExperimentRow& d = *diag[n];
    const ExperimentRow& t = *taylor[n];
    pass = pass && within(d);
    char buf[200];
    const char* verdict = std::isnan(t.err) ? "taylor failed" : (t.err >= 10 * d.err ? "taylor lost accuracy" : "taylor kept accuracy");
    std::snprintf(buf, sizeof buf, "n=%zu: diag err %.2e (bound %.2e), taylor err %.2e, %s; ", n, d.err, bound_for(d), t.err,
                  verdict);
    detail += buf;
  }
  return {pass, detail};
}

Outcome complexity() {
  ExperimentConfig cfg;
  cfg.seed = kSeed;
  cfg.sizes = {64, 128, 256, 512};
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = experiment3(cfg);
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  dump(rows);
  std::map<std::size_t, double> t;
  for (const auto& r : rows)
    if (r.method == "fun2m-diag") t[r.size] = r.time_s;
  if (t.size() != 4) return {false, "missing timing rows"};
  std::string ratios;
  char buf[64];
  for (std::size_t n : {128u, 256u, 512u}) {
    std::snprintf(buf, sizeof buf, "%s%.2f", ratios.empty() ? "" : ", ", t[n] / t[n / 2]);
    ratios += buf;
  }
  const double last = t[512] / t[256];
  std::snprintf(buf, sizeof buf, "; total %.1f s", total);
  return {last <= 10.0 && total < 300.0, "time ratios per doubling " + ratios + buf};
}

Outcome oracle_consistency() {
  const std::vector<std::string> cases = {"rand-eig", "randn", "jordbloc", "grcar", "smoke", "kahan", "grcar-rand"};
  double worst = 0;
  int compared = 0, skipped = 0;
  bool pass = true;
  std::string notes;
  for (const auto& name : cases) {
    const GalleryPair p = generate({name, 16, kSeed});
    const ComplexMatrix C = random_rhs(16, 16, kSeed);
    const HpOracle lo(p.A, p.B, 128, kSeed), hi(p.A, p.B, 192, kSeed);
    for (const auto& fname : experiment2_functions()) {
      const auto f = builtin_function(fname);
      int thrown = 0;
      MpMatrix X, Y;
      try {
        X = lo.evaluate(f, C);
      } catch (const AnalyticityError&) {
        ++thrown;
      }
      try {
        Y = hi.evaluate(f, C);
      } catch (const AnalyticityError&) {
        ++thrown;
      }
      if (thrown == 2) {
        ++skipped;
        notes += " " + name + "@" + fname;
        continue;
      }
      if (thrown == 1) {
        pass = false;
        notes += " " + name + "@" + fname + "(one oracle failed)";
        continue;
      }
      worst = std::max(worst, mp_relative_difference(X, Y));
      ++compared;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "max relative difference %.2e over %d case/function pairs", worst, compared);
  std::string d = buf;
  if (skipped) d += "; not analytic on the spectrum for both:" + notes;
  return {pass && worst <= 1e-30 && compared > 0, d};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks = {
      {"sylvester equivalence", [] { return criteria::sylvester(kSeed); }},
      {"separable exponential", [] { return criteria::separable(kSeed); }},
      {"frechet derivative", [] { return criteria::frechet(kSeed); }},
      {"kronecker sum", [] { return criteria::kronecker(kSeed); }},
      {"ill-conditioned gallery", gallery_accuracy},
      {"taylor vs diag", taylor_vs_diag},
      {"taylor remainder bound", [] { return criteria::taylor_remainder(kSeed); }},
      {"complexity trend", complexity},
      {"invariant suites", [] { return criteria::invariants(kSeed); }},
      {"oracle self-consistency", oracle_consistency},
  };
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, checks[i].first,
                o.detail.c_str(), dt);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
