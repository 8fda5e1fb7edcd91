#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "bivarfun/bench/baselines.hpp"
#include "bivarfun/bench/experiments.hpp"
#include "bivarfun/bench/oracle.hpp"
#include "bivarfun/bivarfun.hpp"
#include "bivarfun/io/cmx.hpp"

namespace bf = bivarfun;
using nlohmann::json;

namespace {

constexpr int kNumericalFailure = 1;
constexpr int kUsageError = 2;

struct MatrixArgs {
  std::string f, a, b, c, out, report;
  bool transpose_b = true;
  std::uint64_t seed = bf::kDefaultSeed;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--f", f, "built-in function name, e.g. f1, f2g:exp, f3h:sqrt, inv_sqrt_sum")->required();
    cmd->add_option("--a", a, "cmx file holding A")->required()->check(CLI::ExistingFile);
    cmd->add_option("--b", b, "cmx file holding B")->required()->check(CLI::ExistingFile);
    cmd->add_option("--c", c, "cmx file holding C")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "result file (cmx); standard output when omitted");
    cmd->add_option("--report", report, "JSON report file; standard error when omitted");
    cmd->add_option("--transpose-b", transpose_b,
                    "true: compute f{A,B^T}(C) from the B given; false: B is already the second argument")
        ->default_val(true);
    cmd->add_option("--seed", seed, "seed for the random perturbations")->envname("BIVARFUN_SEED");
  }

  struct Inputs {
    bf::BivariateFunction f;
    bf::ComplexMatrix A, B, C;
  };

  Inputs load() const {
    Inputs in{bf::builtin_function(f), bf::load_cmx(a), bf::load_cmx(b), bf::load_cmx(c)};
    if (!transpose_b) in.B = bf::transpose(in.B);
    return in;
  }

  void write(const bf::ComplexMatrix& X, const json& rep) const {
    if (out.empty())
      bf::write_cmx(std::cout, X);
    else
      bf::save_cmx(out, X);
    if (report.empty()) {
      std::cerr << rep.dump(2) << '\n';
    } else {
      std::ofstream os(report);
      if (!os) throw bf::ArgumentError("cannot write '" + report + "'");
      os << rep.dump(2) << '\n';
    }
  }
};

json to_json(const bf::EvalReport& r) {
  return {{"path", r.path},
          {"n_blocks_A", r.n_blocks_A},
          {"n_blocks_B", r.n_blocks_B},
          {"max_digits", r.max_digits},
          {"max_taylor_degree", r.max_taylor_degree},
          {"merges", r.merges},
          {"atom_calls", r.atom_calls},
          {"wall_time", r.wall_time},
          {"log", r.log}};
}

int run(int argc, char** argv) {
  CLI::App app{"Bivariate matrix functions f{A,B^T}(C)", "bivarfun"};
  app.require_subcommand(1);

  // eval
  CLI::App* eval = app.add_subcommand("eval", "evaluate f{A,B^T}(C) for matrices stored in cmx files");
  MatrixArgs ev;
  ev.add_to(eval);
  bf::EvalOptions opt;
  std::string atom = "diag", strategy = "balanced";
  eval->add_option("--atom", atom, "atomic block evaluator")->check(CLI::IsMember({"diag", "taylor"}));
  eval->add_option("--delta", opt.delta, "eigenvalue clustering threshold");
  eval->add_option("--delta1", opt.delta1, "minimum perturbed gap used by the diag atom");
  eval->add_option("--nmin", opt.n_min, "leaf size of the block recursion");
  eval->add_option("--strategy", strategy, "splitting of the block tree")
      ->check(CLI::IsMember({"balanced", "single"}));
  eval->add_option("--epsilon", opt.epsilon, "target accuracy");
  eval->add_option("--gamma", opt.gamma, "growth threshold for merging blocks");

  // bench
  CLI::App* bench = app.add_subcommand("bench", "run one of the benchmark experiments and write CSV");
  int experiment = 0;
  bf::bench::ExperimentConfig cfg;
  std::string csv;
  bool verbose = false;
  bench->add_option("--experiment", experiment, "1: taylor vs diag, 2: ill-conditioned gallery, 3: timing")
      ->required()
      ->check(CLI::Range(1, 3));
  bench->add_option("--sizes", cfg.sizes, "comma-separated matrix sizes")->delimiter(',');
  bench->add_option("--seed", cfg.seed, "master seed")->envname("BIVARFUN_SEED");
  bench->add_option("--out", csv, "CSV file; standard output when omitted");
  bench->add_option("--oracle-digits", cfg.oracle_digits, "digits of the reference oracle");
  bench->add_option("--repeats", cfg.repeats, "timing runs per size in experiment 3");
  bench->add_flag("--verbose", verbose, "progress messages on standard error");

  // oracle
  CLI::App* orc = app.add_subcommand("oracle", "high-precision reference evaluation");
  MatrixArgs oa;
  oa.add_to(orc);
  int digits = 128;
  orc->add_option("--digits", digits, "decimal digits")->check(CLI::Range(16, 4000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsageError;
  }

  if (eval->parsed()) {
    opt.atom_method = atom == "taylor" ? bf::AtomMethod::Taylor : bf::AtomMethod::Diag;
    opt.strategy = strategy == "single" ? bf::SplitStrategy::Single : bf::SplitStrategy::Balanced;
    opt.seed = ev.seed;
    opt.validate();
    const auto in = ev.load();
    bf::EvalReport rep;
    try {
      const bf::ComplexMatrix X = bf::fun2m(in.f, in.A, in.B, in.C, opt, rep);
      json j = to_json(rep);
      j["function"] = in.f.name();
      j["atom"] = atom;
      ev.write(X, j);
    } catch (const bf::ArgumentError&) {
      throw;
    } catch (const bf::Error& e) {
      json j = to_json(rep);
      j["error"] = e.what();
      std::cerr << j.dump(2) << '\n';
      return kNumericalFailure;
    }
    return 0;
  }

  if (bench->parsed()) {
    if (verbose) cfg.progress = [](const std::string& m) { std::cerr << m << '\n'; };
    const auto rows = bf::bench::run_experiment(experiment, cfg);
    if (csv.empty()) {
      bf::bench::write_csv(std::cout, rows);
    } else {
      std::ofstream os(csv);
      if (!os) throw bf::ArgumentError("cannot write '" + csv + "'");
      bf::bench::write_csv(os, rows);
    }
    return 0;
  }

  const auto in = oa.load();
  const bf::ComplexMatrix X = bf::bench::diag_hp_oracle(in.f, in.A, in.B, in.C, digits, oa.seed);
  oa.write(X, {{"function", in.f.name()}, {"digits", digits}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const bf::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const bf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
}
