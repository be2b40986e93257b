// olfkit command-line front end: run, bench, verify.

#include <iostream>

#include <CLI11.hpp>

#include "olfkit/cli.hpp"

namespace {

template <class T>
void optional_flag(CLI::App* app, const std::string& name, std::optional<T>& dst, const std::string& help) {
  app->add_option_function<T>(name, [&dst](const T& v) { dst = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace olfkit::cli;

  CLI::App app{"Lyapunov-driven optimizer dynamics"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "integrate one problem under one law and realization");
  run_cmd->add_option("--problem", run.problem, "built-in benchmark name");
  run_cmd->add_option("--config", run.config_path, "JSON config file");
  optional_flag(run_cmd, "--dynamics", run.dynamics, "hgd, nd or gd");
  run_cmd->add_option("--law", run.law, "law kind followed by key=value parameters")->expected(1, -1);
  optional_flag(run_cmd, "--m", run.m, "GD monotonicity constant");
  optional_flag(run_cmd, "--eps", run.eps, "Fischer-Burmeister smoothing");
  optional_flag(run_cmd, "--tol-stat", run.tol_stat, "stop when |S| <= tol");
  optional_flag(run_cmd, "--rel-tol", run.rel_tol, "relative step error tolerance");
  optional_flag(run_cmd, "--abs-tol", run.abs_tol, "absolute step error tolerance");
  optional_flag(run_cmd, "--max-time", run.max_time, "simulated time limit");
  optional_flag(run_cmd, "--pt-clip", run.pt_clip, "prescribed-time clip fraction");
  optional_flag(run_cmd, "--samples", run.samples, "recorded sample count");
  optional_flag(run_cmd, "--out", run.out, "trajectory CSV path");
  optional_flag(run_cmd, "--seed", run.seed, "seed recorded in the report");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "run a benchmark suite");
  bench_cmd->add_option("suite,--suite", bench.suite, "logsumexp12, num4, cournot4 or all");
  bench_cmd->add_option("--out", bench.out, "output directory");
  bench_cmd->add_option("--jobs", bench.jobs, "concurrent cases (0 = all cores)");
  std::uint64_t bench_seed = 0;
  bench_cmd->add_option("--seed", bench_seed, "accepted for symmetry; the suites are deterministic");

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "check a recorded trajectory against a decay law");
  verify_cmd->add_option("csv", verify.csv, "trajectory CSV written by run or bench")->required();
  verify_cmd->add_option("--dynamics", verify.dynamics, "hgd, nd or gd");
  verify_cmd->add_option("--law", verify.law, "law kind followed by key=value parameters")->expected(1, -1);
  optional_flag(verify_cmd, "--m", verify.m, "GD monotonicity constant");
  verify_cmd->add_option("--threshold", verify.threshold, "maximum allowed violation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*run_cmd) return cmd_run(run, std::cout, std::cerr);
  if (*bench_cmd) return cmd_bench(bench, std::cout, std::cerr);
  return cmd_verify(verify, std::cout, std::cerr);
}
