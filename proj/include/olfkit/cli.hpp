#pragma once

/**
 * @file cli.hpp
 * @brief Command implementations behind the olfkit executable: single runs,
 *        the benchmark matrix and trajectory verification.
 *
 * Config file schema (JSON object, every key optional except a problem):
 *
 *   problem      built-in benchmark name
 *   benchmark    full benchmark spec object (alternative to problem)
 *   dynamics     "hgd" | "nd" | "gd"
 *   m            GD monotonicity constant (defaults to the benchmark's)
 *   law          {"type": "ft", "k": 1, "gamma": 0.5}
 *   eps, tol_stat, rel_tol, abs_tol, max_time, pt_clip, samples
 *   z0           initial state
 *   out          CSV path
 *   seed         recorded in the report
 *
 * Command-line flags override config values.
 */

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "olfkit/dynamics.hpp"
#include "olfkit/error.hpp"
#include "olfkit/integrate.hpp"
#include "olfkit/io.hpp"
#include "olfkit/law.hpp"
#include "olfkit/oracle.hpp"
#include "olfkit/problems.hpp"

namespace olfkit::cli {

namespace fs = std::filesystem;

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitStall = 2;
inline constexpr int kExitFailure = 3;

inline int exit_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return kExitOk;
    case SolveStatus::SingularStall:
    case SolveStatus::HorizonReached: return kExitStall;
    case SolveStatus::StepFailure:
    case SolveStatus::DomainViolation: return kExitFailure;
  }
  return kExitFailure;
}

/// Output root: OLFKIT_OUT_DIR when set, else the working directory.
/// Relative output paths are resolved against it.
inline fs::path resolve_output(const fs::path& p) {
  if (p.is_absolute()) return p;
  if (const char* root = std::getenv("OLFKIT_OUT_DIR"); root != nullptr && *root != '\0') return fs::path(root) / p;
  return p;
}

inline void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

inline Realization make_realization(const std::string& name, std::optional<double> m, const BenchmarkSpec& spec) {
  if (name == "hgd") return Realization::hgd();
  if (name == "nd") return Realization::nd();
  if (name == "gd") {
    const std::optional<double> mm = m ? m : spec.strong_monotonicity;
    require(mm.has_value(), ErrorCode::InvalidArgument,
            "gd dynamics need a monotonicity constant m; benchmark " + spec.name + " records none, pass --m");
    return Realization::gd(*mm);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown dynamics '" + name + "' (expected hgd, nd or gd)");
}

// ---------------------------------------------------------------------------
// run

struct RunOptions {
  std::string problem;
  std::string config_path;
  std::optional<std::string> dynamics;
  std::vector<std::string> law;
  std::optional<double> m;
  std::optional<double> eps;
  std::optional<double> tol_stat;
  std::optional<double> rel_tol;
  std::optional<double> abs_tol;
  std::optional<double> max_time;
  std::optional<double> pt_clip;
  std::optional<int> samples;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
};

struct ResolvedRun {
  Benchmark bench;
  SolveConfig cfg;
  std::string dynamics;
  fs::path csv_path;
  std::uint64_t seed = 0;
};

namespace detail {

inline json load_config(const std::string& path) {
  std::ifstream is(path);
  require(bool(is), ErrorCode::InvalidArgument, "cannot open config " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "config " + path + " is not valid JSON: " + e.what());
  }
  require(j.is_object(), ErrorCode::InvalidArgument, "config " + path + " must be a JSON object");
  static const std::vector<std::string> known = {"problem", "benchmark", "dynamics", "m",   "law",
                                                 "eps",     "tol_stat",  "rel_tol",  "abs_tol", "max_time",
                                                 "pt_clip", "samples",   "z0",       "out", "seed"};
  for (const auto& [k, v] : j.items())
    require(std::find(known.begin(), known.end(), k) != known.end(), ErrorCode::InvalidArgument,
            "config " + path + " has unknown key '" + k + "'");
  return j;
}

template <class T>
void take(const json& j, const char* key, std::optional<T>& dst) {
  if (dst || !j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidArgument, std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace detail

inline ResolvedRun resolve_run(RunOptions o) {
  json cfg_json = json::object();
  if (!o.config_path.empty()) cfg_json = detail::load_config(o.config_path);

  BenchmarkSpec spec;
  if (!o.problem.empty()) {
    spec = default_spec(o.problem);
  } else if (cfg_json.contains("benchmark")) {
    spec = spec_from_json(cfg_json["benchmark"]);
  } else if (cfg_json.contains("problem")) {
    require(cfg_json["problem"].is_string(), ErrorCode::InvalidArgument, "config key 'problem' must be a string");
    spec = default_spec(cfg_json["problem"].get<std::string>());
  } else {
    throw Error(ErrorCode::InvalidArgument, "no problem given: pass --problem or a config with 'problem'");
  }

  detail::take(cfg_json, "dynamics", o.dynamics);
  detail::take(cfg_json, "m", o.m);
  detail::take(cfg_json, "eps", o.eps);
  detail::take(cfg_json, "tol_stat", o.tol_stat);
  detail::take(cfg_json, "rel_tol", o.rel_tol);
  detail::take(cfg_json, "abs_tol", o.abs_tol);
  detail::take(cfg_json, "max_time", o.max_time);
  detail::take(cfg_json, "pt_clip", o.pt_clip);
  detail::take(cfg_json, "samples", o.samples);
  detail::take(cfg_json, "out", o.out);
  detail::take(cfg_json, "seed", o.seed);

  if (o.eps) {
    require(*o.eps > 0.0, ErrorCode::InvalidArgument, "eps must be positive");
    spec.eps = *o.eps;
  }
  if (cfg_json.contains("z0")) {
    try {
      spec.z0 = olfkit::detail::to_eigen(cfg_json["z0"].get<std::vector<double>>());
    } catch (const json::exception&) {
      throw Error(ErrorCode::InvalidArgument, "config key 'z0' must be an array of numbers");
    }
  }

  ResolvedRun r;
  r.bench = make_benchmark(spec);
  r.dynamics = o.dynamics.value_or("hgd");
  r.cfg.realization = make_realization(r.dynamics, o.m, spec);
  if (!o.law.empty()) r.cfg.law = parse_law(o.law);
  else if (cfg_json.contains("law")) r.cfg.law = law_from_json(cfg_json["law"]);
  else r.cfg.law = recommended_law(spec, LawKind::Exp);
  if (o.tol_stat) r.cfg.tol_stat = *o.tol_stat;
  if (o.rel_tol) r.cfg.rel_tol = *o.rel_tol;
  if (o.abs_tol) r.cfg.abs_tol = *o.abs_tol;
  if (o.max_time) r.cfg.max_time = *o.max_time;
  if (o.pt_clip) r.cfg.pt_clip = *o.pt_clip;
  if (o.samples) r.cfg.samples = *o.samples;
  r.cfg.validate();
  r.seed = o.seed.value_or(0);
  const std::string stem = spec.name + "_" + r.dynamics + "_" + std::string(to_string(r.cfg.law.kind()));
  r.csv_path = resolve_output(o.out.value_or(stem + ".csv"));
  return r;
}

inline std::string format_report(const ResolvedRun& r, const SolveResult& res) {
  const SolveReport& rep = res.report;
  const Sample& last = res.trajectory.back();
  std::ostringstream os;
  os << std::setprecision(10);
  auto row = [&os](const char* key) -> std::ostream& { return os << std::left << std::setw(18) << key; };
  row("problem") << r.bench.spec.name << " (" << r.bench.model->info().name << ")\n";
  row("dynamics") << r.dynamics;
  if (r.cfg.realization.kind == RealizationKind::GD) os << " m=" << r.cfg.realization.m;
  os << '\n';
  row("law") << describe(r.cfg.law) << '\n';
  row("status") << to_string(rep.status) << '\n';
  row("stop_time") << rep.stop_time << '\n';
  row("settling_bound");
  if (rep.settling_bound) os << *rep.settling_bound << (rep.within_bound ? " (met)" : " (not met)") << '\n';
  else os << "none\n";
  row("V0") << rep.v0 << '\n';
  row("V_final") << last.v << '\n';
  row("final_normS") << rep.final_norm_s << '\n';
  row("res_stat") << last.residuals.stationarity << '\n';
  row("res_eq") << last.residuals.equality << '\n';
  row("res_ineq") << last.residuals.inequality << '\n';
  row("decay_violation") << rep.decay_violation << '\n';
  row("field_evals") << rep.field_evaluations << '\n';
  row("steps") << rep.accepted_steps << '\n';
  row("samples") << res.trajectory.samples.size() << '\n';
  row("seed") << r.seed << '\n';
  row("csv") << r.csv_path.string() << '\n';
  row("message") << rep.message << '\n';
  return os.str();
}

inline int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  ResolvedRun r;
  try {
    r = resolve_run(o);
  } catch (const Error& e) {
    err << "olfkit run: " << e.what() << '\n';
    return kExitConfig;
  }
  const SolveResult res = solve(*r.bench.model, r.cfg, r.bench.spec.z0);
  const std::string report = format_report(r, res);
  try {
    ensure_parent(r.csv_path);
    write_trajectory_csv(r.csv_path.string(), r.bench.spec, res.trajectory);
    fs::path report_path = r.csv_path;
    report_path.replace_extension(".report.txt");
    std::ofstream(report_path) << report;
  } catch (const std::exception& e) {
    err << "olfkit run: " << e.what() << '\n';
    return kExitConfig;
  }
  out << report;
  return exit_code(res.report.status);
}

// ---------------------------------------------------------------------------
// bench

struct BenchCase {
  std::string id;
  std::string problem;
  std::string dynamics;
  LawKind law = LawKind::Exp;
};

inline std::vector<std::string> bench_suites() { return {"logsumexp12", "num4", "cournot4", "all"}; }

inline std::vector<BenchCase> bench_cases(const std::string& suite) {
  const LawKind laws[] = {LawKind::Exp, LawKind::FiniteTime, LawKind::FixedTime, LawKind::PrescribedTime};
  std::vector<BenchCase> cases;
  auto add = [&](const std::string& problem, const std::vector<std::string>& dyns) {
    for (const auto& d : dyns)
      for (LawKind k : laws)
        cases.push_back({problem + "_" + d + "_" + std::string(to_string(k)), problem, d, k});
  };
  const bool all = suite == "all";
  if (suite == "logsumexp12" || all) add("logsumexp", {"gd", "nd", "hgd"});
  if (suite == "num4" || all) add("num", {"hgd"});
  if (suite == "cournot4" || all) add("cournot", {"hgd"});
  require(!cases.empty(), ErrorCode::InvalidArgument,
          "unknown suite '" + suite + "' (expected logsumexp12, num4, cournot4 or all)");
  return cases;
}

struct BenchRow {
  std::string id;
  SolveStatus status = SolveStatus::StepFailure;
  double stop_time = 0.0;
  std::optional<double> bound;
  bool within_bound = false;
  double violation = 0.0;
  double final_norm_s = 0.0;
  double max_ineq = 0.0;
  double eq_norm = 0.0;
  std::optional<double> oracle_error;
  std::string error;
};

/// Reference point for a benchmark: the recorded solution, else the
/// active-set oracle when the KKT system is affine.
inline std::optional<Vector> reference_solution(const Benchmark& b) {
  if (b.spec.solution) return b.spec.solution;
  if (b.affine) return oracle_active_set(*b.affine);
  return std::nullopt;
}

inline BenchRow run_case(const BenchCase& c, const fs::path& dir) {
  BenchRow row;
  row.id = c.id;
  try {
    const Benchmark b = make_benchmark(default_spec(c.problem));
    SolveConfig cfg;
    cfg.law = recommended_law(b.spec, c.law);
    cfg.realization = make_realization(c.dynamics, std::nullopt, b.spec);
    const SolveResult res = solve(*b.model, cfg, b.spec.z0);
    write_trajectory_csv((dir / (c.id + ".csv")).string(), b.spec, res.trajectory);
    const SolveReport& rep = res.report;
    row.status = rep.status;
    row.stop_time = rep.stop_time;
    row.bound = rep.settling_bound;
    row.within_bound = rep.within_bound;
    row.violation = rep.decay_violation;
    row.final_norm_s = rep.final_norm_s;
    const Feasibility f = feasibility(b, rep.final_state);
    row.max_ineq = f.max_ineq;
    row.eq_norm = f.eq_norm;
    if (auto ref = reference_solution(b)) row.oracle_error = (rep.final_state - *ref).cwiseAbs().maxCoeff();
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

inline std::string format_summary(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "case,status,stop_time,bound,within_bound,violation,final_normS,max_ineq,eq_residual,oracle_error\n";
  os << std::setprecision(6);
  for (const auto& r : rows) {
    os << r.id << ',' << (r.error.empty() ? std::string(to_string(r.status)) : "Error") << ',' << r.stop_time << ',';
    if (r.bound) os << *r.bound;
    else os << "none";
    os << ',' << (r.within_bound ? "yes" : "no") << ',' << r.violation << ',' << r.final_norm_s << ',' << r.max_ineq
       << ',' << r.eq_norm << ',';
    if (r.oracle_error) os << *r.oracle_error;
    else os << "none";
    os << '\n';
  }
  return os.str();
}

struct BenchOptions {
  std::string suite = "all";
  std::string out = "bench";
  unsigned jobs = 0;  // 0: hardware concurrency
};

inline int cmd_bench(const BenchOptions& o, std::ostream& out, std::ostream& err) {
  std::vector<BenchCase> cases;
  fs::path dir;
  try {
    cases = bench_cases(o.suite);
    dir = resolve_output(o.out);
    fs::create_directories(dir);
  } catch (const std::exception& e) {
    err << "olfkit bench: " << e.what() << '\n';
    return kExitConfig;
  }

  std::vector<BenchRow> rows(cases.size());
  std::atomic<std::size_t> next{0};
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned jobs = std::min<unsigned>(o.jobs == 0 ? hw : o.jobs, static_cast<unsigned>(cases.size()));
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < cases.size(); i = next++) rows[i] = run_case(cases[i], dir);
    });
  }
  for (auto& t : workers) t.join();

  const std::string summary = format_summary(rows);
  std::ofstream(dir / "summary.csv") << summary;
  out << summary;
  bool ok = true;
  for (const auto& r : rows) {
    if (!r.error.empty()) err << "olfkit bench: " << r.id << ": " << r.error << '\n';
    ok = ok && r.error.empty() && r.status == SolveStatus::Converged;
  }
  return ok ? kExitOk : kExitStall;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
  std::string csv;
  std::string dynamics = "hgd";
  std::vector<std::string> law;
  std::optional<double> m;
  double threshold = 1e-6;
};

struct VerifyOutcome {
  bool ok = false;
  double max_violation = 0.0;
  std::size_t worst_index = 0;
  std::string message;
};

/**
 * Checks a recorded trajectory against a law and realization. Recorded V must
 * match the model at the recorded states, recorded |u| and sigma must match
 * the claimed realization and law, and the recomputed decay violation must
 * stay within the threshold.
 */
inline VerifyOutcome verify_trajectory(const TrajectoryFile& file, const DecayLaw& law, const Realization& real,
                                       double threshold) {
  const Benchmark b = make_benchmark(file.spec);
  const auto& samples = file.trajectory.samples;
  require(samples.size() >= 3, ErrorCode::SchemaMismatch, "trajectory has fewer than 3 samples");
  auto close = [](double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
  };
  VerifyOutcome o;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    require(s.z.size() == b.model->dimension(), ErrorCode::SchemaMismatch,
            "state width does not match the embedded benchmark");
    const FieldEvaluation f = evaluate_field(*b.model, law, real, s.z, s.t);
    std::string what;
    if (!close(s.v, f.v, 1e-9)) what = "recorded V does not match the model";
    else if (!close(s.sigma, f.sigma, 1e-6)) what = "recorded sigma does not match the law";
    else if (!close(s.norm_u, f.u.norm(), 1e-6)) what = "recorded |u| does not match the realization";
    if (!what.empty()) {
      std::ostringstream os;
      os << std::setprecision(10) << what << " at sample " << i << " (t=" << s.t << ")";
      o.worst_index = i;
      o.max_violation = std::numeric_limits<double>::infinity();
      o.message = os.str();
      return o;
    }
  }
  const DecayCheck d = check_decay(*b.model, file.trajectory, law, real);
  o.max_violation = d.max_violation;
  o.worst_index = d.worst_index;
  o.ok = d.max_violation <= threshold;
  std::ostringstream os;
  os << std::setprecision(6) << "max violation " << d.max_violation << " at sample " << d.worst_index
     << (o.ok ? " (within " : " (exceeds ") << threshold << ")";
  o.message = os.str();
  return o;
}

inline int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  TrajectoryFile file;
  std::optional<DecayLaw> law;
  Realization real;
  try {
    file = read_trajectory_csv(o.csv);
    require(!o.law.empty(), ErrorCode::InvalidArgument, "verify needs --law");
    law = parse_law(o.law);
    real = make_realization(o.dynamics, o.m, file.spec);
  } catch (const Error& e) {
    err << "olfkit verify: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    const VerifyOutcome v = verify_trajectory(file, *law, real, o.threshold);
    out << (v.ok ? "PASS " : "FAIL ") << o.csv << ": " << v.message << '\n';
    return v.ok ? kExitOk : kExitStall;
  } catch (const Error& e) {
    err << "olfkit verify: " << e.what() << '\n';
    return e.code() == ErrorCode::SchemaMismatch ? kExitConfig : kExitStall;
  }
}

}  // namespace olfkit::cli
