#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "olfkit/cli.hpp"
#include "olfkit/io.hpp"

using namespace olfkit;
namespace fs = std::filesystem;

namespace {

class TempOut : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("olfkit_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    ::setenv("OLFKIT_OUT_DIR", dir_.c_str(), 1);
  }
  void TearDown() override {
    ::unsetenv("OLFKIT_OUT_DIR");
    fs::remove_all(dir_);
  }
  fs::path dir_;
};

}  // namespace

TEST(Io, SpecsRoundTripBitExactly) {
  for (const auto& name : builtin_benchmarks()) {
    const BenchmarkSpec s = default_spec(name);
    const BenchmarkSpec back = spec_from_json(json::parse(spec_to_json(s).dump()));
    EXPECT_TRUE(back == s) << name;
  }
}

TEST(Io, SpecRoundTripKeepsAwkwardDoubles) {
  BenchmarkSpec s = default_spec("quadratic");
  s.z0 = Eigen::Vector2d(0.1 + 0.2, -1.0 / 3.0);
  s.eps = 1e-300;
  const BenchmarkSpec back = spec_from_json(json::parse(spec_to_json(s).dump()));
  EXPECT_TRUE(back == s);
}

TEST(Io, MalformedSpecIsSchemaMismatch) {
  try {
    (void)spec_from_json(json{{"name", "x"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaMismatch);
  }
}

TEST(Io, LawParsing) {
  EXPECT_EQ(parse_law({"ft", "k=1", "gamma=0.5"}), DecayLaw::finite_time(1.0, 0.5));
  EXPECT_EQ(parse_law({"pt", "mu=2", "T=5"}), DecayLaw::prescribed_time(2.0, 5.0));
  EXPECT_EQ(parse_law({"fxt", "a=1", "b=2", "gamma=0.5", "delta=3"}), DecayLaw::fixed_time(1.0, 2.0, 0.5, 3.0));
  EXPECT_EQ(law_from_json(law_to_json(DecayLaw::exponential(0.7))), DecayLaw::exponential(0.7));
  auto message = [](std::vector<std::string> tokens) {
    try {
      (void)parse_law(tokens);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string("accepted");
  };
  EXPECT_NE(message({"ft", "k=1", "gamma=1.5"}).find("gamma in (0,1)"), std::string::npos);
  EXPECT_NE(message({"ft", "k=1"}).find("missing parameter gamma"), std::string::npos);
  EXPECT_NE(message({"exp", "c=1", "d=2"}).find("unknown parameter"), std::string::npos);
  EXPECT_NE(message({"exp", "c=abc"}).find("non-numeric"), std::string::npos);
  EXPECT_NE(message({"exp", "c"}).find("key=value"), std::string::npos);
  EXPECT_NE(message({"cubic"}).find("unknown law"), std::string::npos);
}

TEST(Io, TrajectoryCsvRoundTrip) {
  const Benchmark b = make_benchmark(default_spec("halfspace_qp"));
  SolveConfig cfg;
  cfg.samples = 50;
  const SolveResult r = solve(*b.model, cfg, b.spec.z0);
  std::stringstream ss;
  write_trajectory_csv(ss, b.spec, r.trajectory);
  const TrajectoryFile f = read_trajectory_csv(ss);
  EXPECT_TRUE(f.spec == b.spec);
  ASSERT_EQ(f.trajectory.samples.size(), r.trajectory.samples.size());
  for (std::size_t i = 0; i < f.trajectory.samples.size(); ++i) {
    const Sample& a = r.trajectory.samples[i];
    const Sample& c = f.trajectory.samples[i];
    EXPECT_EQ(a.t, c.t);
    EXPECT_EQ(a.v, c.v);
    EXPECT_EQ(a.norm_s, c.norm_s);
    EXPECT_EQ(a.residuals.stationarity, c.residuals.stationarity);
    EXPECT_EQ(a.residuals.inequality, c.residuals.inequality);
    EXPECT_EQ(a.residuals.equality, c.residuals.equality);
    EXPECT_EQ(a.norm_u, c.norm_u);
    EXPECT_EQ(a.sigma, c.sigma);
    EXPECT_EQ(a.z, c.z);
  }
}

TEST(Io, TrajectoryCsvSchemaErrors) {
  auto code = [](const std::string& text) {
    std::istringstream is(text);
    try {
      (void)read_trajectory_csv(is);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::OracleFailure;
  };
  const std::string spec = "# benchmark " + spec_to_json(default_spec("quadratic")).dump() + "\n";
  const std::string magic = "# olfkit-trajectory v1\n";
  const std::string cols = "t,V,normS,res_stat,res_eq,res_ineq,normU,sigma,z0,z1\n";
  EXPECT_EQ(code("t,V\n"), ErrorCode::SchemaMismatch);
  EXPECT_EQ(code(magic + "t,V\n"), ErrorCode::SchemaMismatch);
  EXPECT_EQ(code(magic + spec + "t,V,normS\n"), ErrorCode::SchemaMismatch);
  EXPECT_EQ(code(magic + spec + cols + "1,2,3\n"), ErrorCode::SchemaMismatch);
  EXPECT_EQ(code(magic + spec + cols + "1,2,3,4,5,6,7,8,9,x\n"), ErrorCode::SchemaMismatch);
  std::istringstream ok(magic + spec + cols + "1,2,3,4,5,6,7,8,9,10\n");
  EXPECT_EQ(read_trajectory_csv(ok).trajectory.samples.size(), 1u);
}

TEST_F(TempOut, RunFiniteTimeExample) {
  cli::RunOptions o;
  o.problem = "logsumexp";
  o.dynamics = "hgd";
  o.law = {"ft", "k=1", "gamma=0.5"};
  o.out = "ft.csv";
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_run(o, out, err), 0) << err.str();
  EXPECT_NE(out.str().find("Converged"), std::string::npos);
  const TrajectoryFile f = read_trajectory_csv((dir_ / "ft.csv").string());
  EXPECT_LE(f.trajectory.back().norm_s, 1e-6);
  EXPECT_TRUE(fs::exists(dir_ / "ft.report.txt"));
}

TEST_F(TempOut, RunPrescribedTimeExample) {
  cli::RunOptions o;
  o.problem = "logsumexp";
  o.dynamics = "nd";
  o.law = {"pt", "mu=2", "T=5"};
  o.out = "pt.csv";
  std::ostringstream out, err;
  // mu = 2 leaves V = 1e-6 V0 exactly at the clip in exact arithmetic, so the
  // tolerance is not reached and the run ends at the clip.
  EXPECT_EQ(cli::cmd_run(o, out, err), cli::kExitStall) << err.str();
  const TrajectoryFile f = read_trajectory_csv((dir_ / "pt.csv").string());
  const double ratio = f.trajectory.back().v / f.trajectory.samples.front().v;
  EXPECT_NEAR(f.trajectory.back().t, 5.0 * (1.0 - 1e-3), 1e-9);
  EXPECT_NEAR(ratio, 1e-6, 1e-6 * 1e-7);
}

TEST_F(TempOut, RunRejectsInvalidLaw) {
  cli::RunOptions o;
  o.problem = "logsumexp";
  o.law = {"ft", "k=1", "gamma=1.5"};
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_run(o, out, err), 1);
  EXPECT_NE(err.str().find("gamma in (0,1)"), std::string::npos) << err.str();
}

TEST_F(TempOut, RunRejectsUnknownProblemAndDynamics) {
  std::ostringstream out, err;
  cli::RunOptions o;
  o.problem = "nope";
  EXPECT_EQ(cli::cmd_run(o, out, err), 1);
  o.problem = "logsumexp";
  o.dynamics = "xyz";
  EXPECT_EQ(cli::cmd_run(o, out, err), 1);
  o = cli::RunOptions{};
  EXPECT_EQ(cli::cmd_run(o, out, err), 1);
}

TEST_F(TempOut, RunFromConfigFile) {
  const fs::path cfg = dir_ / "cfg.json";
  std::ofstream(cfg) << R"({"problem": "halfspace_qp", "dynamics": "hgd",
                           "law": {"type": "fxt", "a": 1, "b": 1, "gamma": 0.5, "delta": 2},
                           "tol_stat": 1e-7, "out": "cfg.csv", "seed": 3})";
  cli::RunOptions o;
  o.config_path = cfg.string();
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_run(o, out, err), 0) << err.str();
  const TrajectoryFile f = read_trajectory_csv((dir_ / "cfg.csv").string());
  EXPECT_LE(f.trajectory.back().norm_s, 1e-7);
  EXPECT_NE(out.str().find("fxt"), std::string::npos);

  std::ofstream(cfg) << R"({"problem": "halfspace_qp", "bogus": 1})";
  EXPECT_EQ(cli::cmd_run(o, out, err), 1);
  EXPECT_NE(err.str().find("bogus"), std::string::npos);
}

TEST_F(TempOut, VerifyAcceptsOwnTrajectoryAndRejectsWrongRealization) {
  cli::RunOptions o;
  o.problem = "logsumexp";
  o.dynamics = "gd";
  o.law = {"exp", "c=1"};
  o.out = "gd.csv";
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_run(o, out, err), 0) << err.str();

  cli::VerifyOptions v;
  v.csv = (dir_ / "gd.csv").string();
  v.dynamics = "gd";
  v.law = {"exp", "c=1"};
  std::ostringstream vout, verr;
  EXPECT_EQ(cli::cmd_verify(v, vout, verr), 0) << vout.str() << verr.str();
  v.dynamics = "hgd";
  std::ostringstream hout, herr;
  EXPECT_EQ(cli::cmd_verify(v, hout, herr), 2);
  EXPECT_NE(hout.str().find("sample 0"), std::string::npos) << hout.str();
  v.dynamics = "gd";
  v.law = {"exp", "c=2"};
  std::ostringstream lout, lerr;
  EXPECT_EQ(cli::cmd_verify(v, lout, lerr), 2) << lout.str();
}

TEST_F(TempOut, VerifyRejectsCorruptFile) {
  std::ofstream(dir_ / "bad.csv") << "t,V\n1,2\n";
  cli::VerifyOptions v;
  v.csv = (dir_ / "bad.csv").string();
  v.law = {"exp", "c=1"};
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_verify(v, out, err), 1);
  EXPECT_NE(err.str().find("SchemaMismatch"), std::string::npos);
}

TEST(Cli, BenchSuites) {
  EXPECT_EQ(cli::bench_cases("logsumexp12").size(), 12u);
  EXPECT_EQ(cli::bench_cases("num4").size(), 4u);
  EXPECT_EQ(cli::bench_cases("cournot4").size(), 4u);
  EXPECT_EQ(cli::bench_cases("all").size(), 20u);
  EXPECT_THROW((void)cli::bench_cases("nope"), Error);
}

TEST_F(TempOut, BenchWritesSummary) {
  cli::BenchOptions o;
  o.suite = "cournot4";
  o.out = "bench";
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_bench(o, out, err), 0) << err.str();
  std::ifstream summary(dir_ / "bench" / "summary.csv");
  std::string line;
  int lines = 0;
  while (std::getline(summary, line)) ++lines;
  EXPECT_EQ(lines, 5);
  for (const char* id : {"cournot_hgd_exp", "cournot_hgd_ft", "cournot_hgd_fxt", "cournot_hgd_pt"})
    EXPECT_TRUE(fs::exists(dir_ / "bench" / (std::string(id) + ".csv"))) << id;
  // Deterministic: a second run produces the same table.
  std::ostringstream again;
  EXPECT_EQ(cli::cmd_bench(o, again, err), 0);
  EXPECT_EQ(out.str(), again.str());
}
