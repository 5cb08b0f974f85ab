#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "dramforge/chain_io.hpp"
#include "dramforge/checkpoint.hpp"
#include "dramforge/config.hpp"
#include "dramforge/error.hpp"
#include "dramforge/targets.hpp"
#include "oracles.hpp"
#include "scratch.hpp"

using namespace dramforge;
using testing_util::ScratchDir;

namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(DRAMFORGE_SOURCE_DIR) / "configs";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "dramforge");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

Result run_mvn4(const std::string& prefix, std::vector<std::string> extra = {}) {
  std::vector<std::string> args{"run", (kConfigs / "mvn4.cfg").string(), "--set", "output_prefix=" + prefix,
                                "--set", "chain_size=8000"};
  args.insert(args.end(), extra.begin(), extra.end());
  return invoke(args);
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> v;
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST(Cli, RunWritesFiveFiles) {
  ScratchDir dir("cli_run");
  const auto prefix = dir.prefix("mvn4");
  const auto r = run_mvn4(prefix);
  ASSERT_EQ(r.code, cli::ok) << r.err;
  for (const char* stem : {"_chain.txt", "_restart.txt", "_sample.txt", "_report.txt", "_progress.txt"})
    EXPECT_TRUE(fs::exists(prefix + stem)) << stem;
  EXPECT_NE(r.out.find("completed 8000 iterations"), std::string::npos) << r.out;
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  ScratchDir a("cli_a"), b("cli_b");
  ASSERT_EQ(run_mvn4(a.prefix("m")).code, cli::ok);
  ASSERT_EQ(run_mvn4(b.prefix("m")).code, cli::ok);
  for (const char* stem : {"_chain.txt", "_restart.txt", "_sample.txt"})
    EXPECT_EQ(oracle::slurp(a.prefix("m") + stem), oracle::slurp(b.prefix("m") + stem)) << stem;
}

TEST(Cli, EnvironmentRelocatesOutputs) {
  ScratchDir dir("cli_env");
  ::setenv("DRAMFORGE_OUT", dir.path().c_str(), 1);
  const auto r = invoke({"run", (kConfigs / "mvn4.cfg").string(), "--set", "chain_size=500"});
  ::unsetenv("DRAMFORGE_OUT");
  ASSERT_EQ(r.code, cli::ok) << r.err;
  EXPECT_TRUE(fs::exists(dir.path() / "mvn4_chain.txt"));
}

TEST(Cli, CompleteOutputsNeedForce) {
  ScratchDir dir("cli_force");
  const auto prefix = dir.prefix("m");
  ASSERT_EQ(run_mvn4(prefix).code, cli::ok);
  const auto again = run_mvn4(prefix);
  EXPECT_EQ(again.code, cli::resume_refused);
  EXPECT_NE(again.err.find("refused"), std::string::npos);
  EXPECT_EQ(run_mvn4(prefix, {"--resume"}).code, cli::resume_refused);
  EXPECT_EQ(run_mvn4(prefix, {"--force"}).code, cli::ok);
}

TEST(Cli, IncompleteOutputsNeedResumeFlag) {
  ScratchDir dir("cli_resume");
  const auto prefix = dir.prefix("m");
  ASSERT_EQ(run_mvn4(prefix).code, cli::ok);
  // mark the report as still running so the outputs look interrupted
  auto report = oracle::slurp(prefix + "_report.txt");
  const auto at = report.find("status = complete");
  ASSERT_NE(at, std::string::npos);
  report.replace(at, 17, "status = running");
  std::ofstream(prefix + "_report.txt", std::ios::binary | std::ios::trunc) << report;
  EXPECT_EQ(run_mvn4(prefix).code, cli::resume_refused);
  const auto r = run_mvn4(prefix, {"--resume"});
  EXPECT_EQ(r.code, cli::ok) << r.err;
}

TEST(Cli, BadConfigIsExitTwo) {
  ScratchDir dir("cli_bad");
  const auto cfg = dir.path() / "bad.cfg";
  std::ofstream(cfg) << "ndim = 2\nchain_size = lots\n[target]\nkind = mvn\n";
  const auto r = invoke({"run", cfg.string()});
  EXPECT_EQ(r.code, cli::config_error);
  EXPECT_NE(r.err.find("bad.cfg:2:"), std::string::npos) << r.err;

  EXPECT_EQ(invoke({"run", (dir.path() / "nope.cfg").string()}).code, cli::config_error);
  EXPECT_EQ(invoke({"run", (kConfigs / "mvn4.cfg").string(), "--set", "dr_stage_count=7"}).code, cli::config_error);
  EXPECT_EQ(invoke({"run", (kConfigs / "mvn4.cfg").string(), "--set", "bogus=1"}).code, cli::config_error);
  EXPECT_EQ(invoke({"frobnicate"}).code, cli::config_error);
  EXPECT_EQ(invoke({}).code, cli::config_error);
}

TEST(Config, ParsesTargetsAndOverrides) {
  const std::string text =
      "# comment\n"
      "ndim = 2\n"
      "chain_size = 1234\n"
      "dr_stage_count = 2\n"
      "\n"
      "[target]\n"
      "kind = gauss_mixture\n"
      "weights = 0.3, 0.7\n"
      "means = -2,0; 2,0\n"
      "covariances = identity\n";
  const auto cfg = parse_config(text, "inline", {{"seed", "99"}, {"chain_size", "50"}});
  EXPECT_EQ(cfg.spec.ndim, 2);
  EXPECT_EQ(cfg.spec.chain_size, 50);
  EXPECT_EQ(cfg.spec.seed, 99u);
  EXPECT_EQ(cfg.spec.dr_stage_count, 2);
  EXPECT_EQ(cfg.target.ndim(), 2);
  EXPECT_EQ(cfg.text, text);
  EXPECT_TRUE(cfg.spec.user_keys.count("seed"));
  EXPECT_FALSE(cfg.spec.user_keys.count("adaptation_period"));
  EXPECT_EQ(cfg.spec.adaptation_period, 200);
}

TEST(Config, MissingTargetSectionMeansStandardNormal) {
  const auto cfg = parse_config("ndim = 3\n", "x.cfg");
  const std::vector<double> x{1.0, 2.0, -2.0};
  EXPECT_EQ(eval_builtin(cfg.target, x), -4.5);
}

TEST(Config, ErrorsNameTheLine) {
  try {
    parse_config("ndim = 2\n[target]\nkind = mvn\nmean = 0\n", "x.cfg");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4) << e.what();
  }
  EXPECT_THROW(parse_config("ndim = 2\n[targets]\n", "x.cfg"), ParseError);
  EXPECT_THROW(parse_config("chain_size = 10\n", "x.cfg"), ParseError);
  EXPECT_THROW(parse_config("ndim = 1\n[target]\nkind = mvn\nkind = mvn\n", "x.cfg"), ParseError);
  EXPECT_THROW(parse_override("novalue"), ParseError);
  EXPECT_EQ(parse_override("a = b"), (std::pair<std::string, std::string>{"a", "b"}));
}

TEST(Postproc, AcfStartsAtOne) {
  ScratchDir dir("cli_acf");
  const auto prefix = dir.prefix("m");
  ASSERT_EQ(run_mvn4(prefix).code, cli::ok);
  const auto r = invoke({"postproc", prefix, "--what", "acf"});
  ASSERT_EQ(r.code, cli::ok) << r.err;
  const auto lines = lines_of(prefix + "_acf.csv");
  ASSERT_GE(lines.size(), 3u);
  EXPECT_EQ(lines[0].substr(0, 14), "lag,chain_var1");
  EXPECT_EQ(lines[1], "0,1,1,1,1,1,1,1,1");
  EXPECT_TRUE(fs::exists(prefix + "_acf.gp"));
}

TEST(Postproc, CovmatHasOneRowPerCheckpoint) {
  ScratchDir dir("cli_cov");
  const auto prefix = dir.prefix("m");
  ASSERT_EQ(run_mvn4(prefix).code, cli::ok);
  ASSERT_EQ(invoke({"postproc", prefix, "--what", "covmat"}).code, cli::ok);
  const auto lines = lines_of(prefix + "_covmat.csv");
  const auto restart = read_restart(prefix + "_restart.txt");
  EXPECT_EQ(lines.size(), restart.checkpoints.size() + 1);
  EXPECT_TRUE(lines[0].starts_with("checkpoint,iteration,adaptationMeasure,cov_1_1,cov_1_2,")) << lines[0];
}

TEST(Postproc, StatsEchoesChain) {
  ScratchDir dir("cli_stats");
  const auto prefix = dir.prefix("m");
  ASSERT_EQ(run_mvn4(prefix).code, cli::ok);
  ASSERT_EQ(invoke({"postproc", prefix, "--what", "stats"}).code, cli::ok);
  const auto csv = oracle::slurp(prefix + "_stats.csv");
  EXPECT_NE(csv.find("chainSize,8000\n"), std::string::npos) << csv;
  const auto chain = read_chain(prefix + "_chain.txt");
  EXPECT_NE(csv.find("uniqueStates," + std::to_string(chain.rows.size()) + "\n"), std::string::npos);
}

TEST(Postproc, ContribCountsSumToAcceptedSteps) {
  ScratchDir dir("cli_contrib");
  const auto prefix = dir.prefix("m");
  ASSERT_EQ(run_mvn4(prefix, {"--set", "parallelism=single_chain", "--set", "num_workers=8"}).code, cli::ok);
  ASSERT_EQ(invoke({"postproc", prefix, "--what", "contrib"}).code, cli::ok);
  const auto lines = lines_of(prefix + "_contrib.csv");
  ASSERT_EQ(lines.size(), 9u);
  std::int64_t total = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::istringstream row(lines[i]);
    std::string rank, count;
    std::getline(row, rank, ',');
    std::getline(row, count, ',');
    EXPECT_EQ(rank, std::to_string(i));
    total += std::stoll(count);
  }
  const auto chain = read_chain(prefix + "_chain.txt");
  EXPECT_EQ(total, static_cast<std::int64_t>(chain.rows.size()) - 1);
}

TEST(Postproc, MissingFilesAndUnknownExport) {
  ScratchDir dir("cli_missing");
  EXPECT_EQ(invoke({"postproc", dir.prefix("none"), "--what", "stats"}).code, cli::config_error);
  EXPECT_EQ(invoke({"postproc", dir.prefix("none"), "--what", "contrib"}).code, cli::config_error);
  EXPECT_EQ(invoke({"postproc", dir.prefix("none"), "--what", "histogram"}).code, cli::config_error);
}
