#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rrmc/tools/cli.hpp"
#include "rrmc/tools/rng_tools.hpp"

namespace rrmc::tools {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string first_line(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

std::size_t line_count(const fs::path& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rrmc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    config_ = dir_ / "small.ini";
    std::ofstream(config_) << "L = 1\ndx = 0.1\ndt = 0.01\nt_end = 0.05\nparticles = 200\nseed = 3\n";
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
  fs::path config_;
};

TEST(Cli, RoundtripPasses) {
  const auto r = run({"rng", "roundtrip", "--count", "1"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  const auto big = run({"rng", "roundtrip", "--count", "20000", "--seed", "9"});
  EXPECT_EQ(big.code, kExitOk) << big.err;
}

TEST(Cli, RoundtripDetectsCorruption) {
  const auto r = run({"rng", "roundtrip", "--count", "1000", "--corrupt-bit", "5"});
  EXPECT_EQ(r.code, kExitVerification);
  EXPECT_NE(r.err.find("mismatch"), std::string::npos);
}

TEST(Cli, StreamMatchesKnownAnswer) {
  const auto r = run({"rng", "stream", "--bytes", "16", "--seed", "42", "--stream", "54"});
  ASSERT_EQ(r.code, kExitOk);
  const std::string expected{"\x68\x2b\x06\x72\x1d\xda\xb1\x86\x39\x3d\x85\xc9\x46\xaa\x04\x13", 16};
  EXPECT_EQ(r.out, expected);
  const auto partial = run({"rng", "stream", "--bytes", "7", "--seed", "42", "--stream", "54"});
  EXPECT_EQ(partial.out, expected.substr(0, 7));
}

TEST(Cli, StreamIsDeterministic) {
  const auto a = run({"rng", "stream", "--bytes", "4096", "--seed", "7"});
  const auto b = run({"rng", "stream", "--bytes", "4096", "--seed", "7"});
  EXPECT_EQ(a.out.size(), 4096u);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"rng"}).code, kExitUsage);
  EXPECT_EQ(run({"rng", "stream"}).code, kExitUsage);
  EXPECT_EQ(run({"rng", "roundtrip", "--count", "abc"}).code, kExitUsage);
  EXPECT_EQ(run({"heat", "simulate", "--preset", "huge"}).code, kExitUsage);
  EXPECT_EQ(run({"heat", "simulate", "--config", "/nonexistent/file.ini"}).code, kExitUsage);
  EXPECT_EQ(run({"rng", "bench", "--dist", "cauchy"}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST(Cli, BenchWritesCsv) {
  const auto r = run({"rng", "bench", "--dist", "uniform", "--counts", "1000", "--runs", "3", "--discard", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "count,dist,mode,min_seconds");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2u);
}

double forward_seconds(Distribution dist) {
  const Direction forward[] = {Direction::Forward};
  return bench_distribution(dist, forward, 10'000'000, 1).front().min_seconds;
}

TEST(RngBench, RelativeForwardCost) {
  const double uniform = forward_seconds(Distribution::Uniform);
  const double normal = forward_seconds(Distribution::Normal) / uniform;
  const double exponential = forward_seconds(Distribution::Exponential) / uniform;
  EXPECT_GE(normal, 1.4);
  EXPECT_LE(normal, 3.0);
  EXPECT_GE(exponential, 0.8);
  EXPECT_LE(exponential, 1.5);
}

TEST_F(CliFiles, SimulateWritesField) {
  const auto r = run({"heat", "simulate", "--config", config_.string(), "--out", dir_.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(first_line(dir_ / "field.csv"), "tau,n,theta");
  EXPECT_EQ(line_count(dir_ / "field.csv"), 1u + 6 * 10);
  EXPECT_NE(r.out.find("objective="), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "stats.txt"));

  const auto fin = run({"heat", "simulate", "--config", config_.string(), "--out", dir_.string(), "--final-only"});
  ASSERT_EQ(fin.code, kExitOk);
  EXPECT_EQ(line_count(dir_ / "field.csv"), 11u);
  EXPECT_EQ(r.out, fin.out);
}

TEST_F(CliFiles, GradientAndFiniteDifferences) {
  const auto r = run({"heat", "gradient", "--config", config_.string(), "--out", dir_.string(), "--fd-check", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(first_line(dir_ / "gradient.csv"), "n,u,grad");
  EXPECT_EQ(line_count(dir_ / "gradient.csv"), 11u);
  EXPECT_NE(r.out.find("generator_mismatches=0"), std::string::npos);

  const auto tight = run({"heat", "gradient", "--config", config_.string(), "--out", dir_.string(), "--fd-check",
                          "3", "--fd-tolerance", "1e-30"});
  EXPECT_EQ(tight.code, kExitVerification);
}

TEST_F(CliFiles, GradientBudget) {
  const auto r = run({"heat", "gradient", "--config", config_.string(), "--out", dir_.string(), "--mode", "stored",
                      "--memory-budget", "100"});
  EXPECT_EQ(r.code, kExitVerification);
  EXPECT_NE(r.err.find("required_bytes="), std::string::npos);
}

TEST_F(CliFiles, OptimizeWritesHistoryAndControl) {
  const auto r = run({"heat", "optimize", "--config", config_.string(), "--out", dir_.string(), "--iterations", "4",
                      "--step", "0.01"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(first_line(dir_ / "history.csv"), "iter,objective,grad_norm,seconds");
  EXPECT_EQ(line_count(dir_ / "history.csv"), 5u);
  EXPECT_EQ(first_line(dir_ / "control.csv"), "n,x_center,u");
  EXPECT_EQ(line_count(dir_ / "control.csv"), 11u);

  // The written control reads back as a starting point.
  const auto again = run({"heat", "simulate", "--config", config_.string(), "--out", (dir_ / "sim").string(),
                          "--control", (dir_ / "control.csv").string()});
  EXPECT_EQ(again.code, kExitOk) << again.err;
}

TEST_F(CliFiles, ScalingMarksOverBudget) {
  const auto r = run({"bench", "scaling", "--config", config_.string(), "--batch-sizes", "100,400", "--modes",
                      "stored,reversible", "--memory-budget", "25000"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "particles,mode,constraint_seconds,adjoint_seconds,total_seconds,peak_path_bytes,status");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_NE(rows[2].find("stored"), std::string::npos);
  EXPECT_NE(rows[2].find("over_budget"), std::string::npos);
  EXPECT_NE(rows[3].find(",ok"), std::string::npos);
}

}  // namespace
}  // namespace rrmc::tools
