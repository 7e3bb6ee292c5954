// Copyright 2026 The dgof Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the dgof binary end to end.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "gtest/gtest.h"

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result RunCli(const std::string& args, const std::string& env = "") {
  const std::string cmd =
      absl::StrCat("cd ", ::testing::TempDir(), " && ", env, " ", DGOF_CLI_PATH, " ",
                   args, " 2>&1");
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string TempPath(const std::string& name) {
  return absl::StrCat(::testing::TempDir(), "/", name);
}

TEST(CliTest, CertifyCodebookPasses) {
  const Result r = RunCli("certify codebook --n 64 --seed 1");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(absl::StrContains(r.out, "passed=true")) << r.out;
}

TEST(CliTest, CertifyExpanderPrintsLambda) {
  const Result r = RunCli("certify expander --s 10 --eta 0.5 --gamma 0.3");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(absl::StrContains(r.out, "lambda=")) << r.out;
  EXPECT_TRUE(absl::StrContains(r.out, "certified=1")) << r.out;
}

TEST(CliTest, CertifyExpanderTooFewVertices) {
  const Result r = RunCli("certify expander --s 4");
  EXPECT_EQ(r.code, 1) << r.out;
}

TEST(CliTest, MissingRequiredFlagIsUsageError) {
  const Result r = RunCli("certify codebook");
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(absl::StrContains(r.out, "--n")) << r.out;
  EXPECT_EQ(RunCli("").code, 2);
  EXPECT_EQ(RunCli("frobnicate").code, 2);
}

TEST(CliTest, TestAcceptsUnderNull) {
  const Result r = RunCli(
      "test --uniform --k 64 --eps 0.3 --comm-bits 3 --coins 4 --seed 9 "
      "--true-dist uniform --transcript null.txt");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(absl::StrContains(r.out, "verdict=accept")) << r.out;
  EXPECT_TRUE(absl::StrContains(r.out, "transcript=null.txt")) << r.out;
  EXPECT_TRUE(absl::StrContains(ReadFile(TempPath("null.txt")), "verdict=accept"));
}

TEST(CliTest, TestRejectsPaninskiAtRecordedSeed) {
  const Result r = RunCli(
      "test --uniform --k 64 --eps 0.3 --comm-bits 3 --coins 4 --seed 9 "
      "--true-dist paninski:0.3 --transcript far.txt");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(absl::StrContains(r.out, "verdict=reject")) << r.out;
}

TEST(CliTest, ZeroCoinsTakesPrivateCoinPath) {
  const Result r = RunCli(
      "test --uniform --k 64 --eps 0.3 --comm-bits 3 --coins 0 --seed 2 "
      "--transcript t0.txt");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(absl::StrContains(r.out, "path=private-coin")) << r.out;
  EXPECT_TRUE(absl::StrContains(ReadFile(TempPath("t0.txt")), "bypass=1"));
}

TEST(CliTest, TestIsDeterministicAndDumpsPlayers) {
  const std::string args =
      "test --uniform --k 16 --eps 0.5 --ldp-rho 1 --coins 0 --seed 4 --players 20000 "
      "--mode player --true-dist paninski:0.5";
  ASSERT_EQ(RunCli(args + " --transcript a.txt --players-csv a.csv").code, 0);
  ASSERT_EQ(RunCli(args + " --transcript b.txt --players-csv b.csv").code, 0);
  EXPECT_EQ(ReadFile(TempPath("a.txt")), ReadFile(TempPath("b.txt")));
  const std::string csv = ReadFile(TempPath("a.csv"));
  EXPECT_EQ(csv, ReadFile(TempPath("b.csv")));
  EXPECT_TRUE(absl::StartsWith(csv, "player_index,group_or_block,message\n"));
}

TEST(CliTest, MalformedDistributionFileIsUsageError) {
  std::ofstream(TempPath("bad.txt")) << "0.5\nhalf\n";
  const Result r =
      RunCli("test --reference bad.txt --eps 0.3 --comm-bits 2 --transcript x.txt");
  EXPECT_EQ(r.code, 2) << r.out;
  std::ofstream(TempPath("unnormalized.txt")) << "0.5\n0.6\n";
  EXPECT_EQ(RunCli("test --reference unnormalized.txt --eps 0.3 --comm-bits 2").code, 2);
}

TEST(CliTest, NonPowerOfTwoReferenceIsPadded) {
  std::ofstream(TempPath("q6.txt")) << "0.3\n0.2\n0.2\n0.1\n0.1\n0.1\n";
  const Result r = RunCli(
      "test --reference q6.txt --eps 0.3 --comm-bits 2 --seed 1 --transcript q6t.txt");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(absl::StrContains(r.out, "padding domain 6 -> 8")) << r.out;
}

TEST(CliTest, InsufficientCoinsIsConfigurationFailure) {
  const Result r = RunCli(
      "test --uniform --k 64 --eps 0.3 --ldp-rho 0.5 --coins 4 --profile paper");
  EXPECT_EQ(r.code, 1) << r.out;
}

TEST(CliTest, ExperimentCsvIsReproducibleAcrossWorkers) {
  std::ofstream(TempPath("spec.txt")) << "k = 16\neps = 0.5\nconstraint = comm:2, ldp:1\n"
                                         "coins = 0, 2\nplayers = 3000\ntrials = 20\n"
                                         "master_seed = 5\noutput = one.csv\n";
  Result a = RunCli("experiment spec.txt", "DGOF_WORKERS=1");
  ASSERT_EQ(a.code, 0) << a.out;
  Result b = RunCli("experiment spec.txt --output eight.csv", "DGOF_WORKERS=8");
  ASSERT_EQ(b.code, 0) << b.out;
  const std::string one = ReadFile(TempPath("one.csv"));
  EXPECT_EQ(one, ReadFile(TempPath("eight.csv")));
  const std::vector<std::string> lines = absl::StrSplit(one, '\n', absl::SkipEmpty());
  EXPECT_EQ(lines.size(), 9u);
  EXPECT_TRUE(absl::StrContains(a.out, "wall_s"));
}

TEST(CliTest, ExperimentEmptyGridWritesHeader) {
  std::ofstream(TempPath("empty.txt")) << "trials = 3\noutput = empty.csv\n";
  ASSERT_EQ(RunCli("experiment empty.txt").code, 0);
  const std::string csv = ReadFile(TempPath("empty.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
}

TEST(CliTest, ExperimentExitCodes) {
  std::ofstream(TempPath("badkey.txt")) << "trials = 3\nwhat = 1\n";
  EXPECT_EQ(RunCli("experiment badkey.txt").code, 2);
  std::ofstream(TempPath("badcell.txt"))
      << "trials = 3\nk = 64\neps = 0.3\nconstraint = ldp:0.5\ncoins = 4\nprofile = paper\n";
  EXPECT_EQ(RunCli("experiment badcell.txt").code, 1);
  EXPECT_EQ(RunCli("experiment missing_file.txt").code, 2);
}

TEST(CliTest, ExperimentHelpDocumentsSchema) {
  const Result r = RunCli("experiment --help");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(absl::StrContains(r.out, "cell,k,padded_k,eps")) << r.out;
}

TEST(CliTest, BoundsFormulaRows) {
  const Result r = RunCli("bounds --comm-bits 2 --k 64 --eps 0.3 --coins 0..6");
  EXPECT_EQ(r.code, 0) << r.out;
  const std::vector<std::string> lines = absl::StrSplit(r.out, '\n', absl::SkipEmpty());
  ASSERT_EQ(lines.size(), 8u);
  // Each coin halves nothing past log k - l; before that it divides by sqrt 2.
  const auto lb = [&](int row) {
    const std::vector<std::string> f = absl::StrSplit(lines[row + 1], ',');
    return std::stod(f[5]);
  };
  for (int s = 0; s < 4; ++s) EXPECT_NEAR(lb(s) / lb(s + 1), std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(lb(4), lb(6), 1e-9);
}

TEST(CliTest, BoundsNormAudit) {
  const Result r = RunCli("bounds --audit-norms --comm-bits 1 --k 8 --trials 5000");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(absl::StrContains(r.out, "within_bound=1")) << r.out;
  EXPECT_TRUE(absl::StrContains(r.out, "max_deterministic=2 ")) << r.out;
}

TEST(CliTest, BoundsFluctuationMatchesStoredValue) {
  const Result r = RunCli("bounds --fluctuation --k 8 --n 4 --eps 0.3 --exact");
  EXPECT_EQ(r.code, 0) << r.out;
  const size_t at = r.out.find("value=");
  ASSERT_NE(at, std::string::npos);
  EXPECT_NEAR(std::stod(r.out.substr(at + 6)), 0.004058890925200065, 1e-12);
}

TEST(CliTest, BoundsBadFlags) {
  EXPECT_EQ(RunCli("bounds --k 8 --comm-bits 1 --ldp-rho 1").code, 2);
  EXPECT_EQ(RunCli("bounds --k 8").code, 2);
  EXPECT_EQ(RunCli("bounds --k 8 --comm-bits 1 --coins 5..2").code, 2);
}

}  // namespace
