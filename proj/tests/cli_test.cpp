// Copyright 2026 The srake Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end tests of the `srake` binary (path injected by the build).

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

CmdResult run_cmd(const std::string& cmd) {
  const std::string full = cmd + " 2>&1";
  FILE* pipe = popen(full.c_str(), "r");
  EXPECT_NE(pipe, nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("srake_cli_test_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  static constexpr const char* kBin = SRAKE_CLI_BIN;
  fs::path dir_;
};

const char* kSmallSweep = R"({
  "system": {"users": 3, "paths": 8, "fingers": 3, "chips_per_frame": 12,
             "decay": 0.1, "shadow_var": 0.5},
  "sweep": {"axis": "ebno_db", "values": [0, 10], "trials": 8,
            "methods": ["conventional", "box", "hybrid"]},
  "seed": 5
})";

TEST_F(CliTest, MissingConfigGivesConfigExitCode) {
  const auto r = run_cmd(std::string(kBin) + " sweep --config " + (dir_ / "nope.json").string());
  EXPECT_EQ(r.exit_code, 2);
}

TEST_F(CliTest, UnknownKeyIsRejectedWithPointer) {
  const auto cfg = write_config("bad.json", R"({
    "system": {"users": 2, "paths": 4, "fingers": 2, "chips_per_frame": 8,
               "decay": 0.1, "shadow_var": 0.5, "bogus": 1},
    "sweep": {"axis": "ebno_db", "values": [0], "trials": 2, "methods": ["conventional"]}
  })");
  const auto r = run_cmd(std::string(kBin) + " sweep --config " + cfg.string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("bogus"), std::string::npos);
}

TEST_F(CliTest, MalformedJsonReportsLine) {
  const auto cfg = write_config("syntax.json", "{\n  \"system\": {\n");
  const auto r = run_cmd(std::string(kBin) + " sweep --config " + cfg.string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("config error"), std::string::npos);
}

TEST_F(CliTest, UnknownMethodFlagGivesConfigExitCode) {
  const auto cfg = write_config("cfg.json", kSmallSweep);
  const auto r = run_cmd(std::string(kBin) + " sweep --config " + cfg.string() +
                         " --methods conventional,warp");
  EXPECT_EQ(r.exit_code, 2);
}

TEST_F(CliTest, SweepWritesCsvAndSvgDeterministically) {
  const auto cfg = write_config("cfg.json", kSmallSweep);
  const auto out1 = dir_ / "out1";
  const auto out2 = dir_ / "out2";
  const std::string base = std::string(kBin) + " sweep --config " + cfg.string() + " --seed 7";
  EXPECT_EQ(run_cmd(base + " --out " + out1.string()).exit_code, 0);
  EXPECT_EQ(run_cmd(base + " --out " + out2.string()).exit_code, 0);

  const std::string csv1 = read_file(out1 / "results.csv");
  const std::string csv2 = read_file(out2 / "results.csv");
  EXPECT_FALSE(csv1.empty());
  EXPECT_EQ(csv1, csv2);

  std::istringstream lines(csv1);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("# srake v", 0), 0u);
  EXPECT_NE(line.find("seed=7"), std::string::npos);
  std::getline(lines, line);
  EXPECT_EQ(line, "axis,method,mean_sinr_db,stderr_db,trials,failures");
  int rows = 0;
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, 2 * 3);  // two grid points, three methods

  EXPECT_TRUE(fs::exists(out1 / "results.svg"));
  const std::string svg = read_file(out1 / "results.svg");
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("config_sha="), std::string::npos);
}

TEST_F(CliTest, MethodFilterSelectsRows) {
  const auto cfg = write_config("cfg.json", kSmallSweep);
  const auto out = dir_ / "out";
  const auto r = run_cmd(std::string(kBin) + " sweep --config " + cfg.string() +
                         " --seed 3 --trials 4 --methods conventional,hybrid --out " +
                         out.string());
  EXPECT_EQ(r.exit_code, 0);
  const std::string csv = read_file(out / "results.csv");
  EXPECT_NE(csv.find(",conventional,"), std::string::npos);
  EXPECT_NE(csv.find(",hybrid,"), std::string::npos);
  EXPECT_EQ(csv.find(",box,"), std::string::npos);
}

TEST_F(CliTest, SingleNoMaiAgreesAcrossMethodsAndDumpsMatrices) {
  const auto cfg = write_config("single.json", R"({
    "system": {"users": 1, "paths": 8, "fingers": 3, "chips_per_frame": 12,
               "decay": 0.1, "shadow_var": 0.5},
    "sweep": {"axis": "ebno_db", "values": [10], "trials": 1,
              "methods": ["conventional", "sphere", "box", "sphere-dual", "hybrid", "exhaustive"]}
  })");
  const auto out = dir_ / "mats";
  const auto r = run_cmd(std::string(kBin) + " single --config " + cfg.string() +
                         " --seed 11 --trial 2 --dump-matrices --out " + out.string());
  EXPECT_EQ(r.exit_code, 0);

  // All methods print the same finger set in a single-user scenario.
  std::istringstream lines(r.output);
  std::string line, fingers;
  int method_lines = 0;
  while (std::getline(lines, line)) {
    const auto lb = line.find('[');
    const auto rb = line.find(']');
    if (lb == std::string::npos || rb == std::string::npos || line.find("sinr") == std::string::npos)
      continue;
    ++method_lines;
    const std::string f = line.substr(lb, rb - lb + 1);
    if (fingers.empty())
      fingers = f;
    else
      EXPECT_EQ(f, fingers) << line;
  }
  EXPECT_EQ(method_lines, 6);

  // The dumped quadratic-term matrix re-reads as symmetric.
  std::ifstream pf(out / "p.csv");
  ASSERT_TRUE(pf.good());
  std::vector<std::vector<double>> p;
  while (std::getline(pf, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    p.push_back(row);
  }
  ASSERT_EQ(p.size(), 8u);
  for (const auto& row : p) ASSERT_EQ(row.size(), 8u);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) EXPECT_EQ(p[i][j], p[j][i]);
  EXPECT_TRUE(fs::exists(out / "q.csv"));
  EXPECT_TRUE(fs::exists(out / "smai.csv"));
}

TEST_F(CliTest, SinglePrintsExhaustiveAsTheMaximum) {
  const auto cfg = write_config("multi.json", R"({
    "system": {"users": 4, "paths": 9, "fingers": 3, "chips_per_frame": 14,
               "decay": 0.1, "shadow_var": 0.5},
    "sweep": {"axis": "ebno_db", "values": [18], "trials": 1,
              "methods": ["conventional", "sphere", "box", "hybrid", "exhaustive"]}
  })");
  const auto r = run_cmd(std::string(kBin) + " single --config " + cfg.string() +
                         " --seed 13 --trial 1");
  EXPECT_EQ(r.exit_code, 0);
  std::istringstream lines(r.output);
  std::string line;
  double best = -1.0, exhaustive = -1.0;
  while (std::getline(lines, line)) {
    const auto pos = line.find(" dB (");
    if (pos == std::string::npos) continue;
    const auto open = line.find('(', pos);
    const double linear = std::stod(line.substr(open + 1));
    best = std::max(best, linear);
    if (line.find("exhaustive:") != std::string::npos) exhaustive = linear;
  }
  ASSERT_GT(exhaustive, 0.0);
  EXPECT_GE(exhaustive, best * (1.0 - 1e-12));
}

TEST_F(CliTest, PerMethodFailureWarnsButExitsZero) {
  // C(30,10) is far beyond the configured combination budget, so the
  // exhaustive method fails on every trial while the sweep still succeeds.
  const auto cfg = write_config("budget.json", R"({
    "system": {"users": 2, "paths": 30, "fingers": 10, "chips_per_frame": 40,
               "decay": 0.1, "shadow_var": 0.5},
    "sweep": {"axis": "ebno_db", "values": [10], "trials": 2,
              "methods": ["conventional", "exhaustive"]},
    "exhaustive_budget": 1000
  })");
  const auto out = dir_ / "out";
  const auto r = run_cmd(std::string(kBin) + " sweep --config " + cfg.string() + " --out " +
                         out.string());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("warning"), std::string::npos);
  const std::string csv = read_file(out / "results.csv");
  EXPECT_NE(csv.find(",exhaustive,"), std::string::npos);
  std::istringstream lines(csv);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find(",exhaustive,") != std::string::npos) {
      EXPECT_EQ(line.substr(line.size() - 2), ",2");  // both trials failed
    }
  }
}

TEST_F(CliTest, FingersAxisRequiresEbno) {
  const auto cfg = write_config("fingers.json", R"({
    "system": {"users": 2, "paths": 8, "fingers": 2, "chips_per_frame": 12,
               "decay": 0.1, "shadow_var": 0.5},
    "sweep": {"axis": "fingers", "values": [2, 3], "trials": 2, "methods": ["conventional"]}
  })");
  const auto r = run_cmd(std::string(kBin) + " sweep --config " + cfg.string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("ebno_db"), std::string::npos);
}

}  // namespace
