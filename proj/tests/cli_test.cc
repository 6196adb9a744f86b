// Copyright 2026 The allocdp Authors
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


#include "allocdp/cli.h"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "allocdp/core_dp.h"
#include "allocdp/mc_oracle.h"
#include "gtest/gtest.h"
#include "json.hpp"

namespace allocdp {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "allocdp");
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path TempPath(const std::string& name) {
  return fs::temp_directory_path() /
         ("allocdp_cli_test_" + std::to_string(::getpid()) + "_" + name);
}

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(Cli({}).code, kExitUsage);
  EXPECT_EQ(Cli({"bogus"}).code, kExitUsage);
  EXPECT_EQ(Cli({"epsilon", "--sigma", "1"}).code, kExitUsage);
  EXPECT_EQ(Cli({"epsilon", "--sigma", "1", "--t", "10", "--delta", "2"}).code,
            kExitUsage);
  EXPECT_EQ(Cli({"epsilon", "--sigma", "-1", "--t", "10", "--delta", "1e-6"})
                .code,
            kExitUsage);
  EXPECT_EQ(Cli({"epsilon", "--sigma", "1", "--t", "10", "--k", "11",
                 "--delta", "1e-6"})
                .code,
            kExitUsage);
  EXPECT_EQ(Cli({"epsilon", "--sigma", "1", "--t", "10", "--methods", "pld",
                 "--delta", "1e-6"})
                .code,
            kExitUsage);
  CliRun r = Cli({"epsilon", "--scheme", "shuffle", "--sigma", "1", "--t", "10",
               "--delta", "1e-6"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(r.err.empty());
}

TEST(CliTest, LocalEpsilonMatchesGaussian) {
  CliRun r = Cli({"epsilon", "--scheme", "local", "--sigma", "1", "--t", "1",
               "--k", "1", "--delta", "1e-6"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  json j = json::parse(r.out);
  EXPECT_EQ(j["command"], "epsilon");
  EXPECT_NEAR(j["result"]["value"].get<double>(),
              *GaussianEpsilon(1.0, *Delta::FromValue(1e-6)), 1e-9);
}

TEST(CliTest, AllocationEpsilonJsonFields) {
  CliRun r = Cli({"epsilon", "--scheme", "allocation", "--sigma", "1", "--t",
               "1000", "--k", "1", "--delta", "1e-8"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  json j = json::parse(r.out);
  const json& res = j["result"];
  EXPECT_EQ(res["solved_for"], "epsilon");
  EXPECT_TRUE(res["winning_method"].is_string());
  EXPECT_TRUE(res["remove_winner"].is_string());
  EXPECT_TRUE(res["add_winner"].is_string());
  for (const char* m :
       {"decomposition", "truncated_poisson", "recursive", "direct_rdp"}) {
    EXPECT_TRUE(res["methods"].contains(m)) << m;
  }
  EXPECT_TRUE(res["baseline_poisson"].is_number());
  EXPECT_TRUE(res["baseline_local"].is_number());
  EXPECT_EQ(j["inputs"]["delta"].get<double>(), 1e-8);
}

TEST(CliTest, PoissonZeroRateDelta) {
  CliRun r = Cli({"delta", "--scheme", "poisson", "--lambda", "0", "--epsilon",
               "1", "--sigma", "1", "--t", "100"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(json::parse(r.out)["result"]["value"].get<double>(), 0.0);
}

TEST(CliTest, NoBoundAvailableExitsInfeasible) {
  CliRun r = Cli({"epsilon", "--sigma", "1", "--t", "100", "--k", "4",
               "--methods", "decomposition,recursive", "--delta", "1e-6"});
  EXPECT_EQ(r.code, kExitInfeasible);
  EXPECT_NE(r.err.find("k>1 unsupported"), std::string::npos);
}

TEST(CliTest, ConfigFileAndOverride) {
  const fs::path cfg = TempPath("cfg.txt");
  {
    std::ofstream f(cfg);
    f << "# comment\nscheme = local\nsigma=2\nt=1\ndelta=1e-6\n";
  }
  CliRun from_file = Cli({"epsilon", "--config", cfg.string()});
  ASSERT_EQ(from_file.code, kExitOk) << from_file.err;
  EXPECT_NEAR(json::parse(from_file.out)["result"]["value"].get<double>(),
              *GaussianEpsilon(2.0, *Delta::FromValue(1e-6)), 1e-9);
  CliRun overridden = Cli({"epsilon", "--config", cfg.string(), "--sigma", "1"});
  ASSERT_EQ(overridden.code, kExitOk) << overridden.err;
  EXPECT_NEAR(json::parse(overridden.out)["result"]["value"].get<double>(),
              *GaussianEpsilon(1.0, *Delta::FromValue(1e-6)), 1e-9);
  fs::remove(cfg);
  EXPECT_EQ(Cli({"epsilon", "--config", "/nonexistent/allocdp.cfg"}).code,
            kExitIo);
}

TEST(CliTest, SweepCsvIsStableAndByteIdentical) {
  const fs::path a = TempPath("a.csv");
  const fs::path b = TempPath("b.csv");
  const std::vector<std::string> base = {
      "sweep", "--sigma", "1", "--vary", "t", "--start", "4", "--stop", "64",
      "--count", "3", "--spacing", "log", "--delta", "1e-5"};
  std::vector<std::string> args_a = base, args_b = base;
  args_a.insert(args_a.end(), {"--out", a.string(), "--threads", "1"});
  args_b.insert(args_b.end(), {"--out", b.string(), "--threads", "3"});
  args_a.insert(args_a.begin() + 3, {"--t", "4"});
  args_b.insert(args_b.begin() + 3, {"--t", "4"});
  ASSERT_EQ(Cli(args_a).code, kExitOk);
  ASSERT_EQ(Cli(args_b).code, kExitOk);
  const std::string text = ReadFile(a);
  EXPECT_EQ(text, ReadFile(b));
  std::istringstream lines(text);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, kSweepCsvHeader);
  int rows = 0;
  std::string line;
  std::vector<std::string> values;
  while (std::getline(lines, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 10) << line;
    if (rows % 3 == 1) values.push_back(line.substr(0, line.find(',', 2)));
  }
  EXPECT_EQ(rows, 9);  // 3 values x {remove, add, both}
  EXPECT_EQ(values[0], "t,4");
  EXPECT_EQ(values[1], "t,16");
  EXPECT_EQ(values[2], "t,64");
  fs::remove(a);
  fs::remove(b);
}

TEST(CliTest, SweepInfeasibleCellsAreEmpty) {
  CliRun r = Cli({"sweep", "--sigma", "1", "--t", "100", "--k", "4", "--vary",
               "sigma", "--values", "1,2", "--delta", "1e-6", "--direction",
               "remove"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  // decomposition is the fifth column and unsupported for k > 1.
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  ASSERT_GE(cells.size(), 8u);
  EXPECT_EQ(cells[4], "");
  EXPECT_FALSE(cells[7].empty());
}

TEST(CliTest, SweepValidatesGrid) {
  EXPECT_EQ(Cli({"sweep", "--sigma", "1", "--t", "10", "--vary", "sigma",
                 "--values", "1,2,2", "--delta", "1e-6"})
                .code,
            kExitUsage);
  EXPECT_EQ(Cli({"sweep", "--sigma", "1", "--t", "10", "--vary", "sigma",
                 "--delta", "1e-6"})
                .code,
            kExitUsage);
  EXPECT_EQ(Cli({"sweep", "--sigma", "1", "--t", "10", "--vary", "sigma",
                 "--values", "1,2", "--delta", "1e-6", "--out",
                 "/nonexistent/dir/out.csv"})
                .code,
            kExitIo);
}

TEST(CliTest, McJson) {
  CliRun r = Cli({"mc", "--sigma", "1", "--t", "1", "--epsilon", "1", "--n",
               "20000", "--seed", "5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  json j = json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["half_width"].get<double>(),
                   HoeffdingHalfWidth(20000, 0.99));
  EXPECT_NEAR(j["reference_closed_form"].get<double>(),
              0.1269367375066439458, 1e-12);
  EXPECT_EQ(j["estimates"]["remove"]["seed"], 5);
  CliRun again = Cli({"mc", "--sigma", "1", "--t", "1", "--epsilon", "1", "--n",
                   "20000", "--seed", "5", "--threads", "2"});
  EXPECT_EQ(r.out.substr(r.out.find("\"half_width\"")),
            again.out.substr(again.out.find("\"half_width\"")));
  CliRun multi = Cli({"mc", "--sigma", "1", "--t", "4", "--epsilon", "1", "--n",
                   "1000", "--direction", "add"});
  ASSERT_EQ(multi.code, kExitOk);
  json m = json::parse(multi.out);
  EXPECT_FALSE(m.contains("reference_closed_form"));
  EXPECT_FALSE(m["estimates"].contains("remove"));
}

TEST(CliTest, UtilityCsv) {
  CliRun r = Cli({"utility", "--p", "0.5", "--t", "10", "--sigma", "0",
               "--n-values", "100,1000", "--trials", "200", "--seed", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, kUtilityCsvHeader);
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 4);
  CliRun again = Cli({"utility", "--p", "0.5", "--t", "10", "--sigma", "0",
                   "--n-values", "100,1000", "--trials", "200", "--seed", "3"});
  EXPECT_EQ(r.out, again.out);
  EXPECT_EQ(Cli({"utility", "--trials", "10"}).code, kExitUsage);
}

}  // namespace
}  // namespace allocdp
