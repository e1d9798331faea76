// Copyright 2026 The dyndp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dyndp/experiment.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "dyndp/io.h"
#include "gtest/gtest.h"

namespace dyndp {
namespace {

const std::string kData = DYNDP_TEST_DATA_DIR;

std::string TempDir(const std::string& name) {
  const std::filesystem::path p = std::filesystem::temp_directory_path() / "dyndp_exp" / name;
  std::filesystem::remove_all(p);
  return p.string();
}

std::vector<std::vector<std::string>> ReadCsv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(*ReadTextFile(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

ExperimentConfig Golden() {
  absl::StatusOr<ExperimentConfig> c = LoadConfigFile(kData + "/golden_config.json");
  EXPECT_TRUE(c.ok()) << c.status();
  return *c;
}

TEST(ConfigTest, ParsesGoldenConfig) {
  const ExperimentConfig c = Golden();
  EXPECT_EQ(*c.seed, 20261018u);
  EXPECT_EQ(c.schedule.steps, 400);
  EXPECT_EQ(c.schedule.rho_c, 2.0);
  EXPECT_EQ(*c.delta, 1e-5);
  EXPECT_EQ(c.num_clients, 100);
  EXPECT_EQ(c.compare_rho_mu, (std::vector<double>{1, 2, 4}));
  EXPECT_EQ(c.denominator, Denominator::kExpected);
  EXPECT_TRUE(ValidateConfig(c).ok());
}

TEST(ConfigTest, SeedIsMandatory) {
  absl::StatusOr<ExperimentConfig> c = ConfigFromJson(nlohmann::json::parse("{}"));
  ASSERT_TRUE(c.ok());
  EXPECT_FALSE(ValidateConfig(*c).ok());
  EXPECT_FALSE(RunPlan(*c).ok());
  ConfigOverrides o;
  o.seed = 3;
  ASSERT_TRUE(ApplyOverrides(o, *c).ok());
  EXPECT_TRUE(ValidateConfig(*c).ok());
}

TEST(ConfigTest, RejectsBadFields) {
  for (const char* text :
       {R"({"schedule": {"method": "fancy"}})", R"({"model": {"kind": "cnn"}})",
        R"({"optimizer": {"kind": "rmsprop"}})", R"({"training": {"denominator": "x"}})",
        R"({"schedule": {"steps": "many"}})", R"([1, 2])"}) {
    EXPECT_FALSE(ConfigFromJson(nlohmann::json::parse(text)).ok()) << text;
  }
  ExperimentConfig c = Golden();
  c.schedule.rho_mu = 0.5;
  EXPECT_FALSE(ValidateConfig(c).ok());
  c = Golden();
  c.data.source = "csv";
  EXPECT_FALSE(ValidateConfig(c).ok());
  c = Golden();
  c.delta = 2.0;
  EXPECT_FALSE(ValidateConfig(c).ok());
}

TEST(ConfigTest, OverridesApply) {
  ExperimentConfig c = Golden();
  ConfigOverrides o;
  o.method = "vanilla";
  o.epsilon = 0.5;
  o.rho_mu = 3.0;
  o.steps = 50;
  o.optimizer = "adam";
  o.out = "/tmp/x";
  ASSERT_TRUE(ApplyOverrides(o, c).ok());
  EXPECT_EQ(c.method, Method::kVanilla);
  EXPECT_EQ(c.epsilon, 0.5);
  EXPECT_EQ(c.schedule.rho_mu, 3.0);
  EXPECT_EQ(c.schedule.steps, 50);
  EXPECT_EQ(c.optimizer.kind, OptimizerKind::kAdam);
  EXPECT_EQ(c.output_dir, "/tmp/x");
  o.method = "nope";
  EXPECT_FALSE(ApplyOverrides(o, c).ok());
}

TEST(MethodTest, FlagMapping) {
  const ScheduleHyperparams h{.steps = 10, .rho_mu = 3.0, .rho_c = 5.0};
  EXPECT_EQ(ApplyMethod(Method::kVanilla, h).rho_mu, 1.0);
  EXPECT_EQ(ApplyMethod(Method::kVanilla, h).rho_c, 1.0);
  EXPECT_EQ(ApplyMethod(Method::kGrowMu, h).rho_mu, 3.0);
  EXPECT_EQ(ApplyMethod(Method::kGrowMu, h).rho_c, 1.0);
  EXPECT_EQ(ApplyMethod(Method::kSensDecay, h).rho_mu, 1.0);
  EXPECT_EQ(ApplyMethod(Method::kSensDecay, h).rho_c, 5.0);
  EXPECT_EQ(ApplyMethod(Method::kDynamic, h).rho_mu, 3.0);
  EXPECT_EQ(ApplyMethod(Method::kDynamic, h).rho_c, 5.0);
  for (const char* m : {"vanilla", "growmu", "sensdecay", "dynamic"}) {
    EXPECT_EQ(MethodName(*ParseMethod(m)), m);
  }
}

TEST(OutputDirTest, ExplicitThenEnvThenDefault) {
  ExperimentConfig c;
  c.output_dir = "/x/y";
  EXPECT_EQ(ResolveOutputDir(c, "plan"), "/x/y");
  c.output_dir.clear();
  setenv(kOutputRootEnv, "/root_here", 1);
  EXPECT_EQ(ResolveOutputDir(c, "train"), "/root_here/train");
  unsetenv(kOutputRootEnv);
  EXPECT_EQ(ResolveOutputDir(c, "train"), "dyndp_out/train");
}

TEST(BudgetTest, DeltaDefaultsToTenthOfInverseN) {
  ExperimentConfig c;
  EXPECT_EQ(ResolveBudget(c, 4000).delta, 1.0 / 40000);
  c.delta = 1e-6;
  EXPECT_EQ(ResolveBudget(c, 4000).delta, 1e-6);
}

TEST(RunPlanTest, ConsumptionCurvesEndAtBudgetAndRerunsMatch) {
  ExperimentConfig c = Golden();
  c.output_dir = TempDir("plan1");
  absl::StatusOr<CommandResult> r = RunPlan(c);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->written_files.size(), 3u);
  const auto rows = ReadCsv(c.output_dir + "/consumption.csv");
  ASSERT_EQ(rows.size(), 401u);
  EXPECT_EQ(rows[0].size(), 4u);
  for (int col = 1; col <= 3; ++col) EXPECT_NEAR(std::stod(rows.back()[col]), 1.0, 1e-6);

  const std::string first = *ReadTextFile(c.output_dir + "/schedule.csv");
  c.output_dir = TempDir("plan2");
  ASSERT_TRUE(RunPlan(c).ok());
  EXPECT_EQ(*ReadTextFile(c.output_dir + "/schedule.csv"), first);
  // Same config, same bytes as the committed fixture.
  EXPECT_EQ(*ReadTextFile(c.output_dir + "/plan.json"), *ReadTextFile(kData + "/golden_plan.json"));
}

TEST(RunPlanTest, VanillaIsFlat) {
  ExperimentConfig c = Golden();
  c.method = Method::kVanilla;
  c.output_dir = TempDir("vanilla");
  ASSERT_TRUE(RunPlan(c).ok());
  const auto rows = ReadCsv(c.output_dir + "/schedule.csv");
  for (size_t i = 2; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][1], rows[1][1]);
    EXPECT_EQ(rows[i][2], rows[1][2]);
    EXPECT_EQ(rows[i][3], rows[1][3]);
  }
}

TEST(RunTrainTest, OptimizersShareThePrivacyColumns) {
  ExperimentConfig c = Golden();
  c.output_dir = TempDir("sgd");
  ASSERT_TRUE(RunTrain(c).ok());
  c.optimizer.kind = OptimizerKind::kAdam;
  c.optimizer.eta = 0.01;
  c.output_dir = TempDir("adam");
  ASSERT_TRUE(RunTrain(c).ok());
  const auto a = ReadCsv(std::filesystem::temp_directory_path().string() + "/dyndp_exp/sgd/history.csv");
  const auto b = ReadCsv(c.output_dir + "/history.csv");
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(a[0], b[0]);
  bool trajectories_differ = false;
  for (size_t i = 1; i < a.size(); ++i) {
    for (int col = 5; col <= 8; ++col) EXPECT_EQ(a[i][col], b[i][col]);
    trajectories_differ |= a[i][4] != b[i][4];
  }
  EXPECT_TRUE(trajectories_differ);
  EXPECT_TRUE(std::filesystem::exists(c.output_dir + "/theory.json"));
}

TEST(RunFedTrainTest, WritesHistory) {
  ExperimentConfig c = Golden();
  c.schedule.steps = 60;
  c.output_dir = TempDir("fed");
  absl::StatusOr<CommandResult> r = RunFedTrain(c);
  ASSERT_TRUE(r.ok()) << r.status();
  const auto rows = ReadCsv(c.output_dir + "/history.csv");
  EXPECT_EQ(rows.size(), 61u);
  c.num_clients = 100000;
  EXPECT_FALSE(RunFedTrain(c).ok());
}

TEST(RunAuditTest, GoldenPlanMatchesFrozenCsv) {
  const std::string out = TempDir("audit");
  absl::StatusOr<CommandResult> r = RunAudit(kData + "/golden_plan.json", 0.0, out);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(*ReadTextFile(out + "/sandwich.csv"), *ReadTextFile(kData + "/golden_sandwich.csv"));
  const auto rows = ReadCsv(out + "/sandwich.csv");
  for (size_t i = 1; i < rows.size(); ++i) {
    if (std::stoi(rows[i][0]) >= 200) EXPECT_GE(std::stod(rows[i][2]), std::stod(rows[i][1]));
  }
}

TEST(RunAuditTest, EmptyPlanIsError) {
  nlohmann::json j = PlanToJson(*BuildPlan({1.0, 1e-5}, {.steps = 3, .sampling_rate = 0.1}));
  j["mu_t"] = nlohmann::json::array();
  j["C_t"] = nlohmann::json::array();
  j["sigma_t"] = nlohmann::json::array();
  const std::string dir = TempDir("empty");
  ASSERT_TRUE(WriteTextFile(dir + "/plan.json", j.dump()).ok());
  EXPECT_FALSE(RunAudit(dir + "/plan.json", 1e-5, dir).ok());
  EXPECT_FALSE(RunAudit(dir + "/missing.json", 1e-5, dir).ok());
}

TEST(RunSweepTest, SmallGrid) {
  ExperimentConfig c = Golden();
  c.schedule.steps = 50;
  c.sweep_inv_rhos = {1.0, 0.5};
  c.output_dir = TempDir("sweep");
  ASSERT_TRUE(RunSweep(c).ok());
  const auto rows = ReadCsv(c.output_dir + "/sweep.csv");
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0][0], "rho_mu");
  EXPECT_EQ(rows[4][0], "2");
  EXPECT_EQ(rows[4][1], "2");
}

}  // namespace
}  // namespace dyndp
