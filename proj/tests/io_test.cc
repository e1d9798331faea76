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

#include "dyndp/io.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "dyndp/planner.h"
#include "gtest/gtest.h"

namespace dyndp {
namespace {

DpPlan SmallPlan() {
  return *BuildPlan({1.0, 1e-5}, {.steps = 250, .sampling_rate = 0.02, .rho_mu = 2.0,
                                  .rho_c = 1.5, .c0 = 1.2});
}

TEST(FormatDoubleTest, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678901234567}) {
    EXPECT_EQ(std::stod(FormatDouble(v)), v);
  }
}

TEST(PlanJsonTest, RoundTripIsExact) {
  const DpPlan plan = SmallPlan();
  const std::string text = PlanToJson(plan).dump();
  absl::StatusOr<DpPlan> back = PlanFromJson(nlohmann::json::parse(text));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->mu, plan.mu);
  EXPECT_EQ(back->clip, plan.clip);
  EXPECT_EQ(back->sigma, plan.sigma);
  EXPECT_EQ(back->mu0, plan.mu0);
  EXPECT_EQ(back->mu_tot.mu, plan.mu_tot.mu);
  EXPECT_EQ(back->budget.delta, plan.budget.delta);
  EXPECT_EQ(back->hyper.rho_c, plan.hyper.rho_c);
}

TEST(PlanJsonTest, RejectsEmptyAndMalformed) {
  nlohmann::json j = PlanToJson(SmallPlan());
  j["mu_t"] = nlohmann::json::array();
  j["C_t"] = nlohmann::json::array();
  j["sigma_t"] = nlohmann::json::array();
  EXPECT_FALSE(PlanFromJson(j).ok());
  j = PlanToJson(SmallPlan());
  j.erase("sigma_t");
  EXPECT_FALSE(PlanFromJson(j).ok());
  j = PlanToJson(SmallPlan());
  j["mu0"] = "abc";
  EXPECT_FALSE(PlanFromJson(j).ok());
  j = PlanToJson(SmallPlan());
  j["hyper"]["steps"] = 3;
  EXPECT_FALSE(PlanFromJson(j).ok());
}

TEST(CsvTest, Headers) {
  const DpPlan plan = SmallPlan();
  const std::string sched = *PlanScheduleCsv(plan);
  EXPECT_EQ(sched.substr(0, sched.find('\n')), "t,mu_t,C_t,sigma_t,cumulative_eps");
  EXPECT_EQ(std::count(sched.begin(), sched.end(), '\n'), 251);
  const std::string hist = HistoryCsv(TrainHistory{});
  EXPECT_EQ(hist, "step,loss,acc,clip_fraction,avg_coord_grad_norm,C_t,sigma_t,mu_t,cum_eps\n");
  EXPECT_EQ(SandwichCsv({{1, 0.5, 0.75}}), "step,eps_gdp_clt,eps_rdp_upper\n1,0.5,0.75\n");
}

TEST(CsvTest, ConsumptionColumns) {
  const std::string csv = *ConsumptionCsv({{"a", {0.1, 0.2}}, {"b", {0.3, 0.4}}});
  EXPECT_EQ(csv, "step,a,b\n1,0.10000000000000001,0.29999999999999999\n"
                 "2,0.20000000000000001,0.40000000000000002\n");
  EXPECT_FALSE(ConsumptionCsv({{"a", {0.1}}, {"b", {0.3, 0.4}}}).ok());
  EXPECT_FALSE(ConsumptionCsv({}).ok());
}

TEST(TheoryReportJsonTest, Keys) {
  TheoryReport r;
  r.d1 = 1.5;
  r.curvature = {0.2};
  r.curvature_steps = {50};
  const nlohmann::ordered_json j = TheoryReportToJson(r);
  EXPECT_EQ(j["d1"], 1.5);
  EXPECT_EQ(j["Q_t"][0], 0.2);
  EXPECT_EQ(j["Q_steps"][0], 50);
  EXPECT_TRUE(j.contains("bias_proxy"));
  EXPECT_TRUE(j.contains("G"));
}

TEST(TextFileTest, WriteCreatesDirectories) {
  const std::string dir =
      (std::filesystem::temp_directory_path() / "dyndp_io_test" / "a" / "b").string();
  std::filesystem::remove_all(std::filesystem::temp_directory_path() / "dyndp_io_test");
  ASSERT_TRUE(WriteTextFile(dir + "/x.txt", "hello\n").ok());
  EXPECT_EQ(*ReadTextFile(dir + "/x.txt"), "hello\n");
  EXPECT_EQ(ReadTextFile(dir + "/missing").status().code(), absl::StatusCode::kNotFound);
}

}  // namespace
}  // namespace dyndp
