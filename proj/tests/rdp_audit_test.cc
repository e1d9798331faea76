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

#include "dyndp/rdp_audit.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dyndp/planner.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace dyndp {
namespace {

TEST(DefaultRdpOrdersTest, Contents) {
  const std::vector<int> o = DefaultRdpOrders();
  ASSERT_EQ(o.size(), 65u);
  EXPECT_EQ(o.front(), 2);
  EXPECT_EQ(o[62], 64);
  EXPECT_EQ(o[63], 96);
  EXPECT_EQ(o[64], 128);
}

TEST(RdpStepTest, UnsubsampledGaussian) {
  for (double z : {0.5, 1.0, 3.0}) {
    absl::StatusOr<double> e = RdpStep(2, 1.0, z);
    ASSERT_TRUE(e.ok());
    EXPECT_NEAR(*e, 1.0 / (z * z), 1e-14);
    e = RdpStep(17, 1.0, z);
    ASSERT_TRUE(e.ok());
    EXPECT_NEAR(*e, 17.0 / (2 * z * z), 1e-13);
  }
}

TEST(RdpStepTest, NoSamplingIsFree) {
  for (int a : DefaultRdpOrders()) {
    absl::StatusOr<double> e = RdpStep(a, 0.0, 1.0);
    ASSERT_TRUE(e.ok());
    EXPECT_EQ(*e, 0.0);
  }
}

TEST(RdpStepTest, MatchesBinomialOracle) {
  struct Case { int a; double q, z; };
  for (Case c : {Case{16, 1.0 / 240, 2.0}, Case{2, 0.01, 1.1}, Case{64, 0.004, 5.0},
                 Case{128, 0.02, 8.0}, Case{30, 0.1, 0.9}}) {
    absl::StatusOr<double> e = RdpStep(c.a, c.q, c.z);
    ASSERT_TRUE(e.ok());
    const double want = static_cast<double>(oracle::RdpStep(c.a, c.q, c.z));
    EXPECT_NEAR(*e, want, 1e-12 * want + 1e-300) << c.a;
  }
}

TEST(RdpStepTest, RejectsBadInput) {
  EXPECT_FALSE(RdpStep(1, 0.1, 1.0).ok());
  EXPECT_FALSE(RdpStep(4, 1.5, 1.0).ok());
  EXPECT_FALSE(RdpStep(4, 0.1, 0.0).ok());
}

TEST(RdpCurveTest, ComposesAdditively) {
  RdpCurve curve = MakeRdpCurve({2, 8, 32});
  for (int i = 0; i < 10; ++i) ASSERT_TRUE(curve.Compose(0.01, 1.5).ok());
  for (size_t i = 0; i < curve.orders.size(); ++i) {
    EXPECT_NEAR(curve.eps_alpha[i], 10 * *RdpStep(curve.orders[i], 0.01, 1.5), 1e-14);
  }
}

TEST(AuditPlanTest, SingleStepMatchesGaussianConversion) {
  absl::StatusOr<DpPlan> plan =
      BuildPlan({3.0, 1e-5}, {.steps = 1, .sampling_rate = 1.0, .rho_mu = 1.0, .rho_c = 1.0,
                              .c0 = 1.0});
  ASSERT_TRUE(plan.ok());
  absl::StatusOr<std::vector<AuditPoint>> pts = AuditPlan(*plan, 1e-5);
  ASSERT_TRUE(pts.ok());
  ASSERT_EQ(pts->size(), 1u);
  // R(alpha) = alpha / (2 z^2) with z = 1 / mu.
  const double z = plan->sigma[0] / plan->clip[0];
  double want = INFINITY;
  for (int a : DefaultRdpOrders()) {
    want = std::min(want, a / (2 * z * z) + std::log(1e5) / (a - 1));
  }
  EXPECT_NEAR((*pts)[0].eps_rdp_upper, want, 1e-12);
  // The continuous optimum lower-bounds the integer one.
  const double cont = 1 / (2 * z * z) + std::sqrt(2 * std::log(1e5)) / z;
  EXPECT_GE((*pts)[0].eps_rdp_upper, cont - 1e-12);
}

TEST(AuditPlanTest, FlatPlanMonotone) {
  absl::StatusOr<DpPlan> plan =
      BuildPlan({1.0, 1e-5}, {.steps = 500, .sampling_rate = 0.01, .c0 = 1.0});
  ASSERT_TRUE(plan.ok());
  absl::StatusOr<std::vector<AuditPoint>> pts = AuditPlan(*plan, 1e-5);
  ASSERT_TRUE(pts.ok());
  for (size_t i = 1; i < pts->size(); ++i) {
    EXPECT_GE((*pts)[i].eps_rdp_upper, (*pts)[i - 1].eps_rdp_upper);
    EXPECT_EQ((*pts)[i].step, static_cast<int>(i) + 1);
  }
}

TEST(SandwichAuditTest, UpperBoundAboveCltAfterWarmup) {
  for (double rho : {1.0, 3.0}) {
    absl::StatusOr<DpPlan> plan =
        BuildPlan({1.0, 1e-5}, {.steps = 1000, .sampling_rate = 0.01, .rho_mu = rho,
                                .rho_c = rho, .c0 = 1.0});
    ASSERT_TRUE(plan.ok());
    absl::StatusOr<std::vector<SandwichRow>> rows = SandwichAudit(*plan, 1e-5);
    ASSERT_TRUE(rows.ok());
    for (const SandwichRow& r : *rows) {
      if (r.step >= 200) EXPECT_GE(r.eps_rdp_upper, r.eps_gdp_clt) << r.step;
    }
    EXPECT_NEAR(rows->back().eps_gdp_clt, 1.0, 1e-6);
  }
}

TEST(AuditScheduleTest, EmptyIsError) {
  EXPECT_FALSE(AuditSchedule({}, 0.1, 1e-5).ok());
  DpPlan empty;
  EXPECT_FALSE(SandwichAudit(empty, 1e-5).ok());
}

}  // namespace
}  // namespace dyndp
