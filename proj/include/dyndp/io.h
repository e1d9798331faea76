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

// File formats: plan JSON, schedule / consumption / history / sandwich CSV,
// theory-report JSON. Doubles are written with 17 significant digits so the
// output is a deterministic function of the values.

#ifndef DYNDP_IO_H_
#define DYNDP_IO_H_

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "dyndp/diagnostics.h"
#include "dyndp/planner.h"
#include "dyndp/rdp_audit.h"
#include "dyndp/trainer.h"

namespace dyndp {

std::string FormatDouble(double v);

nlohmann::ordered_json PlanToJson(const DpPlan& plan);
absl::StatusOr<DpPlan> PlanFromJson(const nlohmann::json& j);

// Columns: t, mu_t, C_t, sigma_t, cumulative_eps.
absl::StatusOr<std::string> PlanScheduleCsv(const DpPlan& plan);

struct ConsumptionCurve {
  std::string label;
  std::vector<double> eps;
};
// Columns: step, then one per curve. Curves must share a length.
absl::StatusOr<std::string> ConsumptionCsv(const std::vector<ConsumptionCurve>& curves);

// Columns: step, loss, acc, clip_fraction, avg_coord_grad_norm, C_t, sigma_t,
// mu_t, cum_eps.
std::string HistoryCsv(const TrainHistory& history);

// Columns: step, eps_gdp_clt, eps_rdp_upper.
std::string SandwichCsv(const std::vector<SandwichRow>& rows);

nlohmann::ordered_json TheoryReportToJson(const TheoryReport& report);

absl::Status WriteTextFile(const std::string& path, const std::string& contents);
absl::StatusOr<std::string> ReadTextFile(const std::string& path);

}  // namespace dyndp

#endif  // DYNDP_IO_H_
