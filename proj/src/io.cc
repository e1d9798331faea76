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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dyndp/accountant.h"

namespace dyndp {
namespace {

template <typename T>
absl::StatusOr<T> Field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) {
    return absl::InvalidArgumentError(absl::StrFormat("missing field '%s'", key));
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrFormat("field '%s': %s", key, e.what()));
  }
}

}  // namespace

std::string FormatDouble(double v) { return absl::StrFormat("%.17g", v); }

nlohmann::ordered_json PlanToJson(const DpPlan& plan) {
  nlohmann::ordered_json j;
  j["hyper"] = {{"steps", plan.hyper.steps},
                {"sampling_rate", plan.hyper.sampling_rate},
                {"rho_mu", plan.hyper.rho_mu},
                {"rho_c", plan.hyper.rho_c},
                {"c0", plan.hyper.c0}};
  j["budget"] = {{"epsilon", plan.budget.epsilon}, {"delta", plan.budget.delta}};
  j["mu_tot"] = plan.mu_tot.mu;
  j["mu0"] = plan.mu0;
  j["mu_t"] = plan.mu;
  j["C_t"] = plan.clip;
  j["sigma_t"] = plan.sigma;
  return j;
}

absl::StatusOr<DpPlan> PlanFromJson(const nlohmann::json& j) {
  DpPlan plan;
  absl::StatusOr<nlohmann::json> hyper = Field<nlohmann::json>(j, "hyper");
  if (!hyper.ok()) return hyper.status();
  absl::StatusOr<nlohmann::json> budget = Field<nlohmann::json>(j, "budget");
  if (!budget.ok()) return budget.status();
  auto steps = Field<int>(*hyper, "steps");
  auto p = Field<double>(*hyper, "sampling_rate");
  auto rho_mu = Field<double>(*hyper, "rho_mu");
  auto rho_c = Field<double>(*hyper, "rho_c");
  auto c0 = Field<double>(*hyper, "c0");
  auto eps = Field<double>(*budget, "epsilon");
  auto delta = Field<double>(*budget, "delta");
  auto mu_tot = Field<double>(j, "mu_tot");
  auto mu0 = Field<double>(j, "mu0");
  auto mu = Field<std::vector<double>>(j, "mu_t");
  auto clip = Field<std::vector<double>>(j, "C_t");
  auto sigma = Field<std::vector<double>>(j, "sigma_t");
  for (const absl::Status& s :
       {steps.status(), p.status(), rho_mu.status(), rho_c.status(), c0.status(),
        eps.status(), delta.status(), mu_tot.status(), mu0.status(), mu.status(),
        clip.status(), sigma.status()}) {
    if (!s.ok()) return s;
  }
  plan.hyper = {*steps, *p, *rho_mu, *rho_c, *c0};
  plan.budget = {*eps, *delta};
  plan.mu_tot = GdpLevel{*mu_tot};
  plan.mu0 = *mu0;
  plan.mu = *std::move(mu);
  plan.clip = *std::move(clip);
  plan.sigma = *std::move(sigma);
  if (plan.mu.empty()) return absl::InvalidArgumentError("plan has no steps");
  if (plan.clip.size() != plan.mu.size() || plan.sigma.size() != plan.mu.size()) {
    return absl::InvalidArgumentError("plan arrays differ in length");
  }
  if (static_cast<int>(plan.mu.size()) != plan.hyper.steps) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "plan declares %d steps but carries %d", plan.hyper.steps, plan.mu.size()));
  }
  return plan;
}

absl::StatusOr<std::string> PlanScheduleCsv(const DpPlan& plan) {
  absl::StatusOr<std::vector<double>> eps =
      EpsilonConsumptionCurve(plan.mu, plan.hyper.sampling_rate, plan.budget.delta);
  if (!eps.ok()) return eps.status();
  std::string out = "t,mu_t,C_t,sigma_t,cumulative_eps\n";
  for (int i = 0; i < plan.steps(); ++i) {
    absl::StrAppend(&out, i + 1, ",", FormatDouble(plan.mu[i]), ",",
                    FormatDouble(plan.clip[i]), ",", FormatDouble(plan.sigma[i]), ",",
                    FormatDouble((*eps)[i]), "\n");
  }
  return out;
}

absl::StatusOr<std::string> ConsumptionCsv(const std::vector<ConsumptionCurve>& curves) {
  if (curves.empty()) return absl::InvalidArgumentError("no consumption curves");
  const size_t n = curves.front().eps.size();
  std::string out = "step";
  for (const ConsumptionCurve& c : curves) {
    if (c.eps.size() != n) return absl::InvalidArgumentError("curves differ in length");
    absl::StrAppend(&out, ",", c.label);
  }
  out += "\n";
  for (size_t i = 0; i < n; ++i) {
    absl::StrAppend(&out, i + 1);
    for (const ConsumptionCurve& c : curves) absl::StrAppend(&out, ",", FormatDouble(c.eps[i]));
    out += "\n";
  }
  return out;
}

std::string HistoryCsv(const TrainHistory& history) {
  std::string out =
      "step,loss,acc,clip_fraction,avg_coord_grad_norm,C_t,sigma_t,mu_t,cum_eps\n";
  for (const TrainRecord& r : history.records) {
    absl::StrAppend(&out, r.step, ",", FormatDouble(r.loss), ",", FormatDouble(r.acc), ",",
                    FormatDouble(r.clip_fraction), ",", FormatDouble(r.avg_coord_grad_norm),
                    ",", FormatDouble(r.clip), ",", FormatDouble(r.sigma), ",",
                    FormatDouble(r.mu), ",", FormatDouble(r.cum_eps), "\n");
  }
  return out;
}

std::string SandwichCsv(const std::vector<SandwichRow>& rows) {
  std::string out = "step,eps_gdp_clt,eps_rdp_upper\n";
  for (const SandwichRow& r : rows) {
    absl::StrAppend(&out, r.step, ",", FormatDouble(r.eps_gdp_clt), ",",
                    FormatDouble(r.eps_rdp_upper), "\n");
  }
  return out;
}

nlohmann::ordered_json TheoryReportToJson(const TheoryReport& report) {
  nlohmann::ordered_json j;
  j["d1"] = report.d1;
  j["d1_optimal_shape"] = report.d1_optimal_shape;
  j["bias_proxy"] = report.bias_proxy;
  j["G"] = report.gradient_bound;
  j["Q_t"] = report.curvature;
  j["Q_steps"] = report.curvature_steps;
  return j;
}

absl::Status WriteTextFile(const std::string& path, const std::string& contents) {
  std::error_code ec;
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  if (ec) {
    return absl::InternalError(absl::StrFormat("cannot create %s: %s", parent.string(), ec.message()));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::InternalError(absl::StrFormat("cannot open %s for writing", path));
  out << contents;
  out.close();
  if (!out) return absl::InternalError(absl::StrFormat("write to %s failed", path));
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrFormat("cannot open %s", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dyndp
