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

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dyndp/accountant.h"
#include "dyndp/diagnostics.h"
#include "dyndp/fedsim.h"
#include "dyndp/io.h"
#include "dyndp/rdp_audit.h"

namespace dyndp {
namespace {

using Json = nlohmann::json;

// Reads j[key] into out when present.
template <typename T>
absl::Status Optional(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return absl::OkStatus();
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(absl::StrFormat("config field '%s': %s", key, e.what()));
  }
  return absl::OkStatus();
}

#define DYNDP_RETURN_IF_ERROR(expr)            \
  do {                                         \
    if (absl::Status _s = (expr); !_s.ok()) {  \
      return _s;                               \
    }                                          \
  } while (0)

absl::Status CheckFinite(const TrainHistory& h) {
  for (const TrainRecord& r : h.records) {
    for (double v : {r.loss, r.acc, r.clip_fraction, r.avg_coord_grad_norm, r.clip,
                     r.sigma, r.mu, r.cum_eps}) {
      if (!std::isfinite(v)) {
        return absl::InternalError(absl::StrFormat("non-finite history value at step %d", r.step));
      }
    }
  }
  return absl::OkStatus();
}

std::string Join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

absl::Status Emit(CommandResult& result, const std::string& path,
                  const std::string& contents) {
  DYNDP_RETURN_IF_ERROR(WriteTextFile(path, contents));
  result.written_files.push_back(path);
  return absl::OkStatus();
}

absl::StatusOr<DpPlan> PlanFor(const ExperimentConfig& config, const PrivacyBudget& budget,
                               double sampling_rate) {
  ScheduleHyperparams hyper = ApplyMethod(config.method, config.schedule);
  hyper.sampling_rate = sampling_rate;
  absl::StatusOr<DpPlan> plan = BuildPlan(budget, hyper);
  if (!plan.ok()) return plan.status();
  DYNDP_RETURN_IF_ERROR(CheckPlanInvariants(*plan));
  return plan;
}

absl::Status EmitRun(CommandResult& result, const std::string& dir, const TrainHistory& history,
                     const StepSchedule& schedule, const DpPlan& plan, const Dataset& train) {
  DYNDP_RETURN_IF_ERROR(Emit(result, Join(dir, "plan.json"), PlanToJson(plan).dump(2) + "\n"));
  DYNDP_RETURN_IF_ERROR(Emit(result, Join(dir, "history.csv"), HistoryCsv(history)));
  absl::StatusOr<TheoryReport> report =
      BuildTheoryReport(history, schedule, plan.mu_tot.mu, train);
  if (!report.ok()) return report.status();
  DYNDP_RETURN_IF_ERROR(
      Emit(result, Join(dir, "theory.json"), TheoryReportToJson(*report).dump(2) + "\n"));
  if (history.aborted) return absl::InternalError(history.abort_reason);
  return CheckFinite(history);
}

}  // namespace

absl::StatusOr<Method> ParseMethod(const std::string& name) {
  if (name == "vanilla") return Method::kVanilla;
  if (name == "growmu") return Method::kGrowMu;
  if (name == "sensdecay") return Method::kSensDecay;
  if (name == "dynamic") return Method::kDynamic;
  return absl::InvalidArgumentError(absl::StrFormat(
      "unknown method '%s' (vanilla, growmu, sensdecay, dynamic)", name));
}

std::string MethodName(Method method) {
  switch (method) {
    case Method::kVanilla: return "vanilla";
    case Method::kGrowMu: return "growmu";
    case Method::kSensDecay: return "sensdecay";
    case Method::kDynamic: return "dynamic";
  }
  return "dynamic";
}

ScheduleHyperparams ApplyMethod(Method method, ScheduleHyperparams hyper) {
  switch (method) {
    case Method::kVanilla:
      hyper.rho_mu = 1.0;
      hyper.rho_c = 1.0;
      break;
    case Method::kGrowMu:
      hyper.rho_c = 1.0;
      break;
    case Method::kSensDecay:
      hyper.rho_mu = 1.0;
      break;
    case Method::kDynamic:
      break;
  }
  return hyper;
}

absl::StatusOr<ExperimentConfig> ConfigFromJson(const Json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("config must be a JSON object");
  ExperimentConfig c;
  if (j.contains("seed")) {
    std::uint64_t seed = 0;
    DYNDP_RETURN_IF_ERROR(Optional(j, "seed", seed));
    c.seed = seed;
  }
  DYNDP_RETURN_IF_ERROR(Optional(j, "output_dir", c.output_dir));
  if (j.contains("budget")) {
    const Json& b = j["budget"];
    DYNDP_RETURN_IF_ERROR(Optional(b, "epsilon", c.epsilon));
    if (b.contains("delta")) {
      double delta = 0.0;
      DYNDP_RETURN_IF_ERROR(Optional(b, "delta", delta));
      c.delta = delta;
    }
  }
  if (j.contains("schedule")) {
    const Json& s = j["schedule"];
    std::string method = MethodName(c.method);
    DYNDP_RETURN_IF_ERROR(Optional(s, "method", method));
    absl::StatusOr<Method> m = ParseMethod(method);
    if (!m.ok()) return m.status();
    c.method = *m;
    DYNDP_RETURN_IF_ERROR(Optional(s, "steps", c.schedule.steps));
    DYNDP_RETURN_IF_ERROR(Optional(s, "sampling_rate", c.schedule.sampling_rate));
    DYNDP_RETURN_IF_ERROR(Optional(s, "rho_mu", c.schedule.rho_mu));
    DYNDP_RETURN_IF_ERROR(Optional(s, "rho_c", c.schedule.rho_c));
    DYNDP_RETURN_IF_ERROR(Optional(s, "c0", c.schedule.c0));
  }
  if (j.contains("model")) {
    const Json& m = j["model"];
    std::string kind = ModelKindName(c.model);
    DYNDP_RETURN_IF_ERROR(Optional(m, "kind", kind));
    absl::StatusOr<ModelKind> k = ParseModelKind(kind);
    if (!k.ok()) return k.status();
    c.model = *k;
    DYNDP_RETURN_IF_ERROR(Optional(m, "hidden", c.hidden));
  }
  if (j.contains("data")) {
    const Json& d = j["data"];
    DYNDP_RETURN_IF_ERROR(Optional(d, "source", c.data.source));
    DYNDP_RETURN_IF_ERROR(Optional(d, "n", c.data.n));
    DYNDP_RETURN_IF_ERROR(Optional(d, "dim", c.data.dim));
    DYNDP_RETURN_IF_ERROR(Optional(d, "separation", c.data.separation));
    DYNDP_RETURN_IF_ERROR(Optional(d, "test_count", c.data.test_count));
    DYNDP_RETURN_IF_ERROR(Optional(d, "train_images", c.data.train_images));
    DYNDP_RETURN_IF_ERROR(Optional(d, "train_labels", c.data.train_labels));
    DYNDP_RETURN_IF_ERROR(Optional(d, "test_images", c.data.test_images));
    DYNDP_RETURN_IF_ERROR(Optional(d, "test_labels", c.data.test_labels));
  }
  if (j.contains("optimizer")) {
    const Json& o = j["optimizer"];
    std::string kind = OptimizerKindName(c.optimizer.kind);
    DYNDP_RETURN_IF_ERROR(Optional(o, "kind", kind));
    absl::StatusOr<OptimizerKind> k = ParseOptimizerKind(kind);
    if (!k.ok()) return k.status();
    c.optimizer.kind = *k;
    DYNDP_RETURN_IF_ERROR(Optional(o, "eta", c.optimizer.eta));
    DYNDP_RETURN_IF_ERROR(Optional(o, "beta1", c.optimizer.beta1));
    DYNDP_RETURN_IF_ERROR(Optional(o, "beta2", c.optimizer.beta2));
    DYNDP_RETURN_IF_ERROR(Optional(o, "z", c.optimizer.z));
  }
  if (j.contains("training")) {
    const Json& t = j["training"];
    DYNDP_RETURN_IF_ERROR(Optional(t, "eval_every", c.eval_every));
    DYNDP_RETURN_IF_ERROR(Optional(t, "record_params", c.record_params));
    std::string denom = "expected";
    DYNDP_RETURN_IF_ERROR(Optional(t, "denominator", denom));
    if (denom == "expected") {
      c.denominator = Denominator::kExpected;
    } else if (denom == "sampled") {
      c.denominator = Denominator::kSampled;
    } else {
      return absl::InvalidArgumentError(
          absl::StrFormat("denominator must be 'expected' or 'sampled', got '%s'", denom));
    }
  }
  if (j.contains("federated")) {
    const Json& f = j["federated"];
    DYNDP_RETURN_IF_ERROR(Optional(f, "num_clients", c.num_clients));
    DYNDP_RETURN_IF_ERROR(Optional(f, "client_sampling_rate", c.client_sampling_rate));
  }
  if (j.contains("plan")) {
    DYNDP_RETURN_IF_ERROR(Optional(j["plan"], "compare_rho_mu", c.compare_rho_mu));
  }
  if (j.contains("sweep")) {
    DYNDP_RETURN_IF_ERROR(Optional(j["sweep"], "inv_rhos", c.sweep_inv_rhos));
  }
  return c;
}

absl::StatusOr<ExperimentConfig> LoadConfigFile(const std::string& path) {
  absl::StatusOr<std::string> text = ReadTextFile(path);
  if (!text.ok()) return text.status();
  Json j = Json::parse(*text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrFormat("%s is not valid JSON", path));
  }
  return ConfigFromJson(j);
}

absl::Status ApplyOverrides(const ConfigOverrides& o, ExperimentConfig& c) {
  if (o.seed) c.seed = *o.seed;
  if (o.method) {
    absl::StatusOr<Method> m = ParseMethod(*o.method);
    if (!m.ok()) return m.status();
    c.method = *m;
  }
  if (o.optimizer) {
    absl::StatusOr<OptimizerKind> k = ParseOptimizerKind(*o.optimizer);
    if (!k.ok()) return k.status();
    c.optimizer.kind = *k;
  }
  if (o.epsilon) c.epsilon = *o.epsilon;
  if (o.delta) c.delta = *o.delta;
  if (o.rho_mu) c.schedule.rho_mu = *o.rho_mu;
  if (o.rho_c) c.schedule.rho_c = *o.rho_c;
  if (o.c0) c.schedule.c0 = *o.c0;
  if (o.sampling_rate) c.schedule.sampling_rate = *o.sampling_rate;
  if (o.steps) c.schedule.steps = *o.steps;
  if (o.out) c.output_dir = *o.out;
  return absl::OkStatus();
}

absl::Status ValidateConfig(const ExperimentConfig& c) {
  if (!c.seed.has_value()) {
    return absl::InvalidArgumentError("a seed is required (config \"seed\" or --seed)");
  }
  DYNDP_RETURN_IF_ERROR(c.schedule.Validate());
  if (!std::isfinite(c.epsilon) || c.epsilon < 0.0) {
    return absl::InvalidArgumentError("epsilon must be finite and >= 0");
  }
  if (c.delta && !(*c.delta > 0.0 && *c.delta < 1.0)) {
    return absl::InvalidArgumentError("delta must be in (0, 1)");
  }
  if (c.data.source == "synthetic") {
    if (c.data.n < 2 || c.data.dim < 1 || c.data.test_count < 1 ||
        c.data.test_count >= c.data.n) {
      return absl::InvalidArgumentError("synthetic data needs n > test_count >= 1 and dim >= 1");
    }
  } else if (c.data.source == "idx") {
    if (c.data.train_images.empty() || c.data.train_labels.empty() ||
        c.data.test_images.empty() || c.data.test_labels.empty()) {
      return absl::InvalidArgumentError("idx data needs train/test image and label paths");
    }
  } else {
    return absl::InvalidArgumentError(
        absl::StrFormat("data source must be 'synthetic' or 'idx', got '%s'", c.data.source));
  }
  if (!(c.optimizer.eta > 0.0)) return absl::InvalidArgumentError("eta must be positive");
  if (c.model == ModelKind::kMlp && c.hidden < 1) {
    return absl::InvalidArgumentError("mlp needs hidden >= 1");
  }
  if (c.num_clients < 1 || !(c.client_sampling_rate > 0.0) || c.client_sampling_rate > 1.0) {
    return absl::InvalidArgumentError("federated section needs num_clients >= 1 and rate in (0, 1]");
  }
  return absl::OkStatus();
}

std::string ResolveOutputDir(const ExperimentConfig& c, const std::string& command) {
  if (!c.output_dir.empty()) return c.output_dir;
  const char* root = std::getenv(kOutputRootEnv);
  const std::string base = root != nullptr && *root != '\0' ? root : "dyndp_out";
  return Join(base, command);
}

absl::StatusOr<LoadedData> LoadData(const ExperimentConfig& c) {
  LoadedData out;
  if (c.data.source == "idx") {
    absl::StatusOr<Dataset> train =
        LoadIdxDataset(c.data.train_images, c.data.train_labels, Split::kTrain);
    if (!train.ok()) return train.status();
    absl::StatusOr<Dataset> test = LoadIdxDataset(c.data.test_images, c.data.test_labels,
                                                  Split::kTest, train->num_classes);
    if (!test.ok()) return test.status();
    out.train = *std::move(train);
    out.test = *std::move(test);
    return out;
  }
  Dataset all = GenerateSynthetic(c.data.n, c.data.dim, c.data.separation, c.seed.value_or(0));
  auto [train, test] = SplitTrainTest(all, c.data.test_count);
  out.train = std::move(train);
  out.test = std::move(test);
  return out;
}

PrivacyBudget ResolveBudget(const ExperimentConfig& c, int train_size) {
  return {c.epsilon, c.delta.value_or(1.0 / (10.0 * train_size))};
}

absl::StatusOr<CommandResult> RunPlan(const ExperimentConfig& config) {
  DYNDP_RETURN_IF_ERROR(ValidateConfig(config));
  int n = 0;
  if (!config.delta) {
    absl::StatusOr<LoadedData> data = LoadData(config);
    if (!data.ok()) return data.status();
    n = data->train.size();
  }
  const PrivacyBudget budget = ResolveBudget(config, n);
  absl::StatusOr<DpPlan> plan = PlanFor(config, budget, config.schedule.sampling_rate);
  if (!plan.ok()) return plan.status();

  std::vector<ConsumptionCurve> curves;
  std::vector<double> rhos = config.compare_rho_mu;
  if (rhos.empty()) rhos.push_back(plan->hyper.rho_mu);
  for (double rho : rhos) {
    ScheduleHyperparams hyper = plan->hyper;
    hyper.rho_mu = rho;
    absl::StatusOr<DpPlan> alt = BuildPlan(budget, hyper);
    if (!alt.ok()) return alt.status();
    absl::StatusOr<std::vector<double>> eps =
        EpsilonConsumptionCurve(alt->mu, hyper.sampling_rate, budget.delta);
    if (!eps.ok()) return eps.status();
    curves.push_back({"eps_rho_mu_" + FormatDouble(rho), *std::move(eps)});
  }

  absl::StatusOr<std::string> schedule_csv = PlanScheduleCsv(*plan);
  if (!schedule_csv.ok()) return schedule_csv.status();
  absl::StatusOr<std::string> consumption_csv = ConsumptionCsv(curves);
  if (!consumption_csv.ok()) return consumption_csv.status();

  const std::string dir = ResolveOutputDir(config, "plan");
  CommandResult result;
  DYNDP_RETURN_IF_ERROR(Emit(result, Join(dir, "plan.json"), PlanToJson(*plan).dump(2) + "\n"));
  DYNDP_RETURN_IF_ERROR(Emit(result, Join(dir, "schedule.csv"), *schedule_csv));
  DYNDP_RETURN_IF_ERROR(Emit(result, Join(dir, "consumption.csv"), *consumption_csv));
  return result;
}

absl::StatusOr<CommandResult> RunTrain(const ExperimentConfig& config) {
  DYNDP_RETURN_IF_ERROR(ValidateConfig(config));
  absl::StatusOr<LoadedData> data = LoadData(config);
  if (!data.ok()) return data.status();
  const PrivacyBudget budget = ResolveBudget(config, data->train.size());
  absl::StatusOr<DpPlan> plan = PlanFor(config, budget, config.schedule.sampling_rate);
  if (!plan.ok()) return plan.status();
  absl::StatusOr<StepSchedule> schedule = ScheduleFromPlan(*plan);
  if (!schedule.ok()) return schedule.status();
  absl::StatusOr<Model> model = MakeModel(config.model, data->train.dim,
                                          data->train.num_classes, config.hidden, *config.seed);
  if (!model.ok()) return model.status();

  TrainConfig tc;
  tc.schedule = *schedule;
  tc.optimizer = config.optimizer;
  tc.seed = *config.seed;
  tc.eval_every = config.eval_every;
  tc.denominator = config.denominator;
  tc.record_params = config.record_params;
  absl::StatusOr<TrainHistory> history = Train(tc, *std::move(model), data->train, data->test);
  if (!history.ok()) return history.status();

  CommandResult result;
  DYNDP_RETURN_IF_ERROR(EmitRun(result, ResolveOutputDir(config, "train"), *history,
                                *schedule, *plan, data->train));
  return result;
}

absl::StatusOr<CommandResult> RunFedTrain(const ExperimentConfig& config) {
  DYNDP_RETURN_IF_ERROR(ValidateConfig(config));
  absl::StatusOr<LoadedData> data = LoadData(config);
  if (!data.ok()) return data.status();
  if (config.num_clients > data->train.size()) {
    return absl::InvalidArgumentError("more clients than training records");
  }
  const PrivacyBudget budget = ResolveBudget(config, data->train.size());
  absl::StatusOr<DpPlan> plan = PlanFor(config, budget, config.client_sampling_rate);
  if (!plan.ok()) return plan.status();
  absl::StatusOr<StepSchedule> schedule = ScheduleFromPlan(*plan);
  if (!schedule.ok()) return schedule.status();
  absl::StatusOr<Model> model = MakeModel(config.model, data->train.dim,
                                          data->train.num_classes, config.hidden, *config.seed);
  if (!model.ok()) return model.status();

  FedConfig fc;
  fc.partition = EvenPartition(data->train.size(), config.num_clients);
  fc.schedule = *schedule;
  fc.eta = config.optimizer.eta;
  fc.seed = *config.seed;
  fc.eval_every = config.eval_every;
  absl::StatusOr<TrainHistory> history = FedTrain(fc, *std::move(model), data->train, data->test);
  if (!history.ok()) return history.status();

  CommandResult result;
  DYNDP_RETURN_IF_ERROR(EmitRun(result, ResolveOutputDir(config, "fedtrain"), *history,
                                *schedule, *plan, data->train));
  return result;
}

absl::StatusOr<CommandResult> RunAudit(const std::string& plan_path, double delta,
                                       const std::string& output_dir) {
  absl::StatusOr<std::string> text = ReadTextFile(plan_path);
  if (!text.ok()) return text.status();
  Json j = Json::parse(*text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrFormat("%s is not valid JSON", plan_path));
  }
  absl::StatusOr<DpPlan> plan = PlanFromJson(j);
  if (!plan.ok()) return plan.status();
  if (delta <= 0.0) delta = plan->budget.delta;
  absl::StatusOr<std::vector<SandwichRow>> rows = SandwichAudit(*plan, delta);
  if (!rows.ok()) return rows.status();
  for (const SandwichRow& r : *rows) {
    if (!std::isfinite(r.eps_gdp_clt) || !std::isfinite(r.eps_rdp_upper)) {
      return absl::InternalError(absl::StrFormat("non-finite audit value at step %d", r.step));
    }
  }
  CommandResult result;
  DYNDP_RETURN_IF_ERROR(Emit(result, Join(output_dir, "sandwich.csv"), SandwichCsv(*rows)));
  return result;
}

absl::StatusOr<CommandResult> RunSweep(const ExperimentConfig& config) {
  DYNDP_RETURN_IF_ERROR(ValidateConfig(config));
  absl::StatusOr<LoadedData> data = LoadData(config);
  if (!data.ok()) return data.status();
  const PrivacyBudget budget = ResolveBudget(config, data->train.size());
  std::vector<double> rhos;
  if (config.sweep_inv_rhos.empty()) {
    rhos = DefaultSweepRhos();
  } else {
    for (double inv : config.sweep_inv_rhos) {
      if (!(inv > 0.0) || inv > 1.0) {
        return absl::InvalidArgumentError("sweep inv_rhos entries must be in (0, 1]");
      }
      rhos.push_back(1.0 / inv);
    }
  }

  std::string csv = "rho_mu,rho_c,mu0,final_test_acc,late_phase_variance\n";
  for (double rho_mu : rhos) {
    for (double rho_c : rhos) {
      ScheduleHyperparams hyper = config.schedule;
      hyper.rho_mu = rho_mu;
      hyper.rho_c = rho_c;
      absl::StatusOr<DpPlan> plan = BuildPlan(budget, hyper);
      if (!plan.ok()) return plan.status();
      absl::StatusOr<StepSchedule> schedule = ScheduleFromPlan(*plan);
      if (!schedule.ok()) return schedule.status();
      absl::StatusOr<Model> model = MakeModel(config.model, data->train.dim,
                                              data->train.num_classes, config.hidden,
                                              *config.seed);
      if (!model.ok()) return model.status();
      TrainConfig tc;
      tc.schedule = *schedule;
      tc.optimizer = config.optimizer;
      tc.seed = *config.seed;
      tc.eval_every = config.eval_every;
      tc.denominator = config.denominator;
      absl::StatusOr<TrainHistory> history = Train(tc, *std::move(model), data->train, data->test);
      if (!history.ok()) return history.status();
      if (history->aborted) return absl::InternalError(history->abort_reason);
      DYNDP_RETURN_IF_ERROR(CheckFinite(*history));
      absl::StrAppend(&csv, FormatDouble(rho_mu), ",", FormatDouble(rho_c), ",",
                      FormatDouble(plan->mu0), ",", FormatDouble(history->final_test_acc),
                      ",", FormatDouble(LatePhaseVariance(StabilityMetric(*history))), "\n");
    }
  }
  CommandResult result;
  DYNDP_RETURN_IF_ERROR(Emit(result, Join(ResolveOutputDir(config, "sweep"), "sweep.csv"), csv));
  return result;
}

}  // namespace dyndp
