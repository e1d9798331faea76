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

// Experiment configuration and the plan / train / fedtrain / audit / sweep
// commands behind the command-line tool.
//
// Config schema (JSON, every section optional except "seed"):
//   {
//     "seed": 7,
//     "budget":   {"epsilon": 1.2, "delta": 1e-5},      delta defaults to 1/(10N)
//     "schedule": {"method": "dynamic", "steps": 1000, "sampling_rate": 0.01,
//                  "rho_mu": 2, "rho_c": 2, "c0": 1.5},
//     "model":    {"kind": "logistic_regression", "hidden": 32},
//     "data":     {"source": "synthetic", "n": 5000, "dim": 20,
//                  "separation": 4, "test_count": 1000}
//              or {"source": "idx", "train_images": ..., "train_labels": ...,
//                  "test_images": ..., "test_labels": ...},
//     "optimizer": {"kind": "sgd", "eta": 0.15, "beta1": 0.9, "beta2": 0.999,
//                   "z": 1e-8},
//     "training": {"eval_every": 50, "denominator": "expected",
//                  "record_params": false},
//     "federated": {"num_clients": 250, "client_sampling_rate": 0.1},
//     "plan":      {"compare_rho_mu": [1, 2, 4]},
//     "sweep":     {"inv_rhos": [0.1, 0.2, ...]},
//     "output_dir": "runs/a"
//   }

#ifndef DYNDP_EXPERIMENT_H_
#define DYNDP_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "dyndp/dataset.h"
#include "dyndp/models.h"
#include "dyndp/planner.h"
#include "dyndp/trainer.h"

namespace dyndp {

// Environment variable naming the default output root.
inline constexpr char kOutputRootEnv[] = "DYNDP_OUTPUT_ROOT";

enum class Method { kVanilla, kGrowMu, kSensDecay, kDynamic };

absl::StatusOr<Method> ParseMethod(const std::string& name);
std::string MethodName(Method method);

// Forces the rho values a method implies: vanilla sets both to 1, growmu
// sets rho_c = 1, sensdecay sets rho_mu = 1, dynamic keeps both.
ScheduleHyperparams ApplyMethod(Method method, ScheduleHyperparams hyper);

struct DataConfig {
  std::string source = "synthetic";
  int n = 5000;
  int dim = 20;
  double separation = 4.0;
  int test_count = 1000;
  std::string train_images, train_labels, test_images, test_labels;
};

struct ExperimentConfig {
  std::optional<std::uint64_t> seed;
  double epsilon = 1.0;
  std::optional<double> delta;
  Method method = Method::kDynamic;
  ScheduleHyperparams schedule{.steps = 1000, .sampling_rate = 0.01,
                               .rho_mu = 1.0, .rho_c = 1.0, .c0 = 1.5};
  ModelKind model = ModelKind::kLogisticRegression;
  int hidden = 32;
  DataConfig data;
  OptimizerConfig optimizer;
  int eval_every = kDefaultEvalEvery;
  Denominator denominator = Denominator::kExpected;
  bool record_params = false;
  int num_clients = 250;
  double client_sampling_rate = 0.1;
  std::vector<double> compare_rho_mu;
  std::vector<double> sweep_inv_rhos;
  std::string output_dir;
};

absl::StatusOr<ExperimentConfig> ConfigFromJson(const nlohmann::json& j);
absl::StatusOr<ExperimentConfig> LoadConfigFile(const std::string& path);

// Command-line overrides; unset members leave the config untouched.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
  std::optional<double> epsilon, delta, rho_mu, rho_c, c0, sampling_rate;
  std::optional<int> steps;
  std::optional<std::string> optimizer;
  std::optional<std::string> out;
};

absl::Status ApplyOverrides(const ConfigOverrides& o, ExperimentConfig& config);

// Seed present, schedule hyper-parameters valid, data section consistent.
absl::Status ValidateConfig(const ExperimentConfig& config);

// Output directory: config.output_dir, else $DYNDP_OUTPUT_ROOT/<command>, else
// ./dyndp_out/<command>.
std::string ResolveOutputDir(const ExperimentConfig& config, const std::string& command);

struct LoadedData {
  Dataset train;
  Dataset test;
};
absl::StatusOr<LoadedData> LoadData(const ExperimentConfig& config);

// The budget with delta defaulted to 1/(10 N) for training-set size N.
PrivacyBudget ResolveBudget(const ExperimentConfig& config, int train_size);

struct CommandResult {
  std::vector<std::string> written_files;
};

absl::StatusOr<CommandResult> RunPlan(const ExperimentConfig& config);
absl::StatusOr<CommandResult> RunTrain(const ExperimentConfig& config);
absl::StatusOr<CommandResult> RunFedTrain(const ExperimentConfig& config);
// delta <= 0 means: use the plan's own delta.
absl::StatusOr<CommandResult> RunAudit(const std::string& plan_path, double delta,
                                       const std::string& output_dir);
absl::StatusOr<CommandResult> RunSweep(const ExperimentConfig& config);

}  // namespace dyndp

#endif  // DYNDP_EXPERIMENT_H_
