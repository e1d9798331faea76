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

// dyndp command-line tool.
//
//   dyndp plan     --config cfg.json [--seed 7] [--eps 1.0] ...
//   dyndp train    --config cfg.json --seed 7 --method dynamic
//   dyndp fedtrain --config cfg.json --seed 7
//   dyndp audit    --plan out/plan/plan.json [--delta 1e-5] --out audit_dir
//   dyndp sweep    --config cfg.json --seed 7
//
// Exits 0 only when every output file was written and all values are finite.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dyndp/experiment.h"

namespace {

struct Flags {
  std::string config_path;
  dyndp::ConfigOverrides overrides;
};

void AddExperimentFlags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON experiment config");
  cmd->add_option("--seed", flags.overrides.seed, "RNG seed (required if not in config)");
  cmd->add_option("--method", flags.overrides.method, "vanilla, growmu, sensdecay or dynamic");
  cmd->add_option("--eps", flags.overrides.epsilon, "privacy budget epsilon");
  cmd->add_option("--delta", flags.overrides.delta, "privacy budget delta (default 1/(10N))");
  cmd->add_option("--rho-mu", flags.overrides.rho_mu, "final-to-initial mu ratio");
  cmd->add_option("--rho-c", flags.overrides.rho_c, "initial-to-final clip ratio");
  cmd->add_option("--c0", flags.overrides.c0, "initial clipping threshold");
  cmd->add_option("--steps", flags.overrides.steps, "number of steps or rounds");
  cmd->add_option("--sampling-rate", flags.overrides.sampling_rate, "Poisson sampling rate");
  cmd->add_option("--optimizer", flags.overrides.optimizer, "sgd or adam");
  cmd->add_option("--out", flags.overrides.out, "output directory");
}

absl::StatusOr<dyndp::ExperimentConfig> ResolveConfig(const Flags& flags) {
  dyndp::ExperimentConfig config;
  if (!flags.config_path.empty()) {
    absl::StatusOr<dyndp::ExperimentConfig> loaded = dyndp::LoadConfigFile(flags.config_path);
    if (!loaded.ok()) return loaded.status();
    config = *std::move(loaded);
  }
  if (absl::Status s = dyndp::ApplyOverrides(flags.overrides, config); !s.ok()) return s;
  return config;
}

int Report(const absl::StatusOr<dyndp::CommandResult>& result) {
  if (!result.ok()) {
    std::cerr << "dyndp: " << result.status() << "\n";
    return 1;
  }
  for (const std::string& path : result->written_files) std::cout << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic Gaussian-DP planner, trainer and auditor"};
  app.require_subcommand(1);

  Flags flags;
  CLI::App* plan = app.add_subcommand("plan", "build a privacy schedule");
  CLI::App* train = app.add_subcommand("train", "centralized DP-SGD / DP-Adam");
  CLI::App* fedtrain = app.add_subcommand("fedtrain", "federated DP training");
  CLI::App* sweep = app.add_subcommand("sweep", "grid over rho_mu and rho_c");
  for (CLI::App* cmd : {plan, train, fedtrain, sweep}) AddExperimentFlags(cmd, flags);

  CLI::App* audit = app.add_subcommand("audit", "RDP vs CLT sandwich for a plan");
  std::string plan_path;
  double audit_delta = 0.0;
  std::string audit_out;
  audit->add_option("--plan", plan_path, "plan JSON written by 'plan'")->required();
  audit->add_option("--delta", audit_delta, "delta for the epsilon conversion (default: plan's)");
  audit->add_option("--out", audit_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  if (audit->parsed()) {
    if (audit_out.empty()) {
      dyndp::ExperimentConfig defaults;
      audit_out = dyndp::ResolveOutputDir(defaults, "audit");
    }
    return Report(dyndp::RunAudit(plan_path, audit_delta, audit_out));
  }

  absl::StatusOr<dyndp::ExperimentConfig> config = ResolveConfig(flags);
  if (!config.ok()) {
    std::cerr << "dyndp: " << config.status() << "\n";
    return 1;
  }
  if (plan->parsed()) return Report(dyndp::RunPlan(*config));
  if (train->parsed()) return Report(dyndp::RunTrain(*config));
  if (fedtrain->parsed()) return Report(dyndp::RunFedTrain(*config));
  return Report(dyndp::RunSweep(*config));
}
