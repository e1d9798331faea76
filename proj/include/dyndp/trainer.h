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

// Centralized DP training loop: at every step t = 1..T sample a Poisson
// minibatch, compute per-sample gradients, privatize with (C_t, sigma_t) and
// apply the optimizer.

#ifndef DYNDP_TRAINER_H_
#define DYNDP_TRAINER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dyndp/dataset.h"
#include "dyndp/dp_mech.h"
#include "dyndp/models.h"
#include "dyndp/optimizers.h"
#include "dyndp/planner.h"

namespace dyndp {

inline constexpr int kDefaultEvalEvery = 50;

// Stand-in for an infinite clipping threshold.
inline constexpr double kNoClip = 1e12;

// Per-step privatization parameters, indexed by t - 1.
struct StepSchedule {
  double sampling_rate = 1.0;
  std::vector<double> clip;
  std::vector<double> sigma;
  std::vector<double> mu;
  // CLT epsilon consumed after each step.
  std::vector<double> cum_eps;

  int steps() const { return static_cast<int>(clip.size()); }
};

absl::StatusOr<StepSchedule> ScheduleFromPlan(const DpPlan& plan);
absl::StatusOr<StepSchedule> ScheduleFromGeneralPlan(const GeneralPlan& plan,
                                                     double delta);
// sigma = 0 and C = kNoClip at every step; mu and cum_eps are reported as 0.
StepSchedule DisabledSchedule(int steps, double sampling_rate);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kSgd;
  double eta = 0.15;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double z = 1e-8;
};

struct TrainConfig {
  StepSchedule schedule;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  int eval_every = kDefaultEvalEvery;
  Denominator denominator = Denominator::kExpected;
  // false: plain minibatch-mean gradients, no clipping or noise.
  bool privatize = true;
  // Snapshot parameters at evaluation steps, for curvature estimates.
  bool record_params = false;
};

struct TrainRecord {
  int step = 0;
  // Mean loss of the sampled batch before the update.
  double loss = 0.0;
  // Held-out accuracy from the latest evaluation step.
  double acc = 0.0;
  double clip_fraction = 0.0;
  // Root-mean-square coordinate of the applied gradient estimate.
  double avg_coord_grad_norm = 0.0;
  double clip = 0.0;
  double sigma = 0.0;
  double mu = 0.0;
  double cum_eps = 0.0;
  int batch_size = 0;
  bool skipped = false;
  bool evaluated = false;
  // ||grad L(theta_t)|| over the training set, at evaluation steps only.
  double full_grad_norm = 0.0;
};

struct TrainHistory {
  std::vector<TrainRecord> records;
  Model final_model;
  double final_test_acc = 0.0;
  bool aborted = false;
  std::string abort_reason;
  // Parameters at evaluation steps when record_params is set.
  std::vector<int> snapshot_steps;
  std::vector<std::vector<double>> snapshots;
};

absl::StatusOr<TrainHistory> Train(const TrainConfig& config, Model model,
                                   const Dataset& train, const Dataset& test);

// Shared bookkeeping between centralized and federated loops.
namespace internal {

bool IsEvalStep(int t, int steps, int eval_every);
double RmsCoordinate(const std::vector<double>& v);

}  // namespace internal

}  // namespace dyndp

#endif  // DYNDP_TRAINER_H_
