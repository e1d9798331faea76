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

// Federated dynamic DP-SGD simulation. Each round t: Poisson-sample clients
// with rate p; every selected client clips its per-sample gradients with C_t,
// sums them, adds its own N(0, sigma_t^2 I) draw and divides by its shard
// size; the server averages the received vectors over |S_t| in client-id
// order and takes an SGD step. Rounds with no selected client are skipped.

#ifndef DYNDP_FEDSIM_H_
#define DYNDP_FEDSIM_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dyndp/dataset.h"
#include "dyndp/models.h"
#include "dyndp/trainer.h"

namespace dyndp {

// Half-open index range [begin, end) of the training set held by one client.
struct ClientShard {
  int begin = 0;
  int end = 0;
  int size() const { return end - begin; }
};

// Contiguous, near-equal shards covering 0..n-1.
std::vector<ClientShard> EvenPartition(int n, int num_clients);

struct FedConfig {
  std::vector<ClientShard> partition;
  // Per-round C_t, sigma_t; its sampling_rate is the client sampling rate.
  StepSchedule schedule;
  double eta = 0.15;
  std::uint64_t seed = 0;
  int eval_every = kDefaultEvalEvery;

  int num_clients() const { return static_cast<int>(partition.size()); }
  // Shards must be non-empty, disjoint and cover [0, n).
  absl::Status Validate(int n) const;
};

struct FedState {
  Model model;
  int round = 0;
};

struct RoundResult {
  std::vector<int> selected_clients;
  // Server-side average of the client vectors; empty when skipped.
  std::vector<double> server_update;
  bool skipped = false;
  double loss = 0.0;
  double clip_fraction = 0.0;
};

// Runs round t (1-based) and advances the state.
absl::StatusOr<RoundResult> FedRound(const FedConfig& config, const Dataset& train,
                                     FedState& state, int t);

absl::StatusOr<TrainHistory> FedTrain(const FedConfig& config, Model model,
                                      const Dataset& train, const Dataset& test);

}  // namespace dyndp

#endif  // DYNDP_FEDSIM_H_
