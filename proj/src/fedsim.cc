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

#include "dyndp/fedsim.h"

#include <cmath>
#include <numeric>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dyndp/dp_mech.h"
#include "dyndp/optimizers.h"
#include "dyndp/rng.h"

namespace dyndp {

std::vector<ClientShard> EvenPartition(int n, int num_clients) {
  std::vector<ClientShard> shards;
  if (num_clients <= 0) return shards;
  const int base = n / num_clients;
  const int extra = n % num_clients;
  int begin = 0;
  for (int k = 0; k < num_clients; ++k) {
    const int size = base + (k < extra ? 1 : 0);
    shards.push_back({begin, begin + size});
    begin += size;
  }
  return shards;
}

absl::Status FedConfig::Validate(int n) const {
  if (partition.empty()) return absl::InvalidArgumentError("no clients");
  int expected_begin = 0;
  for (size_t k = 0; k < partition.size(); ++k) {
    const ClientShard& s = partition[k];
    if (s.begin != expected_begin || s.size() <= 0) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "client %d shard [%d, %d) breaks the contiguous disjoint cover", k,
          s.begin, s.end));
    }
    expected_begin = s.end;
  }
  if (expected_begin != n) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "partition covers %d of %d training rows", expected_begin, n));
  }
  if (!(eta > 0.0)) return absl::InvalidArgumentError("learning rate must be positive");
  if (schedule.steps() == 0) return absl::InvalidArgumentError("schedule has no rounds");
  return absl::OkStatus();
}

absl::StatusOr<RoundResult> FedRound(const FedConfig& config, const Dataset& train,
                                     FedState& state, int t) {
  if (t < 1 || t > config.schedule.steps()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "round %d outside 1..%d", t, config.schedule.steps()));
  }
  const double clip = config.schedule.clip[t - 1];
  const double sigma = config.schedule.sigma[t - 1];
  RoundResult result;
  Rng client_rng = MakeStream(config.seed, Stream::kClientSampling, t);
  absl::StatusOr<std::vector<int>> picked =
      PoissonSample(config.num_clients(), config.schedule.sampling_rate, client_rng);
  if (!picked.ok()) return picked.status();
  result.selected_clients = *std::move(picked);
  state.round = t;
  if (result.selected_clients.empty()) {
    result.skipped = true;
    return result;
  }

  const int dim = state.model.NumParams();
  std::vector<double> sum(dim, 0.0);
  double loss_sum = 0.0;
  int samples = 0;
  long clipped = 0;
  for (int k : result.selected_clients) {
    const ClientShard& shard = config.partition[k];
    std::vector<int> indices(shard.size());
    std::iota(indices.begin(), indices.end(), shard.begin);
    const GradientBatch batch = PerSampleGradients(state.model, train, indices);
    Rng noise_rng = MakeStream(config.seed, Stream::kNoise, t, k);
    absl::StatusOr<NoisyUpdate> local = NoisyAggregate(
        batch,
        {.clip = clip,
         .sigma = sigma,
         .denominator = Denominator::kSampled,
         .sampling_rate = 1.0,
         .dataset_size = shard.size()},
        noise_rng);
    if (!local.ok()) return local.status();
    for (int j = 0; j < dim; ++j) sum[j] += local->vector[j];
    for (double l : batch.losses) loss_sum += l;
    samples += batch.size();
    clipped += std::lround(local->clip_fraction * batch.size());
  }
  const double selected = static_cast<double>(result.selected_clients.size());
  for (double& x : sum) x /= selected;
  result.loss = loss_sum / samples;
  result.clip_fraction = static_cast<double>(clipped) / samples;
  if (absl::Status s = SgdStep(state.model.params, sum, config.eta); !s.ok()) return s;
  result.server_update = std::move(sum);
  return result;
}

absl::StatusOr<TrainHistory> FedTrain(const FedConfig& config, Model model,
                                      const Dataset& train, const Dataset& test) {
  if (absl::Status s = config.Validate(train.size()); !s.ok()) return s;
  if (model.input_dim != train.dim) {
    return absl::InvalidArgumentError("model input dimension does not match data");
  }
  const int rounds = config.schedule.steps();
  FedState state{std::move(model), 0};
  TrainHistory history;
  double last_loss = MeanLoss(state.model, train);
  double last_acc = Accuracy(state.model, test);
  for (int t = 1; t <= rounds; ++t) {
    TrainRecord rec;
    rec.step = t;
    rec.clip = config.schedule.clip[t - 1];
    rec.sigma = config.schedule.sigma[t - 1];
    rec.mu = config.schedule.mu[t - 1];
    rec.cum_eps = config.schedule.cum_eps[t - 1];
    const bool evaluate = internal::IsEvalStep(t, rounds, config.eval_every);
    if (evaluate) rec.full_grad_norm = L2Norm(FullBatchGradient(state.model, train));

    absl::StatusOr<RoundResult> round = FedRound(config, train, state, t);
    if (!round.ok()) return round.status();
    rec.skipped = round->skipped;
    if (!round->skipped) {
      last_loss = round->loss;
      rec.clip_fraction = round->clip_fraction;
      rec.avg_coord_grad_norm = internal::RmsCoordinate(round->server_update);
      for (int k : round->selected_clients) rec.batch_size += config.partition[k].size();
    }
    rec.loss = last_loss;
    if (!std::isfinite(rec.loss)) {
      history.aborted = true;
      history.abort_reason = absl::StrFormat("non-finite loss at round %d", t);
      history.records.push_back(rec);
      break;
    }
    if (evaluate) {
      last_acc = Accuracy(state.model, test);
      rec.evaluated = true;
    }
    rec.acc = last_acc;
    history.records.push_back(rec);
  }
  history.final_test_acc = Accuracy(state.model, test);
  history.final_model = std::move(state.model);
  return history;
}

}  // namespace dyndp
