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

#include "dyndp/trainer.h"

#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dyndp/accountant.h"
#include "dyndp/rng.h"

namespace dyndp {
namespace internal {

bool IsEvalStep(int t, int steps, int eval_every) {
  return t == 1 || t == steps || (eval_every > 0 && t % eval_every == 0);
}

double RmsCoordinate(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return L2Norm(v) / std::sqrt(static_cast<double>(v.size()));
}

}  // namespace internal

namespace {

absl::Status ValidateSchedule(const StepSchedule& s) {
  const int n = s.steps();
  if (n == 0) return absl::InvalidArgumentError("schedule has no steps");
  if (static_cast<int>(s.sigma.size()) != n || static_cast<int>(s.mu.size()) != n ||
      static_cast<int>(s.cum_eps.size()) != n) {
    return absl::InvalidArgumentError("schedule arrays differ in length");
  }
  if (!(s.sampling_rate > 0.0) || s.sampling_rate > 1.0) {
    return absl::InvalidArgumentError("sampling rate must be in (0, 1]");
  }
  for (int i = 0; i < n; ++i) {
    if (!(s.clip[i] > 0.0) || !(s.sigma[i] >= 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("step %d: need C > 0 and sigma >= 0", i + 1));
    }
  }
  return absl::OkStatus();
}

std::vector<double> BatchMean(const GradientBatch& batch) {
  std::vector<double> sum(batch.dim, 0.0);
  for (int i = 0; i < batch.size(); ++i) {
    absl::Span<const double> g = batch.row(i);
    for (int j = 0; j < batch.dim; ++j) sum[j] += g[j];
  }
  for (double& x : sum) x /= static_cast<double>(batch.size());
  return sum;
}

double MeanOf(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

absl::StatusOr<StepSchedule> ScheduleFromPlan(const DpPlan& plan) {
  absl::StatusOr<std::vector<double>> eps =
      EpsilonConsumptionCurve(plan.mu, plan.hyper.sampling_rate, plan.budget.delta);
  if (!eps.ok()) return eps.status();
  StepSchedule s;
  s.sampling_rate = plan.hyper.sampling_rate;
  s.clip = plan.clip;
  s.sigma = plan.sigma;
  s.mu = plan.mu;
  s.cum_eps = *std::move(eps);
  return s;
}

absl::StatusOr<StepSchedule> ScheduleFromGeneralPlan(const GeneralPlan& plan,
                                                     double delta) {
  StepSchedule s;
  s.sampling_rate = plan.sampling_rate;
  s.clip = plan.clip;
  s.sigma = plan.Sigmas();
  s.mu = plan.StepMus();
  absl::StatusOr<std::vector<double>> eps =
      EpsilonConsumptionCurve(s.mu, plan.sampling_rate, delta);
  if (!eps.ok()) return eps.status();
  s.cum_eps = *std::move(eps);
  return s;
}

StepSchedule DisabledSchedule(int steps, double sampling_rate) {
  StepSchedule s;
  s.sampling_rate = sampling_rate;
  s.clip.assign(steps, kNoClip);
  s.sigma.assign(steps, 0.0);
  s.mu.assign(steps, 0.0);
  s.cum_eps.assign(steps, 0.0);
  return s;
}

absl::StatusOr<TrainHistory> Train(const TrainConfig& config, Model model,
                                   const Dataset& train, const Dataset& test) {
  const StepSchedule& sched = config.schedule;
  if (absl::Status s = ValidateSchedule(sched); !s.ok()) return s;
  if (train.size() == 0) return absl::InvalidArgumentError("empty training set");
  if (model.input_dim != train.dim || model.num_classes < train.num_classes) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "model expects dim %d / %d classes, data has dim %d / %d classes",
        model.input_dim, model.num_classes, train.dim, train.num_classes));
  }
  if (!(config.optimizer.eta > 0.0)) {
    return absl::InvalidArgumentError("learning rate must be positive");
  }

  const int steps = sched.steps();
  const int n = train.size();
  AdamState adam = MakeAdamState(model.NumParams(), config.optimizer.beta1,
                                 config.optimizer.beta2, config.optimizer.z);
  TrainHistory history;
  history.records.reserve(steps);
  double last_loss = MeanLoss(model, train);
  double last_acc = Accuracy(model, test);

  for (int t = 1; t <= steps; ++t) {
    TrainRecord rec;
    rec.step = t;
    rec.clip = sched.clip[t - 1];
    rec.sigma = sched.sigma[t - 1];
    rec.mu = sched.mu[t - 1];
    rec.cum_eps = sched.cum_eps[t - 1];

    Rng sample_rng = MakeStream(config.seed, Stream::kSampling, t);
    absl::StatusOr<std::vector<int>> indices = PoissonSample(n, sched.sampling_rate, sample_rng);
    if (!indices.ok()) return indices.status();
    const GradientBatch batch = PerSampleGradients(model, train, *indices);
    rec.batch_size = batch.size();
    if (batch.size() > 0) last_loss = MeanOf(batch.losses);
    rec.loss = last_loss;
    if (!std::isfinite(rec.loss)) {
      history.aborted = true;
      history.abort_reason = absl::StrFormat("non-finite loss at step %d", t);
      history.records.push_back(rec);
      break;
    }
    const bool evaluate = internal::IsEvalStep(t, steps, config.eval_every);
    if (evaluate) {
      rec.full_grad_norm = L2Norm(FullBatchGradient(model, train));
      if (config.record_params) {
        history.snapshot_steps.push_back(t);
        history.snapshots.push_back(model.params.theta);
      }
    }

    std::vector<double> direction;
    bool skip = false;
    if (config.privatize) {
      Rng noise_rng = MakeStream(config.seed, Stream::kNoise, t, 0);
      absl::StatusOr<NoisyUpdate> update = NoisyAggregate(
          batch,
          {.clip = rec.clip,
           .sigma = rec.sigma,
           .denominator = config.denominator,
           .sampling_rate = sched.sampling_rate,
           .dataset_size = n},
          noise_rng);
      if (!update.ok()) return update.status();
      skip = update->status == UpdateStatus::kSkippedEmptyBatch;
      rec.clip_fraction = update->clip_fraction;
      direction = std::move(update->vector);
    } else if (batch.size() == 0) {
      skip = true;
    } else {
      direction = BatchMean(batch);
    }

    if (!skip) {
      rec.avg_coord_grad_norm = internal::RmsCoordinate(direction);
      absl::Status st =
          config.optimizer.kind == OptimizerKind::kSgd
              ? SgdStep(model.params, direction, config.optimizer.eta)
              : AdamStep(model.params, adam, direction, config.optimizer.eta);
      if (!st.ok()) return st;
    }
    rec.skipped = skip;
    if (evaluate) {
      last_acc = Accuracy(model, test);
      rec.evaluated = true;
    }
    rec.acc = last_acc;
    history.records.push_back(rec);
  }
  history.final_test_acc = Accuracy(model, test);
  history.final_model = std::move(model);
  return history;
}

}  // namespace dyndp
