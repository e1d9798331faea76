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

#include "dyndp/dp_mech.h"

#include <cmath>
#include <random>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace dyndp {

absl::Status GradientBatch::Validate() const {
  if (dim <= 0 && !sample_ids.empty()) {
    return absl::InvalidArgumentError("gradient dimension must be positive");
  }
  if (values.size() != sample_ids.size() * static_cast<size_t>(dim)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%d gradient values for %d rows of dim %d", values.size(),
        sample_ids.size(), dim));
  }
  for (double v : values) {
    if (!std::isfinite(v)) return absl::InvalidArgumentError("non-finite gradient entry");
  }
  return absl::OkStatus();
}

double L2Norm(absl::Span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> Clip(absl::Span<const double> g, double threshold) {
  std::vector<double> out(g.begin(), g.end());
  const double norm = L2Norm(g);
  if (norm > threshold) {
    const double scale = threshold / norm;
    for (double& x : out) x *= scale;
  }
  return out;
}

absl::StatusOr<std::vector<int>> PoissonSample(int n, double p, Rng& rng) {
  if (!(p > 0.0 && p <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrFormat("sampling rate must be in (0, 1], got %g", p));
  }
  if (n < 0) return absl::InvalidArgumentError("population size must be >= 0");
  std::bernoulli_distribution coin(p);
  std::vector<int> picked;
  for (int i = 0; i < n; ++i) {
    if (coin(rng)) picked.push_back(i);
  }
  return picked;
}

absl::StatusOr<NoisyUpdate> NoisyAggregate(const GradientBatch& batch,
                                           const AggregateParams& params,
                                           Rng& noise_rng) {
  if (!(params.clip > 0.0)) {
    return absl::InvalidArgumentError(absl::StrFormat("clip must be > 0, got %g", params.clip));
  }
  if (!(params.sigma >= 0.0) || !std::isfinite(params.sigma)) {
    return absl::InvalidArgumentError(absl::StrFormat("sigma must be >= 0, got %g", params.sigma));
  }
  if (batch.dim <= 0) return absl::InvalidArgumentError("gradient dimension must be positive");

  NoisyUpdate update;
  update.batch_size = batch.size();
  if (batch.size() == 0 && params.denominator == Denominator::kSampled) {
    update.status = UpdateStatus::kSkippedEmptyBatch;
    update.vector.assign(batch.dim, 0.0);
    return update;
  }

  std::vector<double> sum(batch.dim, 0.0);
  int clipped = 0;
  for (int i = 0; i < batch.size(); ++i) {
    absl::Span<const double> g = batch.row(i);
    const double norm = L2Norm(g);
    if (norm > params.clip) {
      ++clipped;
      const double scale = params.clip / norm;
      for (int j = 0; j < batch.dim; ++j) sum[j] += g[j] * scale;
    } else {
      for (int j = 0; j < batch.dim; ++j) sum[j] += g[j];
    }
  }
  if (params.sigma > 0.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int j = 0; j < batch.dim; ++j) sum[j] += params.sigma * gauss(noise_rng);
  }

  double denom = 0.0;
  if (params.denominator == Denominator::kSampled) {
    denom = static_cast<double>(batch.size());
  } else {
    denom = params.sampling_rate * static_cast<double>(params.dataset_size);
    if (!(denom > 0.0)) {
      return absl::InvalidArgumentError("expected batch size p*N must be positive");
    }
  }
  for (double& x : sum) x /= denom;
  update.vector = std::move(sum);
  update.clip_fraction =
      batch.size() == 0 ? 0.0 : static_cast<double>(clipped) / batch.size();
  return update;
}

}  // namespace dyndp
