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

// The per-step privatization mechanism: Poisson subsampling, per-sample l2
// clipping, one Gaussian draw added to the clipped sum, normalization.

#ifndef DYNDP_DP_MECH_H_
#define DYNDP_DP_MECH_H_

#include <cstdint>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "dyndp/rng.h"

namespace dyndp {

// Row-major per-sample gradients of one sampled minibatch.
struct GradientBatch {
  int dim = 0;
  std::vector<double> values;
  std::vector<int> sample_ids;
  // Per-sample loss, same order as sample_ids.
  std::vector<double> losses;

  int size() const { return static_cast<int>(sample_ids.size()); }
  absl::Span<const double> row(int i) const {
    return absl::MakeConstSpan(values).subspan(static_cast<size_t>(i) * dim, dim);
  }
  absl::Status Validate() const;
};

// How the noisy clipped sum is normalized.
enum class Denominator {
  // |X_t|, the realized batch size.
  kSampled,
  // p * N, the expected batch size.
  kExpected,
};

enum class UpdateStatus {
  kApplied,
  // Empty batch under Denominator::kSampled; the step must be skipped.
  kSkippedEmptyBatch,
};

struct NoisyUpdate {
  std::vector<double> vector;
  double clip_fraction = 0.0;
  int batch_size = 0;
  UpdateStatus status = UpdateStatus::kApplied;
};

double L2Norm(absl::Span<const double> v);

// g * min(1, C / ||g||). The zero vector maps to itself.
std::vector<double> Clip(absl::Span<const double> g, double threshold);

// Independent Bernoulli(p) inclusion of each of 0..n-1, p in (0, 1]. May be
// empty.
absl::StatusOr<std::vector<int>> PoissonSample(int n, double p, Rng& rng);

struct AggregateParams {
  double clip = 1.0;
  double sigma = 0.0;
  Denominator denominator = Denominator::kExpected;
  double sampling_rate = 1.0;
  int dataset_size = 1;
};

// Clips each row to params.clip, sums rows in order, adds N(0, sigma^2 I) to
// the sum and divides by the denominator. No noise is drawn when sigma == 0.
absl::StatusOr<NoisyUpdate> NoisyAggregate(const GradientBatch& batch,
                                           const AggregateParams& params,
                                           Rng& noise_rng);

}  // namespace dyndp

#endif  // DYNDP_DP_MECH_H_
