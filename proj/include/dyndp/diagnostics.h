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

// Measurable pieces of the utility analysis: the privacy-noise variance term
// and its curvature-weighted variant, their minimizing noise shapes, the
// clipping-bias proxy, and gradient-norm stability of a training run.

#ifndef DYNDP_DIAGNOSTICS_H_
#define DYNDP_DIAGNOSTICS_H_

#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "dyndp/dataset.h"
#include "dyndp/models.h"
#include "dyndp/trainer.h"

namespace dyndp {

inline constexpr int kStabilityWindow = 50;

// p^2 (2 / mu_tot^2) (1/T) (sum_t shape_t^2) (sum_t C_t^2 / shape_t^2).
// Invariant under a common rescaling of `shape`.
absl::StatusOr<double> D1Term(absl::Span<const double> clip,
                              absl::Span<const double> shape,
                              double sampling_rate, double mu_tot);

// Curvature-weighted variant with (Q_t / 2) shape_t^2 in the first sum.
absl::StatusOr<double> D2Term(absl::Span<const double> clip,
                              absl::Span<const double> shape,
                              absl::Span<const double> curvature,
                              double sampling_rate, double mu_tot);

// sqrt(C_t), or sqrt(C_t) / Q_t^{1/4} when curvature estimates are given.
absl::StatusOr<std::vector<double>> OptimalNoiseShape(
    absl::Span<const double> clip,
    std::optional<absl::Span<const double>> curvature = std::nullopt);

struct StabilitySeries {
  std::vector<double> norm;
  // Population variance of norm over the trailing window ending at each step
  // (shorter at the start).
  std::vector<double> windowed_variance;
};

StabilitySeries StabilityMetric(const TrainHistory& history,
                                int window = kStabilityWindow);

// Mean windowed variance over the last `fraction` of the steps.
double LatePhaseVariance(const StabilitySeries& series, double fraction = 0.25);

std::vector<double> ClipProbability(const TrainHistory& history);

// Fraction of per-sample gradients with norm > threshold at fixed parameters.
double ClipFractionAt(const Model& model, const Dataset& data, double threshold);

// Secant curvature ||grad L(a) - grad L(b)|| / ||a - b|| between consecutive
// parameter snapshots. A heuristic; never used for accounting.
std::vector<double> EstimateCurvature(const Model& model, const Dataset& data,
                                      const std::vector<std::vector<double>>& snapshots);

struct TheoryReport {
  double d1 = 0.0;
  // D1 at the sqrt(C_t) shape for the same clipping sequence.
  double d1_optimal_shape = 0.0;
  double bias_proxy = 0.0;
  double gradient_bound = 0.0;
  std::vector<double> curvature;
  std::vector<int> curvature_steps;
};

// G is the analytic bound of the final model over the training inputs.
absl::StatusOr<TheoryReport> BuildTheoryReport(const TrainHistory& history,
                                               const StepSchedule& schedule,
                                               double mu_tot, const Dataset& train);

}  // namespace dyndp

#endif  // DYNDP_DIAGNOSTICS_H_
