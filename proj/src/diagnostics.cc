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

#include "dyndp/diagnostics.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dyndp/numeric.h"

namespace dyndp {
namespace {

absl::Status CheckPositive(absl::Span<const double> v, const char* name) {
  for (size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
      return absl::InvalidArgumentError(
          absl::StrFormat("%s[%d] = %g must be positive", name, i, v[i]));
    }
  }
  return absl::OkStatus();
}

absl::Status CheckCommon(absl::Span<const double> clip, absl::Span<const double> shape,
                         double sampling_rate, double mu_tot) {
  if (clip.empty() || clip.size() != shape.size()) {
    return absl::InvalidArgumentError("clip and shape must be non-empty and equal length");
  }
  if (absl::Status s = CheckPositive(clip, "clip"); !s.ok()) return s;
  if (absl::Status s = CheckPositive(shape, "shape"); !s.ok()) return s;
  if (!(sampling_rate > 0.0) || !(mu_tot > 0.0)) {
    return absl::InvalidArgumentError("sampling rate and mu_tot must be positive");
  }
  return absl::OkStatus();
}

double SensitivitySum(absl::Span<const double> clip, absl::Span<const double> shape) {
  CompensatedSum s;
  for (size_t i = 0; i < clip.size(); ++i) {
    const double r = clip[i] / shape[i];
    s.Add(r * r);
  }
  return s.Result();
}

}  // namespace

absl::StatusOr<double> D1Term(absl::Span<const double> clip,
                              absl::Span<const double> shape,
                              double sampling_rate, double mu_tot) {
  if (absl::Status s = CheckCommon(clip, shape, sampling_rate, mu_tot); !s.ok()) return s;
  CompensatedSum noise;
  for (double v : shape) noise.Add(v * v);
  const double t = static_cast<double>(clip.size());
  return sampling_rate * sampling_rate * (2.0 / (mu_tot * mu_tot)) / t *
         noise.Result() * SensitivitySum(clip, shape);
}

absl::StatusOr<double> D2Term(absl::Span<const double> clip,
                              absl::Span<const double> shape,
                              absl::Span<const double> curvature,
                              double sampling_rate, double mu_tot) {
  if (absl::Status s = CheckCommon(clip, shape, sampling_rate, mu_tot); !s.ok()) return s;
  if (curvature.size() != clip.size()) {
    return absl::InvalidArgumentError("curvature list length differs from clip");
  }
  if (absl::Status s = CheckPositive(curvature, "curvature"); !s.ok()) return s;
  CompensatedSum noise;
  for (size_t i = 0; i < shape.size(); ++i) noise.Add(0.5 * curvature[i] * shape[i] * shape[i]);
  const double t = static_cast<double>(clip.size());
  return sampling_rate * sampling_rate * (2.0 / (mu_tot * mu_tot)) / t *
         noise.Result() * SensitivitySum(clip, shape);
}

absl::StatusOr<std::vector<double>> OptimalNoiseShape(
    absl::Span<const double> clip, std::optional<absl::Span<const double>> curvature) {
  if (clip.empty()) return absl::InvalidArgumentError("empty clipping sequence");
  if (absl::Status s = CheckPositive(clip, "clip"); !s.ok()) return s;
  if (curvature.has_value()) {
    if (curvature->size() != clip.size()) {
      return absl::InvalidArgumentError("curvature list length differs from clip");
    }
    if (absl::Status s = CheckPositive(*curvature, "curvature"); !s.ok()) return s;
  }
  std::vector<double> shape(clip.size());
  for (size_t i = 0; i < clip.size(); ++i) {
    shape[i] = std::sqrt(clip[i]);
    if (curvature.has_value()) shape[i] /= std::sqrt(std::sqrt((*curvature)[i]));
  }
  return shape;
}

StabilitySeries StabilityMetric(const TrainHistory& history, int window) {
  StabilitySeries out;
  for (const TrainRecord& r : history.records) out.norm.push_back(r.avg_coord_grad_norm);
  window = std::max(window, 1);
  out.windowed_variance.resize(out.norm.size());
  for (size_t t = 0; t < out.norm.size(); ++t) {
    const size_t begin = t + 1 >= static_cast<size_t>(window) ? t + 1 - window : 0;
    const double count = static_cast<double>(t + 1 - begin);
    // Shift by the first value so a constant window gives exactly zero.
    const double shift = out.norm[begin];
    double mean = 0.0;
    for (size_t i = begin; i <= t; ++i) mean += out.norm[i] - shift;
    mean /= count;
    double var = 0.0;
    for (size_t i = begin; i <= t; ++i) {
      const double d = out.norm[i] - shift - mean;
      var += d * d;
    }
    out.windowed_variance[t] = var / count;
  }
  return out;
}

double LatePhaseVariance(const StabilitySeries& series, double fraction) {
  const size_t n = series.windowed_variance.size();
  if (n == 0) return 0.0;
  const size_t tail = std::max<size_t>(1, static_cast<size_t>(std::ceil(fraction * n)));
  double s = 0.0;
  for (size_t i = n - tail; i < n; ++i) s += series.windowed_variance[i];
  return s / static_cast<double>(tail);
}

std::vector<double> ClipProbability(const TrainHistory& history) {
  std::vector<double> out;
  out.reserve(history.records.size());
  for (const TrainRecord& r : history.records) out.push_back(r.clip_fraction);
  return out;
}

double ClipFractionAt(const Model& model, const Dataset& data, double threshold) {
  if (data.size() == 0) return 0.0;
  std::vector<int> all(data.size());
  for (int i = 0; i < data.size(); ++i) all[i] = i;
  const GradientBatch batch = PerSampleGradients(model, data, all);
  int clipped = 0;
  for (int i = 0; i < batch.size(); ++i) clipped += L2Norm(batch.row(i)) > threshold ? 1 : 0;
  return static_cast<double>(clipped) / batch.size();
}

std::vector<double> EstimateCurvature(const Model& model, const Dataset& data,
                                      const std::vector<std::vector<double>>& snapshots) {
  std::vector<double> q;
  if (snapshots.size() < 2) return q;
  Model probe = model;
  std::vector<std::vector<double>> grads;
  for (const std::vector<double>& theta : snapshots) {
    probe.params.theta = theta;
    grads.push_back(FullBatchGradient(probe, data));
  }
  for (size_t i = 1; i < snapshots.size(); ++i) {
    double dg = 0.0;
    double dx = 0.0;
    for (size_t j = 0; j < snapshots[i].size(); ++j) {
      dg += (grads[i][j] - grads[i - 1][j]) * (grads[i][j] - grads[i - 1][j]);
      dx += (snapshots[i][j] - snapshots[i - 1][j]) * (snapshots[i][j] - snapshots[i - 1][j]);
    }
    q.push_back(dx > 0.0 ? std::sqrt(dg / dx) : 0.0);
  }
  return q;
}

absl::StatusOr<TheoryReport> BuildTheoryReport(const TrainHistory& history,
                                               const StepSchedule& schedule,
                                               double mu_tot, const Dataset& train) {
  TheoryReport report;
  report.gradient_bound = GradientNormBound(history.final_model, train.MaxRowNorm());
  // Noise-free schedules have no variance term.
  const bool has_noise =
      std::all_of(schedule.sigma.begin(), schedule.sigma.end(), [](double s) { return s > 0.0; });
  if (has_noise && mu_tot > 0.0) {
    absl::StatusOr<double> d1 = D1Term(schedule.clip, schedule.sigma, schedule.sampling_rate, mu_tot);
    if (!d1.ok()) return d1.status();
    report.d1 = *d1;
    absl::StatusOr<std::vector<double>> best = OptimalNoiseShape(schedule.clip);
    if (!best.ok()) return best.status();
    absl::StatusOr<double> d1_best = D1Term(schedule.clip, *best, schedule.sampling_rate, mu_tot);
    if (!d1_best.ok()) return d1_best.status();
    report.d1_optimal_shape = *d1_best;
  }
  double bias = 0.0;
  int evaluated = 0;
  for (const TrainRecord& r : history.records) {
    if (!r.evaluated) continue;
    bias += r.full_grad_norm * r.clip_fraction * report.gradient_bound;
    ++evaluated;
  }
  report.bias_proxy = evaluated > 0 ? bias / evaluated : 0.0;
  if (history.snapshots.size() >= 2) {
    report.curvature = EstimateCurvature(history.final_model, train, history.snapshots);
    report.curvature_steps.assign(history.snapshot_steps.begin() + 1,
                                  history.snapshot_steps.end());
  }
  return report;
}

}  // namespace dyndp
