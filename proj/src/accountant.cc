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

#include "dyndp/accountant.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dyndp/numeric.h"

namespace dyndp {
namespace {

absl::Status ValidateSamplingRate(double p) {
  if (!std::isfinite(p) || p <= 0.0 || p > 1.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sampling rate must be in (0, 1], got %g", p));
  }
  return absl::OkStatus();
}

absl::Status ValidateStepMu(double mu) {
  if (!std::isfinite(mu) || mu <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("per-step mu must be positive and finite, got %g", mu));
  }
  if (mu > kMaxStepMu) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "per-step mu %g exceeds the overflow guard %g", mu, kMaxStepMu));
  }
  return absl::OkStatus();
}

// Profile without argument checks.
double Profile(double epsilon, double mu) {
  const double ratio = epsilon / mu;
  const double first = NormalCdf(-ratio + 0.5 * mu);
  const double second = std::exp(epsilon + LogNormalCdf(-ratio - 0.5 * mu));
  return std::clamp(first - second, 0.0, 1.0);
}

}  // namespace

absl::Status PrivacyBudget::Validate() const {
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be finite and >= 0, got %g", epsilon));
  }
  if (!std::isfinite(delta) || delta <= 0.0 || delta >= 1.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must be in (0, 1), got %g", delta));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> DeltaForEpsilon(double epsilon, double mu) {
  if (!std::isfinite(epsilon) || !std::isfinite(mu)) {
    return absl::InvalidArgumentError("non-finite epsilon or mu");
  }
  if (epsilon < 0.0 || mu <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("need epsilon >= 0 and mu > 0, got (%g, %g)", epsilon, mu));
  }
  return Profile(epsilon, mu);
}

absl::StatusOr<GdpLevel> MuForBudget(const PrivacyBudget& budget) {
  if (absl::Status s = budget.Validate(); !s.ok()) return s;
  const double epsilon = budget.epsilon;
  absl::StatusOr<double> mu = InverseIncreasing(
      [epsilon](double m) { return Profile(epsilon, m); }, budget.delta,
      {.lower = kMuLowerBracket,
       .upper = kMuUpperBracket,
       .tolerance = kInversionTolerance,
       .max_iterations = 200});
  if (!mu.ok()) {
    return absl::OutOfRangeError(absl::StrFormat(
        "budget (%g, %g) unreachable for mu in [%g, %g]: %s", budget.epsilon,
        budget.delta, kMuLowerBracket, kMuUpperBracket, mu.status().message()));
  }
  return GdpLevel{*mu};
}

absl::StatusOr<double> EpsilonForMu(double mu, double delta) {
  if (!std::isfinite(mu) || mu <= 0.0) {
    return absl::InvalidArgumentError(absl::StrFormat("mu must be > 0, got %g", mu));
  }
  if (!std::isfinite(delta) || delta <= 0.0 || delta >= 1.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must be in (0, 1), got %g", delta));
  }
  if (Profile(0.0, mu) <= delta) return 0.0;
  double upper = 1.0;
  while (Profile(upper, mu) > delta) {
    upper *= 2.0;
    if (upper > 1e6) {
      return absl::OutOfRangeError(
          absl::StrFormat("no epsilon below 1e6 reaches delta %g at mu %g", delta, mu));
    }
  }
  // Profile is decreasing in epsilon; invert its negation.
  return InverseIncreasing([mu](double e) { return -Profile(e, mu); }, -delta,
                           {.lower = 0.0,
                            .upper = upper,
                            .tolerance = kInversionTolerance,
                            .max_iterations = 200});
}

absl::StatusOr<Composition> ComposeClt(absl::Span<const double> step_mus,
                                       double sampling_rate) {
  if (absl::Status s = ValidateSamplingRate(sampling_rate); !s.ok()) return s;
  Composition out;
  out.num_steps = static_cast<int>(step_mus.size());
  if (step_mus.empty()) {
    out.empty = true;
    out.clt_may_be_loose = true;
    return out;
  }
  CompensatedSum sum;
  for (double mu : step_mus) {
    if (absl::Status s = ValidateStepMu(mu); !s.ok()) return s;
    sum.Add(std::expm1(mu * mu));
  }
  out.total.mu = sampling_rate * std::sqrt(sum.Result());
  out.clt_may_be_loose = out.num_steps < kCltWarmupSteps;
  return out;
}

absl::StatusOr<std::vector<double>> EpsilonConsumptionCurve(
    absl::Span<const double> step_mus, double sampling_rate, double delta) {
  if (absl::Status s = ValidateSamplingRate(sampling_rate); !s.ok()) return s;
  std::vector<double> curve;
  curve.reserve(step_mus.size());
  CompensatedSum sum;
  double previous = 0.0;
  for (double mu : step_mus) {
    if (absl::Status s = ValidateStepMu(mu); !s.ok()) return s;
    sum.Add(std::expm1(mu * mu));
    const double prefix_mu = sampling_rate * std::sqrt(sum.Result());
    absl::StatusOr<double> eps = EpsilonForMu(prefix_mu, delta);
    if (!eps.ok()) return eps.status();
    // Bisection jitter must not break monotonicity.
    previous = std::max(previous, *eps);
    curve.push_back(previous);
  }
  return curve;
}

}  // namespace dyndp
