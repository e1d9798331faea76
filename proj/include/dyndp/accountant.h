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

// Gaussian differential privacy accounting: the closed-form privacy profile
// of a Gaussian mechanism, conversion between (epsilon, delta) budgets and
// the GDP parameter mu, and CLT composition of Poisson-subsampled steps with
// heterogeneous per-step mu_t = C_t / sigma_t.

#ifndef DYNDP_ACCOUNTANT_H_
#define DYNDP_ACCOUNTANT_H_

#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/types/span.h"

namespace dyndp {

// Compositions over fewer steps than this are flagged: the CLT limit is only
// reached after a few hundred steps.
inline constexpr int kCltWarmupSteps = 200;

// Per-step mu above this overflows exp(mu^2) in practice.
inline constexpr double kMaxStepMu = 6.0;

// Bracket and tolerance for inverting the profile in mu.
inline constexpr double kMuLowerBracket = 1e-6;
inline constexpr double kMuUpperBracket = 50.0;
inline constexpr double kInversionTolerance = 1e-12;

struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;

  // epsilon >= 0 and finite; 0 < delta < 1.
  absl::Status Validate() const;
};

// A Gaussian DP level, mu-GDP.
struct GdpLevel {
  double mu = 0.0;

  // Per-step levels above 1 fall outside the regime where the expected
  // denominator variant of DP-SGD keeps its noise-scale guarantee.
  bool AboveUnit() const { return mu > 1.0; }
};

// delta(eps; mu) = Phi(-eps/mu + mu/2) - e^eps * Phi(-eps/mu - mu/2), clamped
// to [0, 1]. The second term is evaluated as exp(eps + log Phi(.)).
absl::StatusOr<double> DeltaForEpsilon(double epsilon, double mu);

// The unique mu with DeltaForEpsilon(budget.epsilon, mu) == budget.delta.
// OutOfRange when the budget is not reachable inside [1e-6, 50].
absl::StatusOr<GdpLevel> MuForBudget(const PrivacyBudget& budget);

// Smallest epsilon >= 0 with DeltaForEpsilon(epsilon, mu) <= delta.
absl::StatusOr<double> EpsilonForMu(double mu, double delta);

struct Composition {
  GdpLevel total;
  int num_steps = 0;
  // No steps were supplied; total.mu is the 0 sentinel.
  bool empty = false;
  // num_steps < kCltWarmupSteps, the approximation may be loose.
  bool clt_may_be_loose = false;
};

// mu_tot = p * sqrt(sum_t (exp(mu_t^2) - 1)). Requires 0 < mu_t <= 6 and
// p in (0, 1].
absl::StatusOr<Composition> ComposeClt(absl::Span<const double> step_mus,
                                       double sampling_rate);

// Entry t is the epsilon at which the composition of the first t+1 steps
// meets `delta`. Nondecreasing.
absl::StatusOr<std::vector<double>> EpsilonConsumptionCurve(
    absl::Span<const double> step_mus, double sampling_rate, double delta);

}  // namespace dyndp

#endif  // DYNDP_ACCOUNTANT_H_
