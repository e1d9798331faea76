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

// Renyi-DP upper bound for Poisson-subsampled Gaussian steps with per-step
// noise multipliers sigma_t / C_t. Integer orders only; the per-step bound is
// the exact binomial expansion
//
//   A_alpha = sum_k binom(alpha, k) (1-q)^{alpha-k} q^k exp((k^2 - k) / (2 z^2))
//   eps(alpha) = log(A_alpha) / (alpha - 1)
//
// evaluated in log space. Conversion to (eps, delta) uses
// eps = min_alpha [R(alpha) + log(1/delta) / (alpha - 1)].

#ifndef DYNDP_RDP_AUDIT_H_
#define DYNDP_RDP_AUDIT_H_

#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "dyndp/planner.h"

namespace dyndp {

// Integers 2..64 plus 96 and 128.
std::vector<int> DefaultRdpOrders();

// Per-step RDP at integer order alpha >= 2. Returns +inf when the log-sum
// overflows. p == 0 yields 0.
absl::StatusOr<double> RdpStep(int alpha, double sampling_rate,
                               double noise_multiplier);

struct RdpCurve {
  std::vector<int> orders;
  std::vector<double> eps_alpha;
  // Orders that produced a non-finite bound and are ignored in conversion.
  std::vector<int> dropped_orders;

  // Adds one step with the given noise multiplier.
  absl::Status Compose(double sampling_rate, double noise_multiplier);
  // eps = min over retained orders of R(alpha) + log(1/delta)/(alpha-1).
  double ToEpsilon(double delta) const;
};

RdpCurve MakeRdpCurve(std::vector<int> orders);

struct AuditPoint {
  int step = 0;
  double eps_rdp_upper = 0.0;
};

// Running RDP upper bound after each step 1..T of the plan.
absl::StatusOr<std::vector<AuditPoint>> AuditPlan(
    const DpPlan& plan, double delta,
    const std::vector<int>& orders = DefaultRdpOrders());

// Same, for arbitrary per-step noise multipliers.
absl::StatusOr<std::vector<AuditPoint>> AuditSchedule(
    absl::Span<const double> noise_multipliers, double sampling_rate,
    double delta, const std::vector<int>& orders = DefaultRdpOrders());

struct SandwichRow {
  int step = 0;
  double eps_gdp_clt = 0.0;
  double eps_rdp_upper = 0.0;
};

// Pairs the CLT consumption curve with the RDP upper bound, step by step.
absl::StatusOr<std::vector<SandwichRow>> SandwichAudit(const DpPlan& plan,
                                                       double delta);

}  // namespace dyndp

#endif  // DYNDP_RDP_AUDIT_H_
