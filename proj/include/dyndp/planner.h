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

// Per-step clipping/noise schedules under a fixed Gaussian DP budget.
//
// Steps are indexed t = 1..T everywhere. With mu_t = rho_mu^{t/T} * mu0 and
// C_t = rho_c^{-t/T} * C0 the noise follows as sigma_t = C_t / mu_t. Setting
// rho_c = 1 gives the growing-mu schedule, rho_mu = 1 gives sensitivity
// decay, and both equal to 1 is the flat schedule of vanilla DP-SGD.

#ifndef DYNDP_PLANNER_H_
#define DYNDP_PLANNER_H_

#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "dyndp/accountant.h"

namespace dyndp {

struct ScheduleHyperparams {
  int steps = 1;
  double sampling_rate = 1.0;
  double rho_mu = 1.0;
  double rho_c = 1.0;
  double c0 = 1.0;

  absl::Status Validate() const;
};

struct DpPlan {
  ScheduleHyperparams hyper;
  PrivacyBudget budget;
  GdpLevel mu_tot;
  double mu0 = 0.0;
  // Indexed by t - 1.
  std::vector<double> mu;
  std::vector<double> clip;
  std::vector<double> sigma;

  int steps() const { return static_cast<int>(mu.size()); }
  // Steps whose mu_t exceeds 1.
  int StepsAboveUnitMu() const;
  bool CltMayBeLoose() const { return steps() < kCltWarmupSteps; }
};

// Solves mu_tot^2 = p^2 * sum_{t=1}^T (exp((rho_mu^{t/T} mu0)^2) - 1) for mu0
// by bisection on [1e-8, 6 / rho_mu]. OutOfRange when the root would push
// mu_T above the overflow guard.
absl::StatusOr<double> SolveInitialMu(GdpLevel mu_tot, double sampling_rate,
                                      int steps, double rho_mu);

// mu_t = rho_mu^{t/T} * mu0 for t = 1..T.
absl::StatusOr<std::vector<double>> MuSchedule(double mu0, double rho_mu,
                                               int steps);

absl::StatusOr<DpPlan> BuildPlan(const PrivacyBudget& budget,
                                 const ScheduleHyperparams& hyper);

// Checks the plan's structural invariants: C_t / sigma_t = mu_t, the CLT
// composition matches mu_tot, and the monotonicity implied by the rhos.
absl::Status CheckPlanInvariants(const DpPlan& plan);

// Arbitrary predefined clipping thresholds with noise sigma_t =
// sigma_tilde * shape_t, normalized by p|X| instead of |X_t|.
struct GeneralPlan {
  std::vector<double> clip;
  std::vector<double> shape;
  double sigma_tilde = 0.0;
  double sampling_rate = 1.0;
  GdpLevel mu_tot;
  // 1-based steps where C_t / (sigma_tilde * shape_t) > 1.
  std::vector<int> steps_above_unit_mu;

  std::vector<double> Sigmas() const;
  std::vector<double> StepMus() const;
};

// sigma_tilde = (p / mu_tot) * sqrt(2 * sum_t C_t^2 / shape_t^2). Violations
// of mu_t <= 1 are reported in the result, not as an error.
absl::StatusOr<GeneralPlan> MakeGeneralPlan(absl::Span<const double> clip,
                                            absl::Span<const double> shape,
                                            double sampling_rate,
                                            GdpLevel mu_tot);

// The rho values of the hyper-parameter sweep: 1/rho in {0.1, ..., 0.8}.
std::vector<double> DefaultSweepRhos();

}  // namespace dyndp

#endif  // DYNDP_PLANNER_H_
