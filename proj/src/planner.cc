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

#include "dyndp/planner.h"

#include <cmath>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dyndp/numeric.h"

namespace dyndp {
namespace {

constexpr double kMu0Lower = 1e-8;
constexpr double kPlanRelTolerance = 1e-8;
constexpr double kRatioRelTolerance = 1e-12;

double Exponent(int t, int steps) {
  return static_cast<double>(t) / static_cast<double>(steps);
}

bool RelClose(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace

absl::Status ScheduleHyperparams::Validate() const {
  if (steps < 1) {
    return absl::InvalidArgumentError(absl::StrFormat("steps must be >= 1, got %d", steps));
  }
  if (!std::isfinite(sampling_rate) || sampling_rate <= 0.0 || sampling_rate > 1.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sampling rate must be in (0, 1], got %g", sampling_rate));
  }
  if (!std::isfinite(rho_mu) || rho_mu < 1.0) {
    return absl::InvalidArgumentError(absl::StrFormat("rho_mu must be >= 1, got %g", rho_mu));
  }
  if (!std::isfinite(rho_c) || rho_c < 1.0) {
    return absl::InvalidArgumentError(absl::StrFormat("rho_c must be >= 1, got %g", rho_c));
  }
  if (!std::isfinite(c0) || c0 <= 0.0) {
    return absl::InvalidArgumentError(absl::StrFormat("C0 must be > 0, got %g", c0));
  }
  return absl::OkStatus();
}

int DpPlan::StepsAboveUnitMu() const {
  int n = 0;
  for (double m : mu) n += m > 1.0 ? 1 : 0;
  return n;
}

absl::StatusOr<double> SolveInitialMu(GdpLevel mu_tot, double sampling_rate,
                                      int steps, double rho_mu) {
  if (!std::isfinite(mu_tot.mu) || mu_tot.mu <= 0.0) {
    return absl::InvalidArgumentError("mu_tot must be positive");
  }
  ScheduleHyperparams check{.steps = steps, .sampling_rate = sampling_rate,
                            .rho_mu = rho_mu};
  if (absl::Status s = check.Validate(); !s.ok()) return s;

  std::vector<double> growth(steps);
  for (int t = 1; t <= steps; ++t) {
    growth[t - 1] = std::pow(rho_mu, 2.0 * Exponent(t, steps));
  }
  auto cost = [&growth](double mu0) {
    CompensatedSum sum;
    const double mu0_sq = mu0 * mu0;
    for (double g : growth) sum.Add(std::expm1(g * mu0_sq));
    return sum.Result();
  };
  const double target = (mu_tot.mu / sampling_rate) * (mu_tot.mu / sampling_rate);
  absl::StatusOr<double> mu0 =
      InverseIncreasing(cost, target,
                        {.lower = kMu0Lower,
                         .upper = kMaxStepMu / rho_mu,
                         .tolerance = 0.0,
                         .max_iterations = 200});
  if (!mu0.ok()) {
    return absl::OutOfRangeError(absl::StrFormat(
        "no mu0 in [%g, %g] meets mu_tot %g with p=%g T=%d rho_mu=%g: %s",
        kMu0Lower, kMaxStepMu / rho_mu, mu_tot.mu, sampling_rate, steps, rho_mu,
        mu0.status().message()));
  }
  return *mu0;
}

absl::StatusOr<std::vector<double>> MuSchedule(double mu0, double rho_mu,
                                               int steps) {
  if (!std::isfinite(mu0) || mu0 <= 0.0) {
    return absl::InvalidArgumentError(absl::StrFormat("mu0 must be > 0, got %g", mu0));
  }
  if (!std::isfinite(rho_mu) || rho_mu < 1.0) {
    return absl::InvalidArgumentError(absl::StrFormat("rho_mu must be >= 1, got %g", rho_mu));
  }
  if (steps < 1) return absl::InvalidArgumentError("steps must be >= 1");
  std::vector<double> mu(steps);
  for (int t = 1; t <= steps; ++t) {
    mu[t - 1] = std::pow(rho_mu, Exponent(t, steps)) * mu0;
  }
  return mu;
}

absl::StatusOr<DpPlan> BuildPlan(const PrivacyBudget& budget,
                                 const ScheduleHyperparams& hyper) {
  if (absl::Status s = hyper.Validate(); !s.ok()) return s;
  absl::StatusOr<GdpLevel> mu_tot = MuForBudget(budget);
  if (!mu_tot.ok()) return mu_tot.status();
  absl::StatusOr<double> mu0 =
      SolveInitialMu(*mu_tot, hyper.sampling_rate, hyper.steps, hyper.rho_mu);
  if (!mu0.ok()) return mu0.status();
  absl::StatusOr<std::vector<double>> mu = MuSchedule(*mu0, hyper.rho_mu, hyper.steps);
  if (!mu.ok()) return mu.status();

  DpPlan plan;
  plan.hyper = hyper;
  plan.budget = budget;
  plan.mu_tot = *mu_tot;
  plan.mu0 = *mu0;
  plan.mu = *std::move(mu);
  plan.clip.resize(hyper.steps);
  plan.sigma.resize(hyper.steps);
  const double sigma0 = hyper.c0 / plan.mu0;
  for (int t = 1; t <= hyper.steps; ++t) {
    const double e = Exponent(t, hyper.steps);
    plan.clip[t - 1] = std::pow(hyper.rho_c, -e) * hyper.c0;
    plan.sigma[t - 1] = sigma0 * std::pow(hyper.rho_mu * hyper.rho_c, -e);
  }
  return plan;
}

absl::Status CheckPlanInvariants(const DpPlan& plan) {
  const int n = plan.steps();
  if (n == 0 || static_cast<int>(plan.clip.size()) != n ||
      static_cast<int>(plan.sigma.size()) != n) {
    return absl::FailedPreconditionError("plan arrays empty or of unequal length");
  }
  for (int i = 0; i < n; ++i) {
    if (!RelClose(plan.clip[i] / plan.sigma[i], plan.mu[i], kRatioRelTolerance)) {
      return absl::InternalError(absl::StrFormat(
          "step %d: C/sigma = %.17g but mu = %.17g", i + 1,
          plan.clip[i] / plan.sigma[i], plan.mu[i]));
    }
  }
  absl::StatusOr<Composition> composed = ComposeClt(plan.mu, plan.hyper.sampling_rate);
  if (!composed.ok()) return composed.status();
  if (!RelClose(composed->total.mu, plan.mu_tot.mu, kPlanRelTolerance)) {
    return absl::InternalError(absl::StrFormat(
        "recomposed mu %.17g differs from mu_tot %.17g", composed->total.mu,
        plan.mu_tot.mu));
  }
  for (int i = 1; i < n; ++i) {
    if (plan.hyper.rho_mu >= 1.0 && plan.mu[i] < plan.mu[i - 1]) {
      return absl::InternalError(absl::StrFormat("mu decreases at step %d", i + 1));
    }
    if (plan.hyper.rho_c >= 1.0 && plan.clip[i] > plan.clip[i - 1]) {
      return absl::InternalError(absl::StrFormat("C increases at step %d", i + 1));
    }
    if (plan.hyper.rho_mu * plan.hyper.rho_c >= 1.0 &&
        plan.sigma[i] > plan.sigma[i - 1]) {
      return absl::InternalError(absl::StrFormat("sigma increases at step %d", i + 1));
    }
  }
  return absl::OkStatus();
}

std::vector<double> GeneralPlan::Sigmas() const {
  std::vector<double> out(shape.size());
  for (size_t i = 0; i < shape.size(); ++i) out[i] = sigma_tilde * shape[i];
  return out;
}

std::vector<double> GeneralPlan::StepMus() const {
  std::vector<double> out(shape.size());
  for (size_t i = 0; i < shape.size(); ++i) {
    out[i] = clip[i] / (sigma_tilde * shape[i]);
  }
  return out;
}

absl::StatusOr<GeneralPlan> MakeGeneralPlan(absl::Span<const double> clip,
                                            absl::Span<const double> shape,
                                            double sampling_rate,
                                            GdpLevel mu_tot) {
  if (clip.empty() || clip.size() != shape.size()) {
    return absl::InvalidArgumentError("clip and shape must be non-empty and equal length");
  }
  if (!std::isfinite(sampling_rate) || sampling_rate <= 0.0 || sampling_rate > 1.0) {
    return absl::InvalidArgumentError("sampling rate must be in (0, 1]");
  }
  if (!std::isfinite(mu_tot.mu) || mu_tot.mu <= 0.0) {
    return absl::InvalidArgumentError("mu_tot must be positive");
  }
  CompensatedSum sum;
  for (size_t i = 0; i < clip.size(); ++i) {
    if (!(clip[i] > 0.0) || !(shape[i] > 0.0) || !std::isfinite(clip[i]) ||
        !std::isfinite(shape[i])) {
      return absl::InvalidArgumentError(
          absl::StrFormat("entry %d: clip and shape must be positive", i + 1));
    }
    const double r = clip[i] / shape[i];
    sum.Add(r * r);
  }
  GeneralPlan plan;
  plan.clip.assign(clip.begin(), clip.end());
  plan.shape.assign(shape.begin(), shape.end());
  plan.sampling_rate = sampling_rate;
  plan.mu_tot = mu_tot;
  plan.sigma_tilde = (sampling_rate / mu_tot.mu) * std::sqrt(2.0 * sum.Result());
  const std::vector<double> mus = plan.StepMus();
  for (size_t i = 0; i < mus.size(); ++i) {
    if (mus[i] > 1.0) plan.steps_above_unit_mu.push_back(static_cast<int>(i) + 1);
  }
  return plan;
}

std::vector<double> DefaultSweepRhos() {
  std::vector<double> rhos;
  for (int k = 1; k <= 8; ++k) rhos.push_back(10.0 / k);
  return rhos;
}

}  // namespace dyndp
