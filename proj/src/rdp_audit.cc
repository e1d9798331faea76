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

#include "dyndp/rdp_audit.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dyndp/accountant.h"

namespace dyndp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double LogBinomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double LogSumExp(const std::vector<double>& terms) {
  const double top = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double x : terms) acc += std::exp(x - top);
  return top + std::log(acc);
}

// log(exp(c) - 1) for c > 0.
double LogExpm1(double c) {
  return c > 30.0 ? c + std::log1p(-std::exp(-c)) : std::log(std::expm1(c));
}

// log(1 + exp(x)).
double Log1pExp(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

std::vector<int> DefaultRdpOrders() {
  std::vector<int> orders;
  for (int a = 2; a <= 64; ++a) orders.push_back(a);
  orders.push_back(96);
  orders.push_back(128);
  return orders;
}

absl::StatusOr<double> RdpStep(int alpha, double sampling_rate,
                               double noise_multiplier) {
  if (alpha < 2) {
    return absl::InvalidArgumentError(absl::StrFormat("order must be >= 2, got %d", alpha));
  }
  if (!std::isfinite(sampling_rate) || sampling_rate < 0.0 || sampling_rate > 1.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sampling rate must be in [0, 1], got %g", sampling_rate));
  }
  if (!std::isfinite(noise_multiplier) || noise_multiplier <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("noise multiplier must be > 0, got %g", noise_multiplier));
  }
  if (sampling_rate == 0.0) return 0.0;
  const double inv_two_z2 = 1.0 / (2.0 * noise_multiplier * noise_multiplier);
  if (sampling_rate == 1.0) {
    return alpha * inv_two_z2;
  }
  const double log_q = std::log(sampling_rate);
  const double log_1mq = std::log1p(-sampling_rate);
  // The binomial weights sum to one, so A - 1 = sum_{k>=2} w_k expm1(c_k).
  // Summing A - 1 directly keeps full relative precision when A is near 1.
  std::vector<double> terms;
  terms.reserve(alpha - 1);
  for (int k = 2; k <= alpha; ++k) {
    terms.push_back(LogBinomial(alpha, k) + (alpha - k) * log_1mq + k * log_q +
                    LogExpm1((static_cast<double>(k) * k - k) * inv_two_z2));
  }
  const double log_a_minus_1 = LogSumExp(terms);
  if (!std::isfinite(log_a_minus_1)) return kInf;
  return Log1pExp(log_a_minus_1) / (alpha - 1);
}

RdpCurve MakeRdpCurve(std::vector<int> orders) {
  RdpCurve curve;
  curve.orders = std::move(orders);
  curve.eps_alpha.assign(curve.orders.size(), 0.0);
  return curve;
}

absl::Status RdpCurve::Compose(double sampling_rate, double noise_multiplier) {
  for (size_t i = 0; i < orders.size(); ++i) {
    if (!std::isfinite(eps_alpha[i])) continue;
    absl::StatusOr<double> step = RdpStep(orders[i], sampling_rate, noise_multiplier);
    if (!step.ok()) return step.status();
    eps_alpha[i] += *step;
    if (!std::isfinite(eps_alpha[i])) {
      eps_alpha[i] = kInf;
      dropped_orders.push_back(orders[i]);
    }
  }
  return absl::OkStatus();
}

double RdpCurve::ToEpsilon(double delta) const {
  const double log_inv_delta = -std::log(delta);
  double best = kInf;
  for (size_t i = 0; i < orders.size(); ++i) {
    if (!std::isfinite(eps_alpha[i])) continue;
    best = std::min(best, eps_alpha[i] + log_inv_delta / (orders[i] - 1));
  }
  return best;
}

absl::StatusOr<std::vector<AuditPoint>> AuditSchedule(
    absl::Span<const double> noise_multipliers, double sampling_rate,
    double delta, const std::vector<int>& orders) {
  if (noise_multipliers.empty()) {
    return absl::InvalidArgumentError("cannot audit an empty schedule");
  }
  if (!std::isfinite(delta) || delta <= 0.0 || delta >= 1.0) {
    return absl::InvalidArgumentError(absl::StrFormat("delta must be in (0, 1), got %g", delta));
  }
  if (orders.empty()) return absl::InvalidArgumentError("no RDP orders");
  RdpCurve curve = MakeRdpCurve(orders);
  // Flat schedules repeat the same multiplier; cache per-step vectors.
  std::map<double, std::vector<double>> cache;
  std::vector<AuditPoint> out;
  out.reserve(noise_multipliers.size());
  for (size_t t = 0; t < noise_multipliers.size(); ++t) {
    const double z = noise_multipliers[t];
    auto it = cache.find(z);
    if (it == cache.end()) {
      std::vector<double> per_order(orders.size());
      for (size_t i = 0; i < orders.size(); ++i) {
        absl::StatusOr<double> step = RdpStep(orders[i], sampling_rate, z);
        if (!step.ok()) return step.status();
        per_order[i] = *step;
      }
      it = cache.emplace(z, std::move(per_order)).first;
    }
    for (size_t i = 0; i < orders.size(); ++i) {
      if (!std::isfinite(curve.eps_alpha[i])) continue;
      curve.eps_alpha[i] += it->second[i];
      if (!std::isfinite(curve.eps_alpha[i])) {
        curve.eps_alpha[i] = kInf;
        curve.dropped_orders.push_back(orders[i]);
      }
    }
    const double eps = curve.ToEpsilon(delta);
    if (!std::isfinite(eps)) {
      return absl::OutOfRangeError(
          absl::StrFormat("every RDP order overflowed by step %d", t + 1));
    }
    out.push_back({static_cast<int>(t) + 1, eps});
  }
  return out;
}

absl::StatusOr<std::vector<AuditPoint>> AuditPlan(const DpPlan& plan,
                                                  double delta,
                                                  const std::vector<int>& orders) {
  std::vector<double> multipliers(plan.steps());
  for (int i = 0; i < plan.steps(); ++i) {
    multipliers[i] = plan.sigma[i] / plan.clip[i];
  }
  return AuditSchedule(multipliers, plan.hyper.sampling_rate, delta, orders);
}

absl::StatusOr<std::vector<SandwichRow>> SandwichAudit(const DpPlan& plan,
                                                       double delta) {
  absl::StatusOr<std::vector<AuditPoint>> upper = AuditPlan(plan, delta);
  if (!upper.ok()) return upper.status();
  absl::StatusOr<std::vector<double>> clt =
      EpsilonConsumptionCurve(plan.mu, plan.hyper.sampling_rate, delta);
  if (!clt.ok()) return clt.status();
  std::vector<SandwichRow> rows(upper->size());
  for (size_t i = 0; i < rows.size(); ++i) {
    rows[i] = {(*upper)[i].step, (*clt)[i], (*upper)[i].eps_rdp_upper};
  }
  return rows;
}

}  // namespace dyndp
