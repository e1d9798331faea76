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

#include "dyndp/optimizers.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace dyndp {

absl::StatusOr<OptimizerKind> ParseOptimizerKind(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  return absl::InvalidArgumentError(absl::StrFormat("unknown optimizer '%s'", name));
}

std::string OptimizerKindName(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

AdamState MakeAdamState(int dim, double beta1, double beta2, double z) {
  AdamState s;
  s.m.assign(dim, 0.0);
  s.u.assign(dim, 0.0);
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.z = z;
  return s;
}

absl::Status SgdStep(ModelParams& params, absl::Span<const double> direction,
                     double eta) {
  if (direction.size() != params.theta.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "update has %d entries, parameters have %d", direction.size(),
        params.theta.size()));
  }
  for (size_t i = 0; i < direction.size(); ++i) params.theta[i] -= eta * direction[i];
  ++params.step_count;
  return absl::OkStatus();
}

absl::Status AdamStep(ModelParams& params, AdamState& state,
                      absl::Span<const double> g, double eta) {
  if (g.size() != params.theta.size() || state.m.size() != params.theta.size() ||
      state.u.size() != params.theta.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "dimension mismatch: params %d, update %d, moments %d/%d",
        params.theta.size(), g.size(), state.m.size(), state.u.size()));
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(state.beta1, state.t);
  const double c2 = 1.0 - std::pow(state.beta2, state.t);
  for (size_t i = 0; i < g.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g[i];
    state.u[i] = state.beta2 * state.u[i] + (1.0 - state.beta2) * (g[i] * g[i]);
    const double m_hat = state.m[i] / c1;
    const double u_hat = state.u[i] / c2;
    params.theta[i] -= eta * (m_hat / (std::sqrt(u_hat) + state.z));
  }
  ++params.step_count;
  return absl::OkStatus();
}

}  // namespace dyndp
