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

#ifndef DYNDP_OPTIMIZERS_H_
#define DYNDP_OPTIMIZERS_H_

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "dyndp/models.h"

namespace dyndp {

enum class OptimizerKind { kSgd, kAdam };

absl::StatusOr<OptimizerKind> ParseOptimizerKind(const std::string& name);
std::string OptimizerKindName(OptimizerKind kind);

struct AdamState {
  std::vector<double> m;
  std::vector<double> u;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double z = 1e-8;
  int t = 0;
};

AdamState MakeAdamState(int dim, double beta1 = 0.9, double beta2 = 0.999,
                        double z = 1e-8);

// theta <- theta - eta * direction.
absl::Status SgdStep(ModelParams& params, absl::Span<const double> direction,
                     double eta);

// One Adam step on the (privatized) gradient estimate g:
//   m <- b1 m + (1-b1) g,  u <- b2 u + (1-b2) g*g,
//   theta <- theta - eta * (m / (1-b1^t)) / (sqrt(u / (1-b2^t)) + z).
absl::Status AdamStep(ModelParams& params, AdamState& state,
                      absl::Span<const double> g, double eta);

}  // namespace dyndp

#endif  // DYNDP_OPTIMIZERS_H_
