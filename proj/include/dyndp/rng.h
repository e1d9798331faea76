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

#ifndef DYNDP_RNG_H_
#define DYNDP_RNG_H_

#include <cstdint>
#include <random>

namespace dyndp {

using Rng = std::mt19937_64;

// Purpose tag of a random stream. Values are part of the reproducibility
// contract; do not renumber.
enum class Stream : std::uint32_t {
  kSampling = 1,
  kNoise = 2,
  kClientSampling = 3,
  kInit = 4,
  kData = 5,
};

// Stream-splitting rule: every (seed, purpose, step, lane) tuple gets its own
// generator, seeded through std::seed_seq from the 32-bit halves of each
// field. Centralized training draws step-t noise from lane 0; federated client
// k draws from lane k, so a lone client 0 reproduces the centralized draw.
inline Rng MakeStream(std::uint64_t seed, Stream purpose, std::uint64_t step,
                      std::uint64_t lane = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose),
                    static_cast<std::uint32_t>(step),
                    static_cast<std::uint32_t>(step >> 32),
                    static_cast<std::uint32_t>(lane),
                    static_cast<std::uint32_t>(lane >> 32)};
  return Rng(seq);
}

}  // namespace dyndp

#endif  // DYNDP_RNG_H_
