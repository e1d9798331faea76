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

#ifndef DYNDP_NUMERIC_H_
#define DYNDP_NUMERIC_H_

#include <cmath>
#include <functional>

#include "absl/status/statusor.h"
#include "absl/types/span.h"

namespace dyndp {

// Standard normal CDF.
double NormalCdf(double x);

// log(NormalCdf(x)), accurate deep into the lower tail where NormalCdf(x)
// underflows. Uses an asymptotic expansion below x = -20.
double LogNormalCdf(double x);

// Neumaier-compensated running sum. Order-dependent only at the level of
// the final rounding.
class CompensatedSum {
 public:
  void Add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }
  double Result() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double CompensatedTotal(absl::Span<const double> values);

struct BisectionOptions {
  double lower = 0.0;
  double upper = 1.0;
  // Absolute width at which the bracket is considered converged.
  double tolerance = 1e-12;
  int max_iterations = 200;
};

// Returns x in [lower, upper] with f(x) = target for a monotonically
// increasing f (pass a negated function for decreasing ones). OutOfRange if
// target is not bracketed by f(lower), f(upper).
absl::StatusOr<double> InverseIncreasing(const std::function<double(double)>& f,
                                         double target,
                                         const BisectionOptions& options);

}  // namespace dyndp

#endif  // DYNDP_NUMERIC_H_
