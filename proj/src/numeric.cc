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

#include "dyndp/numeric.h"

#include <cmath>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace dyndp {
namespace {

constexpr double kAsymptoticThreshold = -20.0;

}  // namespace

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double LogNormalCdf(double x) {
  if (x > 0.0) {
    // Upper half: Phi(x) = 1 - Phi(-x), log1p keeps precision near 1.
    return std::log1p(-0.5 * std::erfc(x / std::numbers::sqrt2));
  }
  if (x > kAsymptoticThreshold) {
    return std::log(NormalCdf(x));
  }
  // Phi(x) ~ phi(x)/(-x) * (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...).
  const double inv_x2 = 1.0 / (x * x);
  double term = 1.0;
  double series = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= -(2.0 * k - 1.0) * inv_x2;
    series += term;
    if (std::abs(term) < 1e-17) break;
  }
  return -0.5 * x * x - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log(series);
}

double CompensatedTotal(absl::Span<const double> values) {
  CompensatedSum sum;
  for (double v : values) sum.Add(v);
  return sum.Result();
}

absl::StatusOr<double> InverseIncreasing(const std::function<double(double)>& f,
                                         double target,
                                         const BisectionOptions& options) {
  double lo = options.lower;
  double hi = options.upper;
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (!std::isfinite(f_lo) || !std::isfinite(f_hi)) {
    return absl::OutOfRangeError(
        absl::StrFormat("non-finite function value on bracket [%g, %g]", lo, hi));
  }
  if (target < f_lo || target > f_hi) {
    return absl::OutOfRangeError(absl::StrFormat(
        "target %g not bracketed: f(%g) = %g, f(%g) = %g", target, lo, f_lo,
        hi, f_hi));
  }
  for (int i = 0; i < options.max_iterations && hi - lo > options.tolerance;
       ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace dyndp
