// Copyright 2026 The KWS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kws/fixed_point.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "kws/error.h"

namespace kws {

QuantizedMultiplier quantize_multiplier(double multiplier) {
  if (!(multiplier >= 0.0) || !std::isfinite(multiplier)) {
    fail(ErrorCode::kInvalidInput, "requantization multiplier must be finite and >= 0");
  }
  if (multiplier == 0.0) return {};
  int shift = 0;
  const double fraction = std::frexp(multiplier, &shift);
  std::int64_t mantissa = std::llround(fraction * static_cast<double>(1ll << 31));
  if (mantissa == (1ll << 31)) {
    mantissa /= 2;
    ++shift;
  }
  if (shift < -31) return {};
  if (shift > 30) fail(ErrorCode::kInvalidInput, "requantization multiplier too large");
  return {static_cast<std::int32_t>(mantissa), shift};
}

std::int32_t saturating_rounding_doubling_high_mul(std::int32_t a, std::int32_t b) {
  const bool overflow = a == b && a == std::numeric_limits<std::int32_t>::min();
  if (overflow) return std::numeric_limits<std::int32_t>::max();
  const std::int64_t ab = static_cast<std::int64_t>(a) * static_cast<std::int64_t>(b);
  const std::int64_t nudge = ab >= 0 ? (1ll << 30) : (1 - (1ll << 30));
  return static_cast<std::int32_t>((ab + nudge) / (1ll << 31));
}

std::int32_t rounding_divide_by_pot(std::int32_t x, int exponent) {
  if (exponent == 0) return x;
  const std::int64_t wide = x;
  const std::int64_t sign = wide >= 0 ? 1 : -1;
  const std::int64_t magnitude = std::llabs(wide);
  const std::int64_t mask = (std::int64_t{1} << exponent) - 1;
  const std::int64_t remainder = magnitude & mask;
  const std::int64_t threshold = mask >> 1;
  const std::int64_t result = (magnitude >> exponent) + (remainder > threshold ? 1 : 0);
  return static_cast<std::int32_t>(sign * result);
}

std::int32_t multiply_by_quantized_multiplier(std::int32_t x, QuantizedMultiplier m) {
  const int left_shift = m.shift > 0 ? m.shift : 0;
  const int right_shift = m.shift > 0 ? 0 : -m.shift;
  const std::int64_t shifted = static_cast<std::int64_t>(x) * (std::int64_t{1} << left_shift);
  const auto saturated = static_cast<std::int32_t>(
      std::clamp<std::int64_t>(shifted, std::numeric_limits<std::int32_t>::min(),
                               std::numeric_limits<std::int32_t>::max()));
  return rounding_divide_by_pot(saturating_rounding_doubling_high_mul(saturated, m.mantissa),
                                right_shift);
}

}  // namespace kws
