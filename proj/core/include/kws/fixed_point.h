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

#ifndef KWS_FIXED_POINT_H_
#define KWS_FIXED_POINT_H_

#include <cstdint>

namespace kws {

// A positive real multiplier M encoded as M ~= mantissa * 2^(shift - 31),
// with mantissa a Q0.31 value in [2^30, 2^31). A zero multiplier encodes as
// {0, 0}.
struct QuantizedMultiplier {
  std::int32_t mantissa = 0;
  int shift = 0;

  bool operator==(const QuantizedMultiplier&) const = default;
};

// frexp-based encoding. Multipliers too small to represent (shift < -31)
// collapse to zero; the mantissa rounding carry is folded into the shift.
QuantizedMultiplier quantize_multiplier(double multiplier);

// round(a * b / 2^31), saturating the single overflow case
// a == b == INT32_MIN. Ties round toward positive infinity (the gemmlowp
// nudge), i.e. the result is floor((a * b + 2^30) / 2^31).
std::int32_t saturating_rounding_doubling_high_mul(std::int32_t a, std::int32_t b);

// round(x / 2^exponent), ties away from zero. exponent in [0, 31].
std::int32_t rounding_divide_by_pot(std::int32_t x, int exponent);

// Applies M to an int32 accumulator: left shift for shift > 0 (saturating),
// Q0.31 high multiply, then rounding right shift for shift < 0.
std::int32_t multiply_by_quantized_multiplier(std::int32_t x, QuantizedMultiplier m);

}  // namespace kws

#endif  // KWS_FIXED_POINT_H_
