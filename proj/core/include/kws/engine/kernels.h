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

#ifndef KWS_ENGINE_KERNELS_H_
#define KWS_ENGINE_KERNELS_H_

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "kws/engine/graph.h"
#include "kws/tensor.h"

namespace kws::engine {

// Range of the wide accumulators seen by an integer kernel. Kernels given a
// non-null range accumulate in int64 and record every accumulator (bias
// included, before requantization), so callers can prove int32 never
// overflows.
struct AccumulatorRange {
  std::int64_t min = std::numeric_limits<std::int64_t>::max();
  std::int64_t max = std::numeric_limits<std::int64_t>::min();

  void observe(std::int64_t v) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  bool empty() const { return min > max; }
  bool fits_int32() const {
    return empty() || (min >= std::numeric_limits<std::int32_t>::min() &&
                       max <= std::numeric_limits<std::int32_t>::max());
  }
};

// Every kernel dispatches on the input's element kind: real32 inputs run the
// float reference path, int8 inputs the integer path. Output shapes follow
// `layer.output_shape`; shape or kind mismatches throw kContract.
Tensor conv2d(const Tensor& input, const LayerSpec& layer, AccumulatorRange* range = nullptr);
Tensor mul_add(const Tensor& input, const LayerSpec& layer, AccumulatorRange* range = nullptr);
Tensor maxpool2d(const Tensor& input, const LayerSpec& layer);
Tensor global_mean(const Tensor& input, AccumulatorRange* range = nullptr);
Tensor fully_connected(const Tensor& input, const LayerSpec& layer,
                       AccumulatorRange* range = nullptr);
Tensor logistic(const Tensor& input, const LayerSpec& layer);
// relu when layer.relu is set, identity otherwise. Integer relu is max(q, zp).
Tensor activation(const Tensor& input, const LayerSpec& layer);

// Effective per-channel (scale, offset) of a float mul_add layer.
struct ChannelAffine {
  std::vector<float> scale;
  std::vector<float> offset;
};
ChannelAffine effective_affine(const LayerSpec& layer);

// q_out = clamp(round_half_away(sigmoid(dequantize(q_in)) * 256) - 128) for
// every int8 input code, indexed by q_in + 128.
std::array<std::int8_t, 256> build_logistic_lut(const QuantParams& input_quant);

inline constexpr QuantParams kLogisticOutputQuant{1.0 / 256.0, -128};

}  // namespace kws::engine

#endif  // KWS_ENGINE_KERNELS_H_
