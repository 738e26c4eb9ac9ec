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

// Integer kernels. Activations are int8 with per-tensor affine QuantParams,
// weights int8 symmetric, biases int32 at input_scale * weight_scale.
// Accumulators are int32; each output is
//   clamp(zp_out + multiply_by_quantized_multiplier(acc, M), -128, 127)
// with M = input_scale * weight_scale / output_scale.

#include <algorithm>
#include <cstdlib>

#include "kernels_internal.h"
#include "kws/error.h"
#include "kws/fixed_point.h"

namespace kws::engine::detail {
namespace {

const QuantParams& in_quant(const Tensor& input) { return *input.quant(); }

std::int8_t requantize(std::int32_t acc, QuantizedMultiplier m, std::int32_t zp_out) {
  const std::int64_t v =
      static_cast<std::int64_t>(multiply_by_quantized_multiplier(acc, m)) + zp_out;
  return static_cast<std::int8_t>(std::clamp<std::int64_t>(v, kInt8Min, kInt8Max));
}

std::int32_t narrow(std::int64_t acc) { return static_cast<std::int32_t>(acc); }

void check_layer_quant(const Tensor& input, const LayerSpec& layer) {
  if (!layer.input_quant || !layer.output_quant) {
    fail(ErrorCode::kContract, "integer layer '" + layer.name + "' lacks QuantParams");
  }
  if (!(in_quant(input) == *layer.input_quant)) {
    fail(ErrorCode::kContract,
         "input QuantParams do not match layer '" + layer.name + "'");
  }
}

// Input codes with the zero point removed, widened to int16.
std::vector<std::int16_t> centered(const Tensor& input) {
  const auto q = input.int8_data();
  const auto zp = static_cast<std::int16_t>(in_quant(input).zero_point);
  std::vector<std::int16_t> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    out[i] = static_cast<std::int16_t>(q[i] - zp);
  }
  return out;
}

template <typename Acc>
std::vector<std::int8_t> conv2d_impl(std::span<const std::int16_t> in, const LayerSpec& layer,
                                     QuantizedMultiplier m, AccumulatorRange* range) {
  const auto w = layer.weights->int8_data();
  const auto b = layer.bias->int32_data();
  const std::size_t in_w = layer.input_shape[1];
  const std::size_t in_c = layer.input_shape[2];
  const std::size_t out_h = layer.output_shape[0];
  const std::size_t out_w = layer.output_shape[1];
  const std::size_t out_c = layer.output_shape[2];
  const std::size_t kh = layer.kernel_h;
  const std::size_t kw = layer.kernel_w;
  const std::int32_t zp_out = layer.output_quant->zero_point;

  std::vector<std::int8_t> out(out_h * out_w * out_c);
  for (std::size_t oy = 0; oy < out_h; ++oy) {
    for (std::size_t ox = 0; ox < out_w; ++ox) {
      std::int8_t* dst = &out[(oy * out_w + ox) * out_c];
      for (std::size_t o = 0; o < out_c; ++o) {
        Acc acc = b[o];
        for (std::size_t ky = 0; ky < kh; ++ky) {
          const std::size_t iy = oy * layer.stride_h + ky;
          for (std::size_t kx = 0; kx < kw; ++kx) {
            const std::size_t ix = ox * layer.stride_w + kx;
            const std::int16_t* src = &in[(iy * in_w + ix) * in_c];
            const std::int8_t* filt = &w[((o * kh + ky) * kw + kx) * in_c];
            for (std::size_t c = 0; c < in_c; ++c) {
              acc += static_cast<Acc>(src[c]) * static_cast<Acc>(filt[c]);
            }
          }
        }
        if (range) range->observe(acc);
        dst[o] = requantize(narrow(acc), m, zp_out);
      }
    }
  }
  return out;
}

template <typename Acc>
std::vector<std::int8_t> fully_connected_impl(std::span<const std::int16_t> in,
                                              const LayerSpec& layer, QuantizedMultiplier m,
                                              AccumulatorRange* range) {
  const auto w = layer.weights->int8_data();
  const auto b = layer.bias->int32_data();
  const std::size_t n_in = layer.input_shape[0];
  const std::size_t n_out = layer.output_shape[0];
  const std::int32_t zp_out = layer.output_quant->zero_point;
  std::vector<std::int8_t> out(n_out);
  for (std::size_t o = 0; o < n_out; ++o) {
    Acc acc = b[o];
    const std::int8_t* row = &w[o * n_in];
    for (std::size_t i = 0; i < n_in; ++i) {
      acc += static_cast<Acc>(in[i]) * static_cast<Acc>(row[i]);
    }
    if (range) range->observe(acc);
    out[o] = requantize(narrow(acc), m, zp_out);
  }
  return out;
}

QuantizedMultiplier layer_multiplier(const LayerSpec& layer, const Tensor& weights) {
  return quantize_multiplier(layer.input_quant->scale * weights.quant()->scale /
                             layer.output_quant->scale);
}

}  // namespace

Tensor conv2d_int(const Tensor& input, const LayerSpec& layer, AccumulatorRange* range) {
  check_layer_quant(input, layer);
  const auto in = centered(input);
  const auto m = layer_multiplier(layer, *layer.weights);
  auto out = range ? conv2d_impl<std::int64_t>(in, layer, m, range)
                   : conv2d_impl<std::int32_t>(in, layer, m, nullptr);
  return Tensor::int8(layer.output_shape, std::move(out), *layer.output_quant);
}

Tensor mul_add_int(const Tensor& input, const LayerSpec& layer, AccumulatorRange* range) {
  check_layer_quant(input, layer);
  require(layer.scale && layer.offset, ErrorCode::kContract,
          "integer mul_add needs int8 scale and int32 offset");
  const auto q = input.int8_data();
  const auto s = layer.scale->int8_data();
  const auto o = layer.offset->int32_data();
  const std::size_t channels = layer.input_shape.back();
  require(s.size() == channels && o.size() == channels, ErrorCode::kContract,
          "mul_add channel count mismatch");
  const auto m = layer_multiplier(layer, *layer.scale);
  const std::int32_t zp_in = layer.input_quant->zero_point;
  const std::int32_t zp_out = layer.output_quant->zero_point;
  std::vector<std::int8_t> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const std::size_t c = i % channels;
    const std::int64_t acc = static_cast<std::int64_t>(q[i] - zp_in) * s[c] + o[c];
    if (range) range->observe(acc);
    out[i] = requantize(narrow(acc), m, zp_out);
  }
  return Tensor::int8(layer.output_shape, std::move(out), *layer.output_quant);
}

Tensor maxpool2d_int(const Tensor& input, const LayerSpec& layer) {
  const auto in = input.int8_data();
  const std::size_t in_w = layer.input_shape[1];
  const std::size_t channels = layer.input_shape[2];
  const std::size_t out_h = layer.output_shape[0];
  const std::size_t out_w = layer.output_shape[1];
  std::vector<std::int8_t> out(out_h * out_w * channels);
  for (std::size_t oy = 0; oy < out_h; ++oy) {
    for (std::size_t ox = 0; ox < out_w; ++ox) {
      for (std::size_t c = 0; c < channels; ++c) {
        std::int8_t best = kInt8Min;
        for (std::size_t ky = 0; ky < layer.kernel_h; ++ky) {
          for (std::size_t kx = 0; kx < layer.kernel_w; ++kx) {
            const std::size_t iy = oy * layer.stride_h + ky;
            const std::size_t ix = ox * layer.stride_w + kx;
            best = std::max(best, in[(iy * in_w + ix) * channels + c]);
          }
        }
        out[(oy * out_w + ox) * channels + c] = best;
      }
    }
  }
  return Tensor::int8(layer.output_shape, std::move(out), in_quant(input));
}

Tensor global_mean_int(const Tensor& input, AccumulatorRange* range) {
  const auto in = input.int8_data();
  const std::size_t channels = input.shape()[2];
  const std::size_t positions = input.shape()[0] * input.shape()[1];
  const auto count = static_cast<std::int32_t>(positions);
  std::vector<std::int8_t> out(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    std::int32_t sum = 0;
    for (std::size_t p = 0; p < positions; ++p) sum += in[p * channels + c];
    if (range) range->observe(sum);
    // Division rounded half away from zero.
    const std::int32_t magnitude = (2 * std::abs(sum) + count) / (2 * count);
    out[c] = static_cast<std::int8_t>(sum < 0 ? -magnitude : magnitude);
  }
  return Tensor::int8({channels}, std::move(out), in_quant(input));
}

Tensor fully_connected_int(const Tensor& input, const LayerSpec& layer,
                           AccumulatorRange* range) {
  check_layer_quant(input, layer);
  const auto in = centered(input);
  const auto m = layer_multiplier(layer, *layer.weights);
  auto out = range ? fully_connected_impl<std::int64_t>(in, layer, m, range)
                   : fully_connected_impl<std::int32_t>(in, layer, m, nullptr);
  return Tensor::int8(layer.output_shape, std::move(out), *layer.output_quant);
}

Tensor logistic_int(const Tensor& input, const LayerSpec& layer) {
  check_layer_quant(input, layer);
  require(layer.lut.has_value(), ErrorCode::kContract, "integer logistic needs a lookup table");
  const auto lut = layer.lut->int8_data();
  const auto q = input.int8_data();
  std::vector<std::int8_t> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    out[i] = lut[static_cast<std::size_t>(q[i] + 128)];
  }
  return Tensor::int8(input.shape(), std::move(out), *layer.output_quant);
}

Tensor relu_int(const Tensor& input) {
  const auto q = input.int8_data();
  const auto zp = static_cast<std::int8_t>(in_quant(input).zero_point);
  std::vector<std::int8_t> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = std::max(q[i], zp);
  return Tensor::int8(input.shape(), std::move(out), in_quant(input));
}

}  // namespace kws::engine::detail
