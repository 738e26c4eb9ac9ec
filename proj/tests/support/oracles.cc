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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace kws::testing {
namespace {

using i128 = __int128;

i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

i128 round_half_away_div(i128 a, i128 b) {
  // b > 0
  const i128 mag = a < 0 ? -a : a;
  const i128 q = mag / b;
  const i128 r = mag - q * b;
  const i128 rounded = (2 * r >= b) ? q + 1 : q;
  return a < 0 ? -rounded : rounded;
}

double real_multiplier(const engine::LayerSpec& layer, const Tensor& w) {
  return layer.input_quant->scale * w.quant()->scale / layer.output_quant->scale;
}

}  // namespace

std::vector<double> naive_power_spectrum(std::span<const double> frame, std::size_t n) {
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < frame.size(); ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) /
                           static_cast<double>(n);
      acc += frame[t] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out[k] = std::norm(acc) / static_cast<double>(n);
  }
  return out;
}

std::vector<double> naive_dct_ii(std::span<const double> x, std::size_t n_out) {
  const double m = static_cast<double>(x.size());
  std::vector<double> out(n_out);
  for (std::size_t k = 0; k < n_out; ++k) {
    double acc = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
      acc += x[n] * std::cos(std::numbers::pi / m * (static_cast<double>(n) + 0.5) *
                             static_cast<double>(k));
    }
    out[k] = acc * (k == 0 ? std::sqrt(1.0 / m) : std::sqrt(2.0 / m));
  }
  return out;
}

std::int8_t oracle_requantize(std::int64_t acc, QuantizedMultiplier m, std::int32_t zp) {
  const int left = std::max(m.shift, 0);
  const int right = std::max(-m.shift, 0);
  i128 a = static_cast<i128>(acc) * (i128{1} << left);
  a = std::clamp<i128>(a, std::numeric_limits<std::int32_t>::min(),
                       std::numeric_limits<std::int32_t>::max());
  i128 high;
  if (a == std::numeric_limits<std::int32_t>::min() &&
      m.mantissa == std::numeric_limits<std::int32_t>::min()) {
    high = std::numeric_limits<std::int32_t>::max();
  } else {
    high = floor_div(a * m.mantissa + (i128{1} << 30), i128{1} << 31);
  }
  const i128 out = round_half_away_div(high, i128{1} << right) + zp;
  return static_cast<std::int8_t>(std::clamp<i128>(out, -128, 127));
}

std::vector<std::int8_t> oracle_conv2d_int(const Tensor& input, const engine::LayerSpec& layer) {
  const auto& in_shape = input.shape();
  const auto q = input.int8_data();
  const auto w = layer.weights->int8_data();
  const auto b = layer.bias->int32_data();
  const std::int64_t zp_in = input.quant()->zero_point;
  const std::size_t H = in_shape[0], W = in_shape[1], C = in_shape[2];
  const std::size_t O = layer.weights->shape()[0];
  const std::size_t KH = layer.kernel_h, KW = layer.kernel_w;
  const std::size_t OH = (H - KH) / layer.stride_h + 1;
  const std::size_t OW = (W - KW) / layer.stride_w + 1;
  const auto m = quantize_multiplier(real_multiplier(layer, *layer.weights));

  std::vector<std::int8_t> out;
  for (std::size_t y = 0; y < OH; ++y) {
    for (std::size_t x = 0; x < OW; ++x) {
      for (std::size_t o = 0; o < O; ++o) {
        std::int64_t acc = b[o];
        for (std::size_t i = 0; i < KH; ++i) {
          for (std::size_t j = 0; j < KW; ++j) {
            for (std::size_t c = 0; c < C; ++c) {
              const std::size_t iy = y * layer.stride_h + i;
              const std::size_t ix = x * layer.stride_w + j;
              const std::int64_t v = q[(iy * W + ix) * C + c] - zp_in;
              acc += v * w[((o * KH + i) * KW + j) * C + c];
            }
          }
        }
        out.push_back(oracle_requantize(acc, m, layer.output_quant->zero_point));
      }
    }
  }
  return out;
}

std::vector<std::int8_t> oracle_fully_connected_int(const Tensor& input,
                                                    const engine::LayerSpec& layer) {
  const auto q = input.int8_data();
  const auto w = layer.weights->int8_data();
  const auto b = layer.bias->int32_data();
  const std::int64_t zp_in = input.quant()->zero_point;
  const std::size_t n_out = layer.weights->shape()[0];
  const std::size_t n_in = layer.weights->shape()[1];
  const auto m = quantize_multiplier(real_multiplier(layer, *layer.weights));
  std::vector<std::int8_t> out;
  for (std::size_t o = 0; o < n_out; ++o) {
    std::int64_t acc = b[o];
    for (std::size_t i = 0; i < n_in; ++i) acc += (q[i] - zp_in) * w[o * n_in + i];
    out.push_back(oracle_requantize(acc, m, layer.output_quant->zero_point));
  }
  return out;
}

std::vector<std::int8_t> oracle_mean_int(const Tensor& input) {
  const auto q = input.int8_data();
  const std::size_t C = input.shape()[2];
  const std::size_t P = input.shape()[0] * input.shape()[1];
  std::vector<std::int8_t> out(C);
  for (std::size_t c = 0; c < C; ++c) {
    i128 sum = 0;
    for (std::size_t p = 0; p < P; ++p) sum += q[p * C + c];
    out[c] = static_cast<std::int8_t>(round_half_away_div(sum, static_cast<i128>(P)));
  }
  return out;
}

}  // namespace kws::testing
