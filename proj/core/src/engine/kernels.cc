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

#include <algorithm>
#include <cmath>

#include "kws/engine/kernels.h"
#include "kws/error.h"
#include "kernels_internal.h"

namespace kws::engine {
namespace {

bool is_integer(const Tensor& t) { return t.kind() == ElemKind::kInt8; }

void check_input(const Tensor& input, const LayerSpec& layer) {
  if (input.shape() != layer.input_shape) {
    fail(ErrorCode::kContract, "layer '" + layer.name + "' expects input " +
                                   shape_to_string(layer.input_shape) + ", got " +
                                   shape_to_string(input.shape()));
  }
  if (input.kind() == ElemKind::kInt32) {
    fail(ErrorCode::kContract, "layer '" + layer.name + "' received an int32 activation");
  }
}

Tensor conv2d_float(const Tensor& input, const LayerSpec& layer) {
  const auto in = input.real_data();
  const auto w = layer.weights->real_data();
  const auto b = layer.bias->real_data();
  const std::size_t in_w = layer.input_shape[1];
  const std::size_t in_c = layer.input_shape[2];
  const std::size_t out_h = layer.output_shape[0];
  const std::size_t out_w = layer.output_shape[1];
  const std::size_t out_c = layer.output_shape[2];
  const std::size_t kh = layer.kernel_h;
  const std::size_t kw = layer.kernel_w;

  std::vector<float> out(out_h * out_w * out_c);
  for (std::size_t oy = 0; oy < out_h; ++oy) {
    for (std::size_t ox = 0; ox < out_w; ++ox) {
      float* dst = &out[(oy * out_w + ox) * out_c];
      for (std::size_t o = 0; o < out_c; ++o) {
        float acc = b[o];
        for (std::size_t ky = 0; ky < kh; ++ky) {
          const std::size_t iy = oy * layer.stride_h + ky;
          for (std::size_t kx = 0; kx < kw; ++kx) {
            const std::size_t ix = ox * layer.stride_w + kx;
            const float* src = &in[(iy * in_w + ix) * in_c];
            const float* filt = &w[((o * kh + ky) * kw + kx) * in_c];
            for (std::size_t c = 0; c < in_c; ++c) acc += src[c] * filt[c];
          }
        }
        dst[o] = acc;
      }
    }
  }
  return Tensor::real(layer.output_shape, std::move(out));
}

Tensor mul_add_float(const Tensor& input, const LayerSpec& layer) {
  const auto affine = effective_affine(layer);
  const auto in = input.real_data();
  const std::size_t channels = layer.input_shape.back();
  std::vector<float> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const std::size_t c = i % channels;
    out[i] = in[i] * affine.scale[c] + affine.offset[c];
  }
  return Tensor::real(layer.output_shape, std::move(out));
}

Tensor maxpool2d_float(const Tensor& input, const LayerSpec& layer) {
  const auto in = input.real_data();
  const std::size_t in_w = layer.input_shape[1];
  const std::size_t channels = layer.input_shape[2];
  const std::size_t out_h = layer.output_shape[0];
  const std::size_t out_w = layer.output_shape[1];
  std::vector<float> out(out_h * out_w * channels);
  for (std::size_t oy = 0; oy < out_h; ++oy) {
    for (std::size_t ox = 0; ox < out_w; ++ox) {
      for (std::size_t c = 0; c < channels; ++c) {
        float best = -INFINITY;
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
  return Tensor::real(layer.output_shape, std::move(out));
}

Tensor global_mean_float(const Tensor& input) {
  const auto in = input.real_data();
  const std::size_t channels = input.shape()[2];
  const std::size_t positions = input.shape()[0] * input.shape()[1];
  std::vector<double> sums(channels, 0.0);
  for (std::size_t p = 0; p < positions; ++p) {
    for (std::size_t c = 0; c < channels; ++c) sums[c] += in[p * channels + c];
  }
  std::vector<float> out(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    out[c] = static_cast<float>(sums[c] / static_cast<double>(positions));
  }
  return Tensor::real({channels}, std::move(out));
}

Tensor fully_connected_float(const Tensor& input, const LayerSpec& layer) {
  const auto in = input.real_data();
  const auto w = layer.weights->real_data();
  const auto b = layer.bias->real_data();
  const std::size_t n_in = layer.input_shape[0];
  const std::size_t n_out = layer.output_shape[0];
  std::vector<float> out(n_out);
  for (std::size_t o = 0; o < n_out; ++o) {
    float acc = b[o];
    for (std::size_t i = 0; i < n_in; ++i) acc += w[o * n_in + i] * in[i];
    out[o] = acc;
  }
  return Tensor::real(layer.output_shape, std::move(out));
}

float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

}  // namespace

ChannelAffine effective_affine(const LayerSpec& layer) {
  require(layer.kind == LayerKind::kMulAdd, ErrorCode::kContract, "not a mul_add layer");
  ChannelAffine affine;
  if (layer.batchnorm) {
    const auto& bn = *layer.batchnorm;
    const auto gamma = bn.gamma.real_data();
    const auto beta = bn.beta.real_data();
    const auto mean = bn.mean.real_data();
    const auto var = bn.variance.real_data();
    affine.scale.resize(gamma.size());
    affine.offset.resize(gamma.size());
    for (std::size_t c = 0; c < gamma.size(); ++c) {
      const double s = gamma[c] / std::sqrt(static_cast<double>(var[c]) + bn.epsilon);
      affine.scale[c] = static_cast<float>(s);
      affine.offset[c] = static_cast<float>(beta[c] - mean[c] * s);
    }
  } else {
    require(layer.scale && layer.offset, ErrorCode::kContract, "mul_add without parameters");
    const auto s = layer.scale->real_data();
    const auto o = layer.offset->real_data();
    affine.scale.assign(s.begin(), s.end());
    affine.offset.assign(o.begin(), o.end());
  }
  const std::size_t channels = layer.input_shape.empty() ? 0 : layer.input_shape.back();
  if (affine.scale.size() != channels) {
    fail(ErrorCode::kContract, "mul_add channel count mismatch in layer '" + layer.name + "'");
  }
  return affine;
}

std::array<std::int8_t, 256> build_logistic_lut(const QuantParams& input_quant) {
  std::array<std::int8_t, 256> lut{};
  for (int q = kInt8Min; q <= kInt8Max; ++q) {
    const double x = dequantize_value(q, input_quant);
    const double y = 1.0 / (1.0 + std::exp(-x));
    lut[static_cast<std::size_t>(q + 128)] = quantize_value(y, kLogisticOutputQuant);
  }
  return lut;
}

Tensor conv2d(const Tensor& input, const LayerSpec& layer, AccumulatorRange* range) {
  require(layer.kind == LayerKind::kConv2d, ErrorCode::kContract, "not a conv2d layer");
  check_input(input, layer);
  if (input.shape().size() != 3 || !layer.weights || !layer.bias) {
    fail(ErrorCode::kContract, "conv2d needs a rank-3 input, weights and bias");
  }
  return is_integer(input) ? detail::conv2d_int(input, layer, range)
                           : conv2d_float(input, layer);
}

Tensor mul_add(const Tensor& input, const LayerSpec& layer, AccumulatorRange* range) {
  require(layer.kind == LayerKind::kMulAdd, ErrorCode::kContract, "not a mul_add layer");
  check_input(input, layer);
  return is_integer(input) ? detail::mul_add_int(input, layer, range)
                           : mul_add_float(input, layer);
}

Tensor maxpool2d(const Tensor& input, const LayerSpec& layer) {
  require(layer.kind == LayerKind::kMaxPool2d, ErrorCode::kContract, "not a maxpool2d layer");
  check_input(input, layer);
  return is_integer(input) ? detail::maxpool2d_int(input, layer)
                           : maxpool2d_float(input, layer);
}

Tensor global_mean(const Tensor& input, AccumulatorRange* range) {
  require(input.shape().size() == 3, ErrorCode::kContract, "mean expects a rank-3 input");
  return is_integer(input) ? detail::global_mean_int(input, range) : global_mean_float(input);
}

Tensor fully_connected(const Tensor& input, const LayerSpec& layer, AccumulatorRange* range) {
  require(layer.kind == LayerKind::kFullyConnected, ErrorCode::kContract,
          "not a fully_connected layer");
  check_input(input, layer);
  require(layer.weights && layer.bias, ErrorCode::kContract,
          "fully_connected needs weights and bias");
  return is_integer(input) ? detail::fully_connected_int(input, layer, range)
                           : fully_connected_float(input, layer);
}

Tensor logistic(const Tensor& input, const LayerSpec& layer) {
  check_input(input, layer);
  if (is_integer(input)) return detail::logistic_int(input, layer);
  const auto in = input.real_data();
  std::vector<float> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = sigmoid(in[i]);
  return Tensor::real(input.shape(), std::move(out));
}

Tensor activation(const Tensor& input, const LayerSpec& layer) {
  if (!layer.relu) return input;
  if (is_integer(input)) return detail::relu_int(input);
  const auto in = input.real_data();
  std::vector<float> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::max(in[i], 0.0f);
  return Tensor::real(input.shape(), std::move(out));
}

}  // namespace kws::engine
