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

#include "kws/engine/graph.h"

#include <bit>
#include <cmath>

#include "kws/error.h"

namespace kws::engine {
namespace {

[[noreturn]] void shape_error(const LayerSpec& layer, const std::string& what) {
  fail(ErrorCode::kShapeInconsistency,
       "layer '" + layer.name + "' (" + std::string(layer_kind_name(layer.kind)) + "): " + what);
}

[[noreturn]] void contract_error(const LayerSpec& layer, const std::string& what) {
  fail(ErrorCode::kContract,
       "layer '" + layer.name + "' (" + std::string(layer_kind_name(layer.kind)) + "): " + what);
}

const Tensor& need(const LayerSpec& layer, const std::optional<Tensor>& t, const char* what) {
  if (!t) shape_error(layer, std::string("missing ") + what);
  return *t;
}

void expect_shape(const LayerSpec& layer, const Tensor& t, const Shape& shape, const char* what) {
  if (t.shape() != shape) {
    shape_error(layer, std::string(what) + " shape " + shape_to_string(t.shape()) +
                           ", expected " + shape_to_string(shape));
  }
}

void expect_kind(const LayerSpec& layer, const Tensor& t, ElemKind kind, const char* what) {
  if (t.kind() != kind) contract_error(layer, std::string(what) + " has the wrong element kind");
}

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

std::size_t opt_size(const std::optional<Tensor>& t) { return t ? t->size() : 0; }

void validate_parameters(const LayerSpec& layer, Arithmetic mode) {
  const bool integer = mode == Arithmetic::kInteger;
  const ElemKind weight_kind = integer ? ElemKind::kInt8 : ElemKind::kReal32;
  const ElemKind bias_kind = integer ? ElemKind::kInt32 : ElemKind::kReal32;

  if (integer) {
    if (!layer.input_quant || !layer.output_quant) {
      contract_error(layer, "integer layers need input and output QuantParams");
    }
  } else if (layer.input_quant || layer.output_quant || layer.lut) {
    contract_error(layer, "float layers carry no quantization metadata");
  }

  auto check_bias_scale = [&](const Tensor& bias, const Tensor& multiplicand) {
    if (!integer) return;
    const double expected = layer.input_quant->scale * multiplicand.quant()->scale;
    if (!bias.quant() || bias.quant()->zero_point != 0 || !same_bits(bias.quant()->scale, expected)) {
      contract_error(layer, "int32 bias scale must equal input_scale * weight_scale");
    }
  };
  auto check_symmetric = [&](const Tensor& t, const char* what) {
    if (integer && t.quant()->zero_point != 0) {
      contract_error(layer, std::string(what) + " must be symmetric (zero point 0)");
    }
  };

  const Shape& in = layer.input_shape;
  switch (layer.kind) {
    case LayerKind::kConv2d: {
      if (in.size() != 3) shape_error(layer, "conv2d input must be rank 3 (H, W, C)");
      const Tensor& w = need(layer, layer.weights, "weights");
      const Tensor& b = need(layer, layer.bias, "bias");
      if (w.shape().size() != 4) shape_error(layer, "conv2d weights must be rank 4");
      const Shape expected = {w.shape()[0], layer.kernel_h, layer.kernel_w, in[2]};
      expect_shape(layer, w, expected, "weights");
      expect_shape(layer, b, {w.shape()[0]}, "bias");
      expect_kind(layer, w, weight_kind, "weights");
      expect_kind(layer, b, bias_kind, "bias");
      check_symmetric(w, "weights");
      check_bias_scale(b, w);
      break;
    }
    case LayerKind::kMulAdd: {
      if (in.empty()) shape_error(layer, "mul_add input must have a channel axis");
      const Shape channels = {in.back()};
      if (layer.batchnorm) {
        if (integer) contract_error(layer, "integer mul_add cannot carry batchnorm statistics");
        if (layer.scale || layer.offset) {
          contract_error(layer, "mul_add carries both batchnorm and scale/offset");
        }
        const auto& bn = *layer.batchnorm;
        for (const Tensor* t : {&bn.gamma, &bn.beta, &bn.mean, &bn.variance}) {
          expect_shape(layer, *t, channels, "batchnorm parameter");
          expect_kind(layer, *t, ElemKind::kReal32, "batchnorm parameter");
        }
        if (!(bn.epsilon >= 0.0)) contract_error(layer, "batchnorm epsilon must be >= 0");
      } else {
        const Tensor& s = need(layer, layer.scale, "scale");
        const Tensor& o = need(layer, layer.offset, "offset");
        expect_shape(layer, s, channels, "scale");
        expect_shape(layer, o, channels, "offset");
        expect_kind(layer, s, weight_kind, "scale");
        expect_kind(layer, o, bias_kind, "offset");
        check_symmetric(s, "scale");
        check_bias_scale(o, s);
      }
      break;
    }
    case LayerKind::kMaxPool2d:
      if (in.size() != 3) shape_error(layer, "maxpool2d input must be rank 3");
      if (layer.kernel_h == 0 || layer.kernel_w == 0 || layer.stride_h == 0 ||
          layer.stride_w == 0) {
        shape_error(layer, "pool window and stride must be positive");
      }
      if (integer && !(*layer.input_quant == *layer.output_quant)) {
        contract_error(layer, "maxpool2d must keep QuantParams unchanged");
      }
      break;
    case LayerKind::kMean:
      if (in.size() != 3) shape_error(layer, "mean input must be rank 3");
      if (integer && !(*layer.input_quant == *layer.output_quant)) {
        contract_error(layer, "mean must keep QuantParams unchanged");
      }
      break;
    case LayerKind::kFullyConnected: {
      if (in.size() != 1) shape_error(layer, "fully_connected input must be rank 1");
      const Tensor& w = need(layer, layer.weights, "weights");
      const Tensor& b = need(layer, layer.bias, "bias");
      if (w.shape().size() != 2) shape_error(layer, "fully_connected weights must be rank 2");
      expect_shape(layer, w, {w.shape()[0], in[0]}, "weights");
      expect_shape(layer, b, {w.shape()[0]}, "bias");
      expect_kind(layer, w, weight_kind, "weights");
      expect_kind(layer, b, bias_kind, "bias");
      check_symmetric(w, "weights");
      check_bias_scale(b, w);
      break;
    }
    case LayerKind::kLogistic:
      if (integer) {
        const Tensor& lut = need(layer, layer.lut, "lookup table");
        expect_shape(layer, lut, {256}, "lookup table");
        expect_kind(layer, lut, ElemKind::kInt8, "lookup table");
        if (!(*layer.output_quant == QuantParams{1.0 / 256.0, -128})) {
          contract_error(layer, "logistic output QuantParams must be scale 1/256, zero point -128");
        }
      }
      if (layer.relu) contract_error(layer, "logistic cannot carry a relu");
      break;
    default:
      contract_error(layer, "unknown layer kind");
  }
}

}  // namespace

std::string_view layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv2d: return "conv2d";
    case LayerKind::kMulAdd: return "mul_add";
    case LayerKind::kMaxPool2d: return "maxpool2d";
    case LayerKind::kMean: return "mean";
    case LayerKind::kFullyConnected: return "fully_connected";
    case LayerKind::kLogistic: return "logistic";
  }
  return "unknown";
}

bool BatchNormParams::operator==(const BatchNormParams& other) const {
  return gamma == other.gamma && beta == other.beta && mean == other.mean &&
         variance == other.variance && same_bits(epsilon, other.epsilon);
}

bool LayerSpec::operator==(const LayerSpec& other) const {
  return kind == other.kind && name == other.name && input_shape == other.input_shape &&
         output_shape == other.output_shape && kernel_h == other.kernel_h &&
         kernel_w == other.kernel_w && stride_h == other.stride_h &&
         stride_w == other.stride_w && padding == other.padding && relu == other.relu &&
         weights == other.weights && bias == other.bias && scale == other.scale &&
         offset == other.offset && batchnorm == other.batchnorm && lut == other.lut &&
         input_quant == other.input_quant && output_quant == other.output_quant;
}

std::size_t LayerSpec::parameter_count() const {
  std::size_t n = opt_size(weights) + opt_size(bias) + opt_size(scale) + opt_size(offset);
  if (batchnorm) {
    n += batchnorm->gamma.size() + batchnorm->beta.size() + batchnorm->mean.size() +
         batchnorm->variance.size();
  }
  return n;
}

Shape infer_output_shape(const LayerSpec& layer) {
  const Shape& in = layer.input_shape;
  switch (layer.kind) {
    case LayerKind::kConv2d: {
      if (in.size() != 3 || !layer.weights || layer.weights->shape().empty()) return {};
      if (layer.stride_h == 0 || layer.stride_w == 0) return {};
      if (in[0] < layer.kernel_h || in[1] < layer.kernel_w) return {};
      return {(in[0] - layer.kernel_h) / layer.stride_h + 1,
              (in[1] - layer.kernel_w) / layer.stride_w + 1, layer.weights->shape()[0]};
    }
    case LayerKind::kMaxPool2d:
      if (in.size() != 3 || layer.stride_h == 0 || layer.stride_w == 0) return {};
      if (in[0] < layer.kernel_h || in[1] < layer.kernel_w) return {};
      return {(in[0] - layer.kernel_h) / layer.stride_h + 1,
              (in[1] - layer.kernel_w) / layer.stride_w + 1, in[2]};
    case LayerKind::kMean:
      if (in.size() != 3) return {};
      return {in[2]};
    case LayerKind::kFullyConnected:
      if (!layer.weights || layer.weights->shape().empty()) return {};
      return {layer.weights->shape()[0]};
    case LayerKind::kMulAdd:
    case LayerKind::kLogistic:
      return in;
  }
  return {};
}

bool ModelGraph::operator==(const ModelGraph& other) const {
  return mode == other.mode && input_shape == other.input_shape && layers == other.layers;
}

void ModelGraph::validate() const {
  if (layers.empty()) fail(ErrorCode::kShapeInconsistency, "model has no layers");
  Shape current = input_shape;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& layer = layers[i];
    if (layer.input_shape != current) {
      shape_error(layer, "input shape " + shape_to_string(layer.input_shape) +
                             " does not chain from " + shape_to_string(current));
    }
    validate_parameters(layer, mode);
    const Shape expected = infer_output_shape(layer);
    if (expected.empty() || layer.output_shape != expected) {
      shape_error(layer, "output shape " + shape_to_string(layer.output_shape) +
                             " inconsistent with parameters (expected " +
                             shape_to_string(expected) + ")");
    }
    if (mode == Arithmetic::kInteger && i > 0 &&
        !(*layers[i - 1].output_quant == *layer.input_quant)) {
      contract_error(layer, "input QuantParams do not match the previous layer's output");
    }
    current = layer.output_shape;
  }
  if (current != Shape{1}) {
    fail(ErrorCode::kShapeInconsistency,
         "model output must be a single scalar, got " + shape_to_string(current));
  }
}

std::size_t ModelGraph::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.parameter_count();
  return n;
}

const QuantParams& ModelGraph::input_quant() const {
  require(mode == Arithmetic::kInteger && !layers.empty() && layers.front().input_quant,
          ErrorCode::kContract, "model has no input QuantParams");
  return *layers.front().input_quant;
}

const QuantParams& ModelGraph::output_quant() const {
  require(mode == Arithmetic::kInteger && !layers.empty() && layers.back().output_quant,
          ErrorCode::kContract, "model has no output QuantParams");
  return *layers.back().output_quant;
}

}  // namespace kws::engine
