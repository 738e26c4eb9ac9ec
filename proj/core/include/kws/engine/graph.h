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

#ifndef KWS_ENGINE_GRAPH_H_
#define KWS_ENGINE_GRAPH_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kws/tensor.h"

namespace kws::engine {

enum class LayerKind : std::uint8_t {
  kConv2d = 1,
  kMulAdd = 2,
  kMaxPool2d = 3,
  kMean = 4,
  kFullyConnected = 5,
  kLogistic = 6,
};

std::string_view layer_kind_name(LayerKind kind);

enum class Arithmetic : std::uint8_t { kFloat = 0, kInteger = 1 };

enum class Padding : std::uint8_t { kValid = 0 };

// Trained batchnorm statistics. A float mul_add layer may carry these
// instead of a precomputed scale/offset pair; the engine derives
// scale = gamma / sqrt(variance + epsilon), offset = beta - mean * scale.
struct BatchNormParams {
  Tensor gamma;
  Tensor beta;
  Tensor mean;
  Tensor variance;
  double epsilon = 1e-3;

  bool operator==(const BatchNormParams& other) const;
};

// One operator of the graph. Activations are HWC row-major; conv weights are
// (out_channels, kernel_h, kernel_w, in_channels); fully-connected weights
// are (out_features, in_features).
struct LayerSpec {
  LayerKind kind = LayerKind::kConv2d;
  std::string name;
  Shape input_shape;
  Shape output_shape;

  // conv2d / maxpool2d geometry.
  std::size_t kernel_h = 0;
  std::size_t kernel_w = 0;
  std::size_t stride_h = 1;
  std::size_t stride_w = 1;
  Padding padding = Padding::kValid;

  // ReLU applied to this layer's output.
  bool relu = false;

  std::optional<Tensor> weights;
  std::optional<Tensor> bias;
  std::optional<Tensor> scale;   // mul_add
  std::optional<Tensor> offset;  // mul_add
  std::optional<BatchNormParams> batchnorm;
  std::optional<Tensor> lut;     // integer logistic, 256 int8 entries

  // Integer mode only.
  std::optional<QuantParams> input_quant;
  std::optional<QuantParams> output_quant;

  bool operator==(const LayerSpec& other) const;

  std::size_t parameter_count() const;
};

struct ModelGraph {
  Arithmetic mode = Arithmetic::kFloat;
  Shape input_shape;
  std::vector<LayerSpec> layers;

  bool operator==(const ModelGraph& other) const;

  // Throws kShapeInconsistency when shapes or parameter extents do not chain
  // and kContract when tensor kinds or quantization metadata do not match the
  // arithmetic mode.
  void validate() const;

  std::size_t parameter_count() const;

  const QuantParams& input_quant() const;
  const QuantParams& output_quant() const;
};

// Output shape implied by the layer's kind, geometry and parameters.
Shape infer_output_shape(const LayerSpec& layer);

}  // namespace kws::engine

#endif  // KWS_ENGINE_GRAPH_H_
