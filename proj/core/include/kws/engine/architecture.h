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

#ifndef KWS_ENGINE_ARCHITECTURE_H_
#define KWS_ENGINE_ARCHITECTURE_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kws/engine/graph.h"

namespace kws::engine {

// Input: 98 frames x 20 MFCC coefficients x 1 channel.
inline const Shape kModelInputShape = {98, 20, 1};

struct ArchitectureOptions {
  bool relu = true;          // after each batchnorm and after fc1
  double bn_epsilon = 1e-3;
};

// The reference two-block CNN:
//   conv1 3x3x32 -> bn1 -> pool1 2x2 -> conv2 3x3x64 -> bn2 -> pool2 2x2
//   -> global mean -> fc1 128 -> output 1 -> logistic
// Weights are He-uniform from `seed`, biases zero, batchnorm statistics
// identity (gamma 1, beta 0, mean 0, variance 1).
ModelGraph build_default_float_model(std::uint64_t seed,
                                     const ArchitectureOptions& options = {});

// Input shape followed by every layer output that changes the shape.
std::vector<Shape> shape_chain(const ModelGraph& model);
std::vector<Shape> reference_shape_chain();

// One row of the published quantized-architecture parameter table.
struct PublishedParamRow {
  std::string layer;
  std::size_t primary;    // weights or scale
  std::size_t secondary;  // biases or offset
};

// Rows exactly as printed; the first batchnorm lists 64 scales for a
// 32-channel tensor.
std::vector<PublishedParamRow> published_quantized_rows();

struct ParameterReport {
  std::size_t float_total = 0;           // includes batchnorm moving statistics
  std::size_t float_trainable = 0;
  std::size_t float_non_trainable = 0;
  std::size_t published_integer_printed = 0;        // sum of rows as printed
  std::size_t published_integer_per_channel = 0;    // first BN scale corrected to 32
  std::size_t integer_folded = 0;     // our integer graph, batchnorm folded (0 if absent)
  std::size_t integer_unfolded = 0;   // our integer graph with explicit mul_add (0 if absent)
};

ParameterReport parameter_report(const ModelGraph& float_model,
                                 const ModelGraph* folded_integer = nullptr,
                                 const ModelGraph* unfolded_integer = nullptr);

std::string format_parameter_report(const ParameterReport& report);

}  // namespace kws::engine

#endif  // KWS_ENGINE_ARCHITECTURE_H_
