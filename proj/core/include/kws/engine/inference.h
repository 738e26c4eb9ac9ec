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

#ifndef KWS_ENGINE_INFERENCE_H_
#define KWS_ENGINE_INFERENCE_H_

#include <optional>
#include <vector>

#include "kws/dsp/mfcc.h"
#include "kws/engine/graph.h"
#include "kws/engine/kernels.h"

namespace kws::engine {

inline constexpr double kDefaultThreshold = 0.5;

// Per-layer observations from one inference. Populated only when a trace is
// passed to run_inference_traced.
struct InferenceTrace {
  bool record_outputs = true;
  Tensor input;
  std::vector<Tensor> outputs;                     // post-activation, per layer
  std::vector<Tensor> pre_activation;              // per layer
  std::vector<AccumulatorRange> accumulators;      // per layer; empty for non-MAC layers
};

struct InferenceResult {
  double score = 0.0;                   // in [0, 1]
  std::optional<std::int8_t> output_code;  // integer mode only
};

// Converts features to the model's input tensor: real32 for float models,
// int8 quantized with the model's input QuantParams for integer models.
// Throws kContract when the feature shape does not match the model input.
Tensor make_input(const ModelGraph& model, const dsp::FeatureMatrix& features);

// Executes the graph layer by layer. Pure: no state survives the call.
InferenceResult run_inference_detailed(const ModelGraph& model,
                                       const dsp::FeatureMatrix& features);
double run_inference(const ModelGraph& model, const dsp::FeatureMatrix& features);

// Same as run_inference_detailed, additionally recording per-layer outputs
// and (integer mode) int64 accumulator ranges.
InferenceResult run_inference_traced(const ModelGraph& model, const Tensor& input,
                                     InferenceTrace& trace);

// Runs one layer (without its activation).
Tensor run_layer(const Tensor& input, const LayerSpec& layer,
                 AccumulatorRange* range = nullptr);

inline bool is_keyword(double score, double threshold = kDefaultThreshold) {
  return score >= threshold;
}

}  // namespace kws::engine

#endif  // KWS_ENGINE_INFERENCE_H_
