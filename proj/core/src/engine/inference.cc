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

#include "kws/engine/inference.h"

#include <algorithm>
#include <cmath>

#include "kws/error.h"

namespace kws::engine {
namespace {

InferenceResult finish(const ModelGraph& model, const Tensor& output) {
  InferenceResult result;
  if (model.mode == Arithmetic::kInteger) {
    const std::int8_t q = output.int8_data()[0];
    result.output_code = q;
    result.score = dequantize_value(q, *output.quant());
  } else {
    result.score = output.real_data()[0];
  }
  result.score = std::clamp(result.score, 0.0, 1.0);
  return result;
}

Tensor execute(const ModelGraph& model, Tensor x, InferenceTrace* trace) {
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const LayerSpec& layer = model.layers[i];
    AccumulatorRange range;
    Tensor y = run_layer(x, layer, trace ? &range : nullptr);
    if (trace) {
      trace->accumulators.push_back(range);
      if (trace->record_outputs) trace->pre_activation.push_back(y);
    }
    x = activation(y, layer);
    if (trace && trace->record_outputs) trace->outputs.push_back(x);
  }
  return x;
}

}  // namespace

Tensor make_input(const ModelGraph& model, const dsp::FeatureMatrix& features) {
  const Shape shape = {features.n_frames, features.n_coeffs, 1};
  if (shape != model.input_shape) {
    fail(ErrorCode::kContract, "features " + shape_to_string(shape) +
                                   " do not match model input " +
                                   shape_to_string(model.input_shape));
  }
  if (model.mode == Arithmetic::kInteger) {
    const QuantParams& qp = model.input_quant();
    std::vector<std::int8_t> q(features.values.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (!std::isfinite(features.values[i])) {
        fail(ErrorCode::kInvalidInput, "non-finite feature value");
      }
      q[i] = quantize_value(features.values[i], qp);
    }
    return Tensor::int8(shape, std::move(q), qp);
  }
  std::vector<float> x(features.values.begin(), features.values.end());
  return Tensor::real(shape, std::move(x));
}

Tensor run_layer(const Tensor& input, const LayerSpec& layer, AccumulatorRange* range) {
  switch (layer.kind) {
    case LayerKind::kConv2d: return conv2d(input, layer, range);
    case LayerKind::kMulAdd: return mul_add(input, layer, range);
    case LayerKind::kMaxPool2d: return maxpool2d(input, layer);
    case LayerKind::kMean: {
      if (input.shape() != layer.input_shape) {
        fail(ErrorCode::kContract, "mean layer input shape mismatch");
      }
      return global_mean(input, range);
    }
    case LayerKind::kFullyConnected: return fully_connected(input, layer, range);
    case LayerKind::kLogistic: return logistic(input, layer);
  }
  fail(ErrorCode::kContract, "unknown layer kind");
}

InferenceResult run_inference_detailed(const ModelGraph& model,
                                       const dsp::FeatureMatrix& features) {
  return finish(model, execute(model, make_input(model, features), nullptr));
}

double run_inference(const ModelGraph& model, const dsp::FeatureMatrix& features) {
  return run_inference_detailed(model, features).score;
}

InferenceResult run_inference_traced(const ModelGraph& model, const Tensor& input,
                                     InferenceTrace& trace) {
  trace.outputs.clear();
  trace.pre_activation.clear();
  trace.accumulators.clear();
  if (trace.record_outputs) trace.input = input;
  return finish(model, execute(model, input, &trace));
}

}  // namespace kws::engine
