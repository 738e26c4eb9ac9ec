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

#include "kws/format/calibration.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "kws/engine/inference.h"
#include "kws/engine/kernels.h"
#include "kws/error.h"

namespace kws::format {
namespace {

using engine::Arithmetic;
using engine::LayerKind;
using engine::LayerSpec;
using engine::ModelGraph;

void observe_all(TensorRange& range, const Tensor& t) {
  for (float v : t.real_data()) range.observe(v);
}

QuantParams activation_quant(const TensorRange& range) {
  if (range.empty()) return choose_qparams(0.0, 0.0, false);
  return choose_qparams(range.min, range.max, false);
}

QuantParams weight_quant(std::span<const float> values) {
  double lo = 0.0;
  double hi = 0.0;
  for (float v : values) {
    lo = std::min(lo, static_cast<double>(v));
    hi = std::max(hi, static_cast<double>(v));
  }
  return choose_qparams(lo, hi, true);
}

Tensor to_real(std::vector<float> values) {
  const std::size_t n = values.size();
  return Tensor::real({n}, std::move(values));
}

void quantize_weighted(LayerSpec& q, const Tensor& weights, const Tensor& bias) {
  const QuantParams wq = weight_quant(weights.real_data());
  q.weights = quantize(weights, wq);
  q.bias = quantize_bias(bias, q.input_quant->scale * wq.scale);
}

}  // namespace

CalibrationStats collect_calibration_stats(const ModelGraph& float_model,
                                           std::span<const dsp::FeatureMatrix> calib) {
  require(float_model.mode == Arithmetic::kFloat, ErrorCode::kContract,
          "calibration needs a float model");
  if (calib.empty()) fail(ErrorCode::kInvalidInput, "calibration set is empty");
  float_model.validate();

  CalibrationStats stats;
  stats.outputs.resize(float_model.layers.size());
  engine::InferenceTrace trace;
  for (const auto& features : calib) {
    const Tensor input = engine::make_input(float_model, features);
    engine::run_inference_traced(float_model, input, trace);
    observe_all(stats.input, input);
    for (std::size_t i = 0; i < trace.outputs.size(); ++i) {
      observe_all(stats.outputs[i], trace.outputs[i]);
    }
    ++stats.samples;
  }
  for (const auto& r : stats.outputs) {
    if (!std::isfinite(r.min) || !std::isfinite(r.max)) {
      fail(ErrorCode::kInvalidInput, "calibration produced non-finite activations");
    }
  }
  return stats;
}

ModelGraph fold_batchnorm(const ModelGraph& float_model) {
  require(float_model.mode == Arithmetic::kFloat, ErrorCode::kContract,
          "batchnorm folding needs a float model");
  ModelGraph out;
  out.mode = Arithmetic::kFloat;
  out.input_shape = float_model.input_shape;
  const auto& layers = float_model.layers;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& layer = layers[i];
    const bool foldable = layer.kind == LayerKind::kConv2d && !layer.relu &&
                          i + 1 < layers.size() && layers[i + 1].kind == LayerKind::kMulAdd;
    if (!foldable) {
      out.layers.push_back(layer);
      continue;
    }
    const LayerSpec& bn = layers[i + 1];
    const auto affine = engine::effective_affine(bn);
    const auto w = layer.weights->real_data();
    const auto b = layer.bias->real_data();
    const std::size_t out_c = layer.weights->shape()[0];
    const std::size_t per_filter = w.size() / out_c;

    std::vector<float> folded_w(w.size());
    std::vector<float> folded_b(out_c);
    for (std::size_t o = 0; o < out_c; ++o) {
      for (std::size_t k = 0; k < per_filter; ++k) {
        folded_w[o * per_filter + k] = w[o * per_filter + k] * affine.scale[o];
      }
      folded_b[o] = b[o] * affine.scale[o] + affine.offset[o];
    }
    LayerSpec folded = layer;
    folded.weights = Tensor::real(layer.weights->shape(), std::move(folded_w));
    folded.bias = Tensor::real({out_c}, std::move(folded_b));
    folded.relu = bn.relu;
    out.layers.push_back(std::move(folded));
    ++i;
  }
  out.validate();
  return out;
}

ModelGraph quantize_with_stats(const ModelGraph& float_model, const CalibrationStats& stats) {
  require(float_model.mode == Arithmetic::kFloat, ErrorCode::kContract,
          "quantization needs a float model");
  require(stats.outputs.size() == float_model.layers.size(), ErrorCode::kContract,
          "calibration stats do not match the model");

  ModelGraph out;
  out.mode = Arithmetic::kInteger;
  out.input_shape = float_model.input_shape;
  QuantParams current = activation_quant(stats.input);

  for (std::size_t i = 0; i < float_model.layers.size(); ++i) {
    const LayerSpec& src = float_model.layers[i];
    LayerSpec q;
    q.kind = src.kind;
    q.name = src.name;
    q.input_shape = src.input_shape;
    q.output_shape = src.output_shape;
    q.kernel_h = src.kernel_h;
    q.kernel_w = src.kernel_w;
    q.stride_h = src.stride_h;
    q.stride_w = src.stride_w;
    q.padding = src.padding;
    q.relu = src.relu;
    q.input_quant = current;

    switch (src.kind) {
      case LayerKind::kConv2d:
      case LayerKind::kFullyConnected:
        q.output_quant = activation_quant(stats.outputs[i]);
        quantize_weighted(q, *src.weights, *src.bias);
        break;
      case LayerKind::kMulAdd: {
        auto affine = engine::effective_affine(src);
        const Tensor scale = to_real(std::move(affine.scale));
        const QuantParams sq = weight_quant(scale.real_data());
        q.output_quant = activation_quant(stats.outputs[i]);
        q.scale = quantize(scale, sq);
        q.offset = quantize_bias(to_real(std::move(affine.offset)), current.scale * sq.scale);
        break;
      }
      case LayerKind::kMaxPool2d:
      case LayerKind::kMean:
        q.output_quant = current;
        break;
      case LayerKind::kLogistic: {
        q.output_quant = engine::kLogisticOutputQuant;
        const auto lut = engine::build_logistic_lut(current);
        q.lut = Tensor::int8({256}, std::vector<std::int8_t>(lut.begin(), lut.end()),
                             engine::kLogisticOutputQuant);
        break;
      }
    }
    current = *q.output_quant;
    out.layers.push_back(std::move(q));
  }
  out.validate();
  return out;
}

ModelGraph calibrate_and_quantize(const ModelGraph& float_model,
                                  std::span<const dsp::FeatureMatrix> calib,
                                  const QuantizeOptions& options) {
  if (calib.empty()) fail(ErrorCode::kInvalidInput, "calibration set is empty");
  float_model.validate();
  const ModelGraph prepared =
      options.fold_batchnorm ? fold_batchnorm(float_model) : float_model;
  const CalibrationStats stats = collect_calibration_stats(prepared, calib);
  return quantize_with_stats(prepared, stats);
}

}  // namespace kws::format
