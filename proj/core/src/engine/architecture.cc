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

#include "kws/engine/architecture.h"

#include <cmath>
#include <random>
#include <sstream>

#include "kws/error.h"

namespace kws::engine {
namespace {

Tensor he_uniform(std::mt19937_64& rng, Shape shape, std::size_t fan_in) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-limit, limit);
  std::vector<float> data(num_elements(shape));
  for (float& v : data) v = static_cast<float>(dist(rng));
  return Tensor::real(std::move(shape), std::move(data));
}

Tensor filled(std::size_t n, float value) {
  return Tensor::real({n}, std::vector<float>(n, value));
}

LayerSpec conv(std::string name, Shape in, std::size_t out_c, std::mt19937_64& rng) {
  LayerSpec l;
  l.kind = LayerKind::kConv2d;
  l.name = std::move(name);
  l.kernel_h = 3;
  l.kernel_w = 3;
  l.weights = he_uniform(rng, {out_c, 3, 3, in[2]}, 9 * in[2]);
  l.bias = filled(out_c, 0.0f);
  l.input_shape = std::move(in);
  l.output_shape = infer_output_shape(l);
  return l;
}

LayerSpec batchnorm(std::string name, const Shape& in, const ArchitectureOptions& opt) {
  LayerSpec l;
  l.kind = LayerKind::kMulAdd;
  l.name = std::move(name);
  l.input_shape = in;
  l.output_shape = in;
  l.relu = opt.relu;
  const std::size_t c = in.back();
  l.batchnorm = BatchNormParams{filled(c, 1.0f), filled(c, 0.0f), filled(c, 0.0f),
                                filled(c, 1.0f), opt.bn_epsilon};
  return l;
}

LayerSpec pool(std::string name, const Shape& in) {
  LayerSpec l;
  l.kind = LayerKind::kMaxPool2d;
  l.name = std::move(name);
  l.kernel_h = l.kernel_w = 2;
  l.stride_h = l.stride_w = 2;
  l.input_shape = in;
  l.output_shape = infer_output_shape(l);
  return l;
}

LayerSpec dense(std::string name, std::size_t n_in, std::size_t n_out, std::mt19937_64& rng) {
  LayerSpec l;
  l.kind = LayerKind::kFullyConnected;
  l.name = std::move(name);
  l.input_shape = {n_in};
  l.weights = he_uniform(rng, {n_out, n_in}, n_in);
  l.bias = filled(n_out, 0.0f);
  l.output_shape = {n_out};
  return l;
}

}  // namespace

ModelGraph build_default_float_model(std::uint64_t seed, const ArchitectureOptions& options) {
  std::mt19937_64 rng(seed);
  ModelGraph m;
  m.mode = Arithmetic::kFloat;
  m.input_shape = kModelInputShape;

  auto push = [&m](LayerSpec l) -> const Shape& {
    m.layers.push_back(std::move(l));
    return m.layers.back().output_shape;
  };

  Shape s = push(conv("conv1", m.input_shape, 32, rng));
  s = push(batchnorm("bn1", s, options));
  s = push(pool("pool1", s));
  s = push(conv("conv2", s, 64, rng));
  s = push(batchnorm("bn2", s, options));
  s = push(pool("pool2", s));

  LayerSpec gap;
  gap.kind = LayerKind::kMean;
  gap.name = "gap";
  gap.input_shape = s;
  gap.output_shape = {s[2]};
  s = push(std::move(gap));

  LayerSpec fc1 = dense("fc1", s[0], 128, rng);
  fc1.relu = options.relu;
  s = push(std::move(fc1));
  s = push(dense("output", s[0], 1, rng));

  LayerSpec sigmoid;
  sigmoid.kind = LayerKind::kLogistic;
  sigmoid.name = "logistic";
  sigmoid.input_shape = s;
  sigmoid.output_shape = s;
  push(std::move(sigmoid));

  m.validate();
  return m;
}

std::vector<Shape> shape_chain(const ModelGraph& model) {
  std::vector<Shape> chain = {model.input_shape};
  for (const auto& layer : model.layers) {
    if (layer.output_shape != layer.input_shape) chain.push_back(layer.output_shape);
  }
  return chain;
}

std::vector<Shape> reference_shape_chain() {
  return {{98, 20, 1}, {96, 18, 32}, {48, 9, 32}, {46, 7, 64},
          {23, 3, 64}, {64},         {128},       {1}};
}

std::vector<PublishedParamRow> published_quantized_rows() {
  return {
      {"Conv2D", 320, 32},           {"MUL, ADD (BatchNorm)", 64, 32},
      {"Conv2D", 18432, 64},         {"MUL, ADD (BatchNorm)", 64, 64},
      {"FullyConnected", 8192, 128}, {"FullyConnected", 128, 1},
  };
}

ParameterReport parameter_report(const ModelGraph& float_model,
                                 const ModelGraph* folded_integer,
                                 const ModelGraph* unfolded_integer) {
  require(float_model.mode == Arithmetic::kFloat, ErrorCode::kContract,
          "parameter_report expects a float model first");
  ParameterReport r;
  r.float_total = float_model.parameter_count();
  for (const auto& layer : float_model.layers) {
    if (layer.batchnorm) {
      r.float_non_trainable += layer.batchnorm->mean.size() + layer.batchnorm->variance.size();
    }
  }
  r.float_trainable = r.float_total - r.float_non_trainable;

  bool first_bn = true;
  for (const auto& row : published_quantized_rows()) {
    r.published_integer_printed += row.primary + row.secondary;
    std::size_t primary = row.primary;
    if (first_bn && row.layer.starts_with("MUL")) {
      // One scale per channel: 32 for the first block.
      primary = row.secondary;
      first_bn = false;
    }
    r.published_integer_per_channel += primary + row.secondary;
  }
  if (folded_integer) r.integer_folded = folded_integer->parameter_count();
  if (unfolded_integer) r.integer_unfolded = unfolded_integer->parameter_count();
  return r;
}

std::string format_parameter_report(const ParameterReport& r) {
  std::ostringstream os;
  os << "float_total=" << r.float_total << "\n"
     << "float_trainable=" << r.float_trainable << "\n"
     << "float_non_trainable=" << r.float_non_trainable << "\n"
     << "published_integer_printed=" << r.published_integer_printed << "\n"
     << "published_integer_per_channel=" << r.published_integer_per_channel << "\n"
     << "published_integer_discrepancy="
     << (r.published_integer_printed - r.published_integer_per_channel)
     << " (first batchnorm row lists 64 scales for 32 channels)\n";
  if (r.integer_folded) os << "integer_folded=" << r.integer_folded << "\n";
  if (r.integer_unfolded) os << "integer_unfolded=" << r.integer_unfolded << "\n";
  return os.str();
}

}  // namespace kws::engine
