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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixture.h"
#include "kws/engine/architecture.h"
#include "kws/engine/inference.h"
#include "kws/error.h"
#include "random_models.h"

namespace kws::format {
namespace {

using engine::LayerKind;
using engine::LayerSpec;
using engine::ModelGraph;

// 1x1 input -> 1x1 conv (weight 1) -> mean -> dense (weight 1): the identity.
ModelGraph identity_model() {
  ModelGraph m;
  m.input_shape = {1, 1, 1};
  LayerSpec conv;
  conv.kind = LayerKind::kConv2d;
  conv.name = "conv";
  conv.kernel_h = conv.kernel_w = 1;
  conv.input_shape = {1, 1, 1};
  conv.output_shape = {1, 1, 1};
  conv.weights = Tensor::real({1, 1, 1, 1}, {1.0f});
  conv.bias = Tensor::real({1}, {0.0f});
  LayerSpec mean;
  mean.kind = LayerKind::kMean;
  mean.name = "mean";
  mean.input_shape = {1, 1, 1};
  mean.output_shape = {1};
  LayerSpec fc;
  fc.kind = LayerKind::kFullyConnected;
  fc.name = "fc";
  fc.input_shape = fc.output_shape = {1};
  fc.weights = Tensor::real({1, 1}, {1.0f});
  fc.bias = Tensor::real({1}, {0.0f});
  m.layers = {conv, mean, fc};
  m.validate();
  return m;
}

dsp::FeatureMatrix scalar(double v) { return {1, 1, {v}}; }

double final_output(const ModelGraph& m, const dsp::FeatureMatrix& f) {
  engine::InferenceTrace trace;
  engine::run_inference_traced(m, engine::make_input(m, f), trace);
  const Tensor& out = trace.outputs.back();
  return out.kind() == ElemKind::kReal32 ? out.real_data()[0] : dequantize(out).real_data()[0];
}

TEST(CalibrationTest, IdentityModelWithinHalfScale) {
  const auto m = identity_model();
  std::vector<dsp::FeatureMatrix> calib;
  for (int i = -50; i <= 50; ++i) calib.push_back(scalar(i / 50.0));
  const auto q = calibrate_and_quantize(m, calib);
  const double scale = q.output_quant().scale;
  EXPECT_NEAR(scale, 2.0 / 255.0, 1e-12);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const auto f = scalar(d(rng));
    EXPECT_LE(std::abs(final_output(q, f) - final_output(m, f)), scale / 2 + 1e-12);
  }
}

TEST(CalibrationTest, AllZeroCalibration) {
  const auto m = identity_model();
  const std::vector<dsp::FeatureMatrix> calib(8, scalar(0.0));
  const auto q = calibrate_and_quantize(m, calib);
  EXPECT_EQ(q.input_quant(), (QuantParams{1.0, 0}));
  EXPECT_EQ(final_output(q, scalar(0.0)), 0.0);
}

TEST(CalibrationTest, EmptySetIsInvalidInput) {
  try {
    calibrate_and_quantize(identity_model(), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidInput);
  }
}

TEST(CalibrationTest, OrderInsensitive) {
  kws::testing::Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = kws::testing::random_float_graph(rng);
    auto calib = kws::testing::random_features(rng, m.input_shape[0], m.input_shape[1], 12);
    const auto a = calibrate_and_quantize(m, calib);
    const auto stats_a = collect_calibration_stats(m, calib);
    std::shuffle(calib.begin(), calib.end(), rng);
    EXPECT_EQ(collect_calibration_stats(m, calib), stats_a);
    EXPECT_EQ(calibrate_and_quantize(m, calib), a);
  }
}

TEST(CalibrationTest, StatsCoverEveryLayer) {
  kws::testing::Rng rng(7);
  const auto m = kws::testing::random_float_graph(rng);
  const auto calib = kws::testing::random_features(rng, m.input_shape[0], m.input_shape[1], 3);
  const auto stats = collect_calibration_stats(m, calib);
  EXPECT_EQ(stats.samples, 3u);
  ASSERT_EQ(stats.outputs.size(), m.layers.size());
  for (const auto& r : stats.outputs) EXPECT_FALSE(r.empty());
}

TEST(CalibrationTest, QuantizedGraphInvariants) {
  kws::testing::Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = kws::testing::random_float_graph(rng);
    const auto calib = kws::testing::random_features(rng, m.input_shape[0], m.input_shape[1], 6);
    for (bool fold : {true, false}) {
      const auto q = calibrate_and_quantize(m, calib, {fold});
      EXPECT_EQ(q.mode, engine::Arithmetic::kInteger);
      EXPECT_NO_THROW(q.validate());
      for (const auto& l : q.layers) {
        if (l.weights) EXPECT_EQ(l.weights->quant()->zero_point, 0);
        if (l.kind == LayerKind::kMulAdd) EXPECT_FALSE(fold);
        if (l.kind == LayerKind::kLogistic) {
          EXPECT_TRUE(l.lut.has_value());
          EXPECT_EQ(*l.output_quant, engine::kLogisticOutputQuant);
        }
      }
    }
  }
}

TEST(FoldTest, FoldedFloatMatchesUnfolded) {
  kws::testing::Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = kws::testing::random_float_graph(rng);
    const auto folded = fold_batchnorm(m);
    for (const auto& l : folded.layers) EXPECT_NE(l.kind, LayerKind::kMulAdd);
    for (const auto& f : kws::testing::random_features(rng, m.input_shape[0], m.input_shape[1], 4)) {
      EXPECT_NEAR(final_output(folded, f), final_output(m, f), 1e-5);
    }
  }
}

TEST(FoldTest, FixtureParameterCounts) {
  const auto& fx = kws::testing::fixture_models();
  const auto unfolded = calibrate_and_quantize(
      fx.float_model, std::span(fx.calibration).first(16), QuantizeOptions{false});
  // Folding removes both batchnorm mul_add layers (2 x (32 + 64) parameters).
  EXPECT_EQ(fx.int8_model.parameter_count(), 27265u);
  EXPECT_EQ(unfolded.parameter_count(), 27457u);
  const auto report = engine::parameter_report(fx.float_model, &fx.int8_model, &unfolded);
  EXPECT_EQ(report.integer_folded, 27265u);
  EXPECT_EQ(report.integer_unfolded, 27457u);
  EXPECT_EQ(report.float_total, 27649u);
}

}  // namespace
}  // namespace kws::format
