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

#ifndef KWS_FORMAT_CALIBRATION_H_
#define KWS_FORMAT_CALIBRATION_H_

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "kws/dsp/mfcc.h"
#include "kws/engine/graph.h"

namespace kws::format {

struct TensorRange {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  void observe(double v) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  bool empty() const { return min > max; }
  bool operator==(const TensorRange&) const = default;
};

// Running min/max of the model input and of every layer's post-activation
// output over a calibration set. Min/max are order-free, so the result does
// not depend on the order of the calibration inputs.
struct CalibrationStats {
  TensorRange input;
  std::vector<TensorRange> outputs;
  std::size_t samples = 0;

  bool operator==(const CalibrationStats&) const = default;
};

CalibrationStats collect_calibration_stats(const engine::ModelGraph& float_model,
                                           std::span<const dsp::FeatureMatrix> calib);

// Folds every conv2d immediately followed by a mul_add into the conv:
// w'[o] = w[o] * scale[o], b'[o] = b[o] * scale[o] + offset[o]. The mul_add's
// relu flag moves to the conv. Other layers are copied unchanged.
engine::ModelGraph fold_batchnorm(const engine::ModelGraph& float_model);

struct QuantizeOptions {
  bool fold_batchnorm = true;
};

// Activations: asymmetric per-tensor QuantParams from calibration min/max.
// Weights and mul_add scales: symmetric per-tensor int8. Biases and offsets:
// int32 at input_scale * weight_scale. Logistic: 256-entry int8 table with
// output scale 1/256, zero point -128. Throws kInvalidInput on an empty
// calibration set.
engine::ModelGraph calibrate_and_quantize(const engine::ModelGraph& float_model,
                                          std::span<const dsp::FeatureMatrix> calib,
                                          const QuantizeOptions& options = {});

// The quantization step alone, for a float graph already in final (folded
// or unfolded) form and stats collected on that same graph.
engine::ModelGraph quantize_with_stats(const engine::ModelGraph& float_model,
                                       const CalibrationStats& stats);

}  // namespace kws::format

#endif  // KWS_FORMAT_CALIBRATION_H_
