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

#include "fixture.h"

#include "kws/engine/architecture.h"
#include "kws/error.h"
#include "kws/format/calibration.h"
#include "kws/format/model_file.h"
#include "synth.h"
#include "train.h"

#ifndef KWS_FIXTURE_DIR
#error "KWS_FIXTURE_DIR must be defined"
#endif

namespace kws::testing {

engine::ModelGraph make_fixture_float_model(std::uint64_t seed,
                                            std::span<const dsp::FeatureMatrix> fit_set,
                                            std::span<const int> labels,
                                            const std::function<void(const EpochLog&)>& log) {
  engine::ModelGraph model = engine::build_default_float_model(seed);
  TrainOptions options;
  options.seed = seed;
  train_float_model(model, fit_set, labels, options, log);
  return model;
}

FixtureModels build_fixture_models(const std::function<void(const EpochLog&)>& log) {
  FixtureModels f;
  auto labeled = synth_labeled_features(kFixtureSeed, kFixtureCalibrationClips);
  f.calibration = std::move(labeled.features);
  f.float_model = make_fixture_float_model(kFixtureSeed, f.calibration, labeled.labels, log);
  f.int8_model = format::calibrate_and_quantize(f.float_model, f.calibration);
  return f;
}

const FixtureModels& fixture_models() {
  static const FixtureModels models = [] {
    FixtureModels f;
    f.calibration = synth_labeled_features(kFixtureSeed, kFixtureCalibrationClips).features;
    f.float_model = format::load_model(fixture_dir() / kFloatFixtureFile);
    f.int8_model = format::load_model(fixture_dir() / kInt8FixtureFile);
    return f;
  }();
  return models;
}

std::filesystem::path fixture_dir() { return KWS_FIXTURE_DIR; }

}  // namespace kws::testing
