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

#ifndef KWS_TESTS_SUPPORT_FIXTURE_H_
#define KWS_TESTS_SUPPORT_FIXTURE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "kws/dsp/mfcc.h"
#include "kws/engine/graph.h"
#include "train.h"

namespace kws::testing {

inline constexpr std::uint64_t kFixtureSeed = 20240611;
inline constexpr std::size_t kFixtureCalibrationClips = 320;

inline constexpr const char* kFloatFixtureFile = "float.kwsm";
inline constexpr const char* kInt8FixtureFile = "int8.kwsm";
inline constexpr const char* kFeaturesFixtureFile = "features.csv";
inline constexpr const char* kGoldenFixtureFile = "golden.txt";

// Default architecture trained on the synthetic keyword task
// (synth_labeled_features), batchnorm statistics fitted to the same set.
engine::ModelGraph make_fixture_float_model(std::uint64_t seed,
                                            std::span<const dsp::FeatureMatrix> fit_set,
                                            std::span<const int> labels,
                                            const std::function<void(const EpochLog&)>& log = {});

struct FixtureModels {
  std::vector<dsp::FeatureMatrix> calibration;  // also the training set
  engine::ModelGraph float_model;
  engine::ModelGraph int8_model;                 // batchnorm folded
};

// Trains and quantizes from scratch; slow. Used to regenerate the committed files.
FixtureModels build_fixture_models(const std::function<void(const EpochLog&)>& log = {});

// The committed fixture models, loaded once per process.
const FixtureModels& fixture_models();

// Directory holding the committed fixture files (tests/fixtures).
std::filesystem::path fixture_dir();

}  // namespace kws::testing

#endif  // KWS_TESTS_SUPPORT_FIXTURE_H_
