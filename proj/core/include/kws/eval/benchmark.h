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

#ifndef KWS_EVAL_BENCHMARK_H_
#define KWS_EVAL_BENCHMARK_H_

#include <cstddef>
#include <vector>

#include "kws/dsp/audio_clip.h"
#include "kws/dsp/mfcc.h"
#include "kws/engine/graph.h"
#include "kws/eval/evaluate.h"

namespace kws::eval {

struct BenchmarkReport {
  LatencyStats feature_extraction;
  LatencyStats inference;
  LatencyStats end_to_end;
  std::vector<double> feature_samples_us;
  std::vector<double> inference_samples_us;
};

struct BenchmarkOptions {
  std::size_t n_runs = 100;  // must be >= 10
  std::size_t warmup = 5;    // excluded from the statistics
};

// Wall-clock per-stage timing of feature extraction and inference on one
// clip. Throws kInvalidInput when n_runs < 10.
BenchmarkReport benchmark(const engine::ModelGraph& model, const dsp::MfccConfig& cfg,
                          const dsp::AudioClip& clip, const BenchmarkOptions& options = {});

}  // namespace kws::eval

#endif  // KWS_EVAL_BENCHMARK_H_
