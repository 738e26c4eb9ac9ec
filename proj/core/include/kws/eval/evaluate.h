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

#ifndef KWS_EVAL_EVALUATE_H_
#define KWS_EVAL_EVALUATE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "kws/dsp/mfcc.h"
#include "kws/engine/graph.h"
#include "kws/eval/dataset.h"

namespace kws::eval {

struct LatencyStats {
  std::size_t count = 0;
  double mean_us = 0.0;
  double p50_us = 0.0;
  double p99_us = 0.0;
};

// Nearest-rank percentiles over the samples (microseconds).
LatencyStats summarize_latency(std::vector<double> samples_us);

struct ConfusionCounts {
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tp = 0;

  std::uint64_t total() const { return tn + fp + fn + tp; }
  void add(Label truth, bool predicted_keyword);
  ConfusionCounts& operator+=(const ConfusionCounts& o);
  bool operator==(const ConfusionCounts&) const = default;
};

struct EvalReport {
  ConfusionCounts counts;
  std::size_t skipped = 0;  // clips that failed to load or run
  double threshold = 0.5;
  LatencyStats latency;     // feature extraction + inference per clip
  std::size_t model_bytes = 0;
  std::vector<std::string> errors;

  // Percentages in [0, 100]; 0 when the denominator is empty.
  double accuracy() const;
  double precision() const;
  double recall() const;
};

struct EvalOptions {
  std::size_t threads = 1;
  std::size_t model_bytes = 0;
};

// Classifies every clip (score >= threshold means keyword). Per-clip
// failures are counted in `skipped` and never abort the run. Work may be
// spread over threads; counts are reduced order-independently.
EvalReport evaluate(const engine::ModelGraph& model, std::span<const DatasetEntry> clips,
                    const dsp::MfccConfig& cfg, double threshold,
                    const EvalOptions& options = {});

struct Classification {
  double score = 0.0;
  bool keyword = false;
};

Classification classify_clip(const engine::ModelGraph& model, const dsp::AudioClip& clip,
                             const dsp::MfccConfig& cfg, double threshold);

// Loads both files; errors propagate as kws::Error (kIo for missing files,
// kUnsupportedFormat for bad audio, model-format codes for bad models).
Classification classify_wav(const std::filesystem::path& model_path,
                            const std::filesystem::path& wav_path, double threshold,
                            const dsp::MfccConfig& cfg = {});

}  // namespace kws::eval

#endif  // KWS_EVAL_EVALUATE_H_
