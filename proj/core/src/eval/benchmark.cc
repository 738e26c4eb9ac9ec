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

#include "kws/eval/benchmark.h"

#include <chrono>

#include "kws/engine/inference.h"
#include "kws/error.h"

namespace kws::eval {

BenchmarkReport benchmark(const engine::ModelGraph& model, const dsp::MfccConfig& cfg,
                          const dsp::AudioClip& clip, const BenchmarkOptions& options) {
  require(options.n_runs >= 10, ErrorCode::kInvalidInput, "benchmark needs n_runs >= 10");
  model.validate();
  const dsp::MfccExtractor extractor(cfg);
  using clock = std::chrono::steady_clock;

  BenchmarkReport report;
  report.feature_samples_us.reserve(options.n_runs);
  report.inference_samples_us.reserve(options.n_runs);
  std::vector<double> total;
  total.reserve(options.n_runs);
  volatile double sink = 0.0;

  for (std::size_t run = 0; run < options.warmup + options.n_runs; ++run) {
    const auto t0 = clock::now();
    const auto features = extractor.extract(clip);
    const auto t1 = clock::now();
    sink = sink + engine::run_inference(model, features);
    const auto t2 = clock::now();
    if (run < options.warmup) continue;
    const double fe = std::chrono::duration<double, std::micro>(t1 - t0).count();
    const double inf = std::chrono::duration<double, std::micro>(t2 - t1).count();
    report.feature_samples_us.push_back(fe);
    report.inference_samples_us.push_back(inf);
    total.push_back(fe + inf);
  }
  report.feature_extraction = summarize_latency(report.feature_samples_us);
  report.inference = summarize_latency(report.inference_samples_us);
  report.end_to_end = summarize_latency(std::move(total));
  return report;
}

}  // namespace kws::eval
