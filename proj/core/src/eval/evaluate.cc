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

#include "kws/eval/evaluate.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include "kws/dsp/wav.h"
#include "kws/engine/inference.h"
#include "kws/error.h"
#include "kws/format/model_file.h"

namespace kws::eval {

LatencyStats summarize_latency(std::vector<double> samples_us) {
  LatencyStats stats;
  stats.count = samples_us.size();
  if (samples_us.empty()) return stats;
  std::sort(samples_us.begin(), samples_us.end());
  stats.mean_us = std::accumulate(samples_us.begin(), samples_us.end(), 0.0) /
                  static_cast<double>(samples_us.size());
  auto rank = [&](double p) {
    const auto n = static_cast<double>(samples_us.size());
    const auto k = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
    return samples_us[std::clamp<std::size_t>(k, 1, samples_us.size()) - 1];
  };
  stats.p50_us = rank(50.0);
  stats.p99_us = rank(99.0);
  return stats;
}

void ConfusionCounts::add(Label truth, bool predicted_keyword) {
  if (truth == Label::kKeyword) {
    ++(predicted_keyword ? tp : fn);
  } else {
    ++(predicted_keyword ? fp : tn);
  }
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tn += o.tn;
  fp += o.fp;
  fn += o.fn;
  tp += o.tp;
  return *this;
}

namespace {

double percent(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double EvalReport::accuracy() const {
  return percent(counts.tn + counts.tp, counts.total());
}

double EvalReport::precision() const { return percent(counts.tp, counts.tp + counts.fp); }

double EvalReport::recall() const { return percent(counts.tp, counts.tp + counts.fn); }

Classification classify_clip(const engine::ModelGraph& model, const dsp::AudioClip& clip,
                             const dsp::MfccConfig& cfg, double threshold) {
  const auto features = dsp::extract_features(clip, cfg);
  const double score = engine::run_inference(model, features);
  return {score, engine::is_keyword(score, threshold)};
}

Classification classify_wav(const std::filesystem::path& model_path,
                            const std::filesystem::path& wav_path, double threshold,
                            const dsp::MfccConfig& cfg) {
  const auto model = format::load_model(model_path);
  const auto clip = dsp::read_wav(wav_path);
  return classify_clip(model, clip, cfg, threshold);
}

EvalReport evaluate(const engine::ModelGraph& model, std::span<const DatasetEntry> clips,
                    const dsp::MfccConfig& cfg, double threshold,
                    const EvalOptions& options) {
  model.validate();
  const dsp::MfccExtractor extractor(cfg);

  struct Partial {
    ConfusionCounts counts;
    std::size_t skipped = 0;
    std::vector<double> latency_us;
    std::vector<std::pair<std::size_t, std::string>> errors;
  };

  const std::size_t n_threads =
      std::max<std::size_t>(1, std::min(options.threads, std::max<std::size_t>(clips.size(), 1)));
  std::vector<Partial> partials(n_threads);
  std::atomic<std::size_t> next{0};

  auto worker = [&](Partial& part) {
    for (std::size_t i = next.fetch_add(1); i < clips.size(); i = next.fetch_add(1)) {
      const DatasetEntry& entry = clips[i];
      try {
        const auto clip = dsp::read_wav(entry.path);
        const auto start = std::chrono::steady_clock::now();
        const auto features = extractor.extract(clip);
        const double score = engine::run_inference(model, features);
        const auto stop = std::chrono::steady_clock::now();
        part.latency_us.push_back(
            std::chrono::duration<double, std::micro>(stop - start).count());
        part.counts.add(entry.label, engine::is_keyword(score, threshold));
      } catch (const std::exception& e) {
        ++part.skipped;
        part.errors.emplace_back(i, entry.relative + ": " + e.what());
      }
    }
  };

  if (n_threads == 1) {
    worker(partials[0]);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (auto& part : partials) pool.emplace_back(worker, std::ref(part));
    for (auto& t : pool) t.join();
  }

  EvalReport report;
  report.threshold = threshold;
  report.model_bytes = options.model_bytes;
  std::vector<double> latency;
  std::vector<std::pair<std::size_t, std::string>> errors;
  for (auto& part : partials) {
    report.counts += part.counts;
    report.skipped += part.skipped;
    latency.insert(latency.end(), part.latency_us.begin(), part.latency_us.end());
    errors.insert(errors.end(), part.errors.begin(), part.errors.end());
  }
  std::sort(errors.begin(), errors.end());
  for (auto& [_, msg] : errors) report.errors.push_back(std::move(msg));
  report.latency = summarize_latency(std::move(latency));
  return report;
}

}  // namespace kws::eval
