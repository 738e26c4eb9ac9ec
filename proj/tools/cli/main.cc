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

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "kws/dsp/mfcc.h"
#include "kws/dsp/wav.h"
#include "kws/engine/architecture.h"
#include "kws/engine/inference.h"
#include "kws/error.h"
#include "kws/eval/benchmark.h"
#include "kws/eval/dataset.h"
#include "kws/eval/evaluate.h"
#include "kws/eval/report.h"
#include "kws/format/calibration.h"
#include "kws/format/model_file.h"

namespace {

namespace fs = std::filesystem;

enum ExitCode : int {
  kExitOk = 0,
  kExitNonKeyword = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitModel = 4,
  kExitAudio = 5,
};

struct CliError {
  int code;
  std::string message;
};

kws::engine::ModelGraph open_model(const fs::path& path) {
  try {
    return kws::format::load_model(path);
  } catch (const kws::Error& e) {
    throw CliError{kExitModel, "model " + path.string() + ": " + e.what()};
  }
}

kws::dsp::AudioClip open_wav(const fs::path& path) {
  try {
    return kws::dsp::read_wav(path);
  } catch (const kws::Error& e) {
    throw CliError{e.code() == kws::ErrorCode::kIo ? kExitIo : kExitAudio,
                   "audio " + path.string() + ": " + e.what()};
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

kws::dsp::FeatureMatrix read_features_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw CliError{kExitIo, "cannot open " + path.string()};
  kws::dsp::FeatureMatrix f;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t cols = 0;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw CliError{kExitUsage, "bad number in " + path.string()};
      f.values.push_back(v);
      ++cols;
    }
    if (f.n_frames == 0) f.n_coeffs = cols;
    if (cols != f.n_coeffs) throw CliError{kExitUsage, "ragged rows in " + path.string()};
    ++f.n_frames;
  }
  return f;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  out << text;
  if (!out) throw CliError{kExitIo, "cannot write " + out_path};
}

std::vector<fs::path> calibration_wavs(const fs::path& root, std::size_t max_clips) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw CliError{kExitIo, "calibration dir not found: " + root.string()};
  std::vector<fs::path> wavs;
  for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
    const auto name = it->path().filename().string();
    if (it->is_directory() && (name.starts_with("_") || name.starts_with("."))) {
      it.disable_recursion_pending();
      continue;
    }
    if (it->is_regular_file() && it->path().extension() == ".wav") wavs.push_back(it->path());
  }
  std::sort(wavs.begin(), wavs.end());
  if (wavs.size() <= max_clips) return wavs;
  // Evenly spaced subset, deterministic.
  std::vector<fs::path> picked;
  for (std::size_t i = 0; i < max_clips; ++i) picked.push_back(wavs[i * wavs.size() / max_clips]);
  return picked;
}

std::string describe_model(const kws::engine::ModelGraph& m, std::size_t file_bytes) {
  std::ostringstream os;
  os << "mode=" << (m.mode == kws::engine::Arithmetic::kInteger ? "integer" : "float") << "\n"
     << "input_shape=" << kws::shape_to_string(m.input_shape) << "\n"
     << "layers=" << m.layers.size() << "\n"
     << "parameters=" << m.parameter_count() << "\n"
     << "file_bytes=" << file_bytes << "\n";
  for (const auto& l : m.layers) {
    os << "layer " << l.name << " " << kws::engine::layer_kind_name(l.kind) << " "
       << kws::shape_to_string(l.input_shape) << " -> " << kws::shape_to_string(l.output_shape)
       << " params=" << l.parameter_count() << (l.relu ? " relu" : "");
    if (l.output_quant) {
      os << " out_scale=" << format_double(l.output_quant->scale)
         << " out_zp=" << l.output_quant->zero_point;
    }
    os << "\n";
  }
  return os.str();
}

void check_threshold(double t) {
  if (!std::isfinite(t)) throw CliError{kExitUsage, "threshold must be finite"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keyword spotting: MFCC features, int8 inference, evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "kws 0.1.0");

  std::string model_path, wav_path, data_path, out_path, features_path, calib_path;
  std::string keyword = "marvin", split = "test";
  double threshold = kws::engine::kDefaultThreshold;
  bool json = false, no_fold = false;
  std::size_t threads = 1, runs = 100, max_clips = 200;
  std::uint64_t seed = 1;

  auto* mfcc = app.add_subcommand("mfcc", "Print the 98x20 MFCC matrix of a wav as CSV");
  mfcc->add_option("wav", wav_path, "16 kHz mono PCM16 wav")->required();
  mfcc->add_option("--out", out_path, "Write to a file instead of stdout");
  mfcc->add_flag("--json", json, "JSON array of rows");

  auto* infer = app.add_subcommand("infer", "Score one clip; exit 0 for keyword, 1 otherwise");
  infer->add_option("--model", model_path, "Model file")->required();
  auto* wav_opt = infer->add_option("wav", wav_path, "16 kHz mono PCM16 wav");
  auto* feat_opt = infer->add_option("--features", features_path, "Feature CSV instead of a wav");
  wav_opt->excludes(feat_opt);
  infer->add_option("--threshold", threshold, "Decision threshold")->capture_default_str();
  infer->add_flag("--json", json, "JSON output");

  auto* eval = app.add_subcommand("eval", "Evaluate a model on a Speech Commands split");
  eval->add_option("--model", model_path, "Model file")->required();
  eval->add_option("--data", data_path, "Dataset root")->required();
  eval->add_option("--keyword", keyword, "Positive class folder")->capture_default_str();
  eval->add_option("--split", split, "train, validation or test")->capture_default_str();
  eval->add_option("--threshold", threshold, "Decision threshold")->capture_default_str();
  eval->add_option("--threads", threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  eval->add_option("--out", out_path, "Write the report to a file");
  eval->add_flag("--json", json, "JSON report");

  auto* bench = app.add_subcommand("bench", "Time feature extraction and inference");
  bench->add_option("--model", model_path, "Model file")->required();
  bench->add_option("wav", wav_path, "Clip to time (default: one second of silence)");
  bench->add_option("--runs", runs, "Timed runs (>= 10)")->capture_default_str();
  bench->add_option("--out", out_path, "Write the report to a file");
  bench->add_flag("--json", json, "JSON report");

  auto* quantize = app.add_subcommand("quantize", "Calibrate a float model and write an int8 model");
  quantize->add_option("--model", model_path, "Float model file")->required();
  quantize->add_option("--calib", calib_path, "Directory of calibration wavs (searched recursively)")->required();
  quantize->add_option("--out", out_path, "Output model file")->required();
  quantize->add_option("--max-clips", max_clips, "Calibration clip limit")->capture_default_str()->check(CLI::PositiveNumber);
  quantize->add_flag("--no-fold", no_fold, "Keep batchnorm as explicit mul_add layers");

  auto* init = app.add_subcommand("init", "Write an untrained float model of the default architecture");
  init->add_option("--out", out_path, "Output model file")->required();
  init->add_option("--seed", seed, "Weight initialization seed")->capture_default_str();

  auto* info = app.add_subcommand("info", "Describe a model file");
  info->add_option("--model", model_path, "Model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*mfcc) {
      const auto f = kws::dsp::MfccExtractor().extract(open_wav(wav_path));
      std::ostringstream os;
      if (json) os << "[";
      for (std::size_t t = 0; t < f.n_frames; ++t) {
        os << (json ? (t ? ",[" : "[") : "");
        for (std::size_t c = 0; c < f.n_coeffs; ++c) os << (c ? "," : "") << format_double(f.at(t, c));
        os << (json ? "]" : "\n");
      }
      if (json) os << "]\n";
      emit(os.str(), out_path);
      return kExitOk;
    }

    if (*infer) {
      check_threshold(threshold);
      if (wav_path.empty() && features_path.empty()) throw CliError{kExitUsage, "infer needs a wav or --features"};
      const auto model = open_model(model_path);
      const auto features = features_path.empty()
                                ? kws::dsp::MfccExtractor().extract(open_wav(wav_path))
                                : read_features_csv(features_path);
      kws::engine::InferenceResult r;
      try {
        r = kws::engine::run_inference_detailed(model, features);
      } catch (const kws::Error& e) {
        throw CliError{kExitModel, e.what()};
      }
      const bool keyword_hit = kws::engine::is_keyword(r.score, threshold);
      if (json) {
        std::cout << "{\"score\": " << format_double(r.score) << ", \"keyword\": "
                  << (keyword_hit ? "true" : "false");
        if (r.output_code) std::cout << ", \"output_code\": " << static_cast<int>(*r.output_code);
        std::cout << "}\n";
      } else {
        std::cout << "score=" << format_double(r.score) << "\n";
        if (r.output_code) std::cout << "output_code=" << static_cast<int>(*r.output_code) << "\n";
        std::cout << "decision=" << (keyword_hit ? "keyword" : "non_keyword") << "\n";
      }
      return keyword_hit ? kExitOk : kExitNonKeyword;
    }

    if (*eval) {
      check_threshold(threshold);
      kws::eval::Split which;
      try {
        which = kws::eval::parse_split(split);
      } catch (const kws::Error& e) {
        throw CliError{kExitUsage, e.what()};
      }
      const auto model = open_model(model_path);
      const auto index = kws::eval::index_dataset(data_path, keyword);
      kws::eval::EvalOptions options;
      options.threads = threads;
      options.model_bytes = fs::file_size(model_path);
      auto report = kws::eval::evaluate(model, index.split(which), {}, threshold, options);
      report.skipped += index.skipped;
      for (const auto& w : index.warnings) std::cerr << "warning: skipped " << w << "\n";
      for (const auto& e : report.errors) std::cerr << "warning: " << e << "\n";
      emit(json ? kws::eval::format_eval_json(report) : kws::eval::format_eval_text(report), out_path);
      return kExitOk;
    }

    if (*bench) {
      const auto model = open_model(model_path);
      kws::dsp::AudioClip clip;
      clip.samples.assign(kws::dsp::kClipSamples, 0.0);
      if (!wav_path.empty()) clip = open_wav(wav_path);
      kws::eval::BenchmarkOptions options;
      options.n_runs = runs;
      kws::eval::BenchmarkReport report;
      try {
        report = kws::eval::benchmark(model, {}, clip, options);
      } catch (const kws::Error& e) {
        if (e.code() == kws::ErrorCode::kInvalidInput) throw CliError{kExitUsage, e.what()};
        throw;
      }
      emit(json ? kws::eval::format_benchmark_json(report) : kws::eval::format_benchmark_text(report), out_path);
      return kExitOk;
    }

    if (*quantize) {
      const auto model = open_model(model_path);
      if (model.mode != kws::engine::Arithmetic::kFloat) throw CliError{kExitModel, "quantize expects a float model"};
      const kws::dsp::MfccExtractor extractor;
      std::vector<kws::dsp::FeatureMatrix> calib;
      std::size_t skipped = 0;
      for (const auto& path : calibration_wavs(calib_path, max_clips)) {
        try {
          calib.push_back(extractor.extract(kws::dsp::read_wav(path)));
        } catch (const kws::Error& e) {
          ++skipped;
          std::cerr << "warning: skipped " << path.string() << ": " << e.what() << "\n";
        }
      }
      if (calib.empty()) throw CliError{kExitIo, "no readable calibration wavs under " + calib_path};
      kws::format::QuantizeOptions options;
      options.fold_batchnorm = !no_fold;
      const auto q = kws::format::calibrate_and_quantize(model, calib, options);
      kws::format::save_model(q, out_path);
      std::cout << "calibration_clips=" << calib.size() << "\n"
                << "skipped=" << skipped << "\n"
                << "float_bytes=" << fs::file_size(model_path) << "\n"
                << "int8_bytes=" << fs::file_size(out_path) << "\n";
      const kws::engine::ModelGraph* folded = options.fold_batchnorm ? &q : nullptr;
      const kws::engine::ModelGraph* unfolded = options.fold_batchnorm ? nullptr : &q;
      if (kws::engine::shape_chain(model) == kws::engine::reference_shape_chain()) {
        std::cout << kws::engine::format_parameter_report(
            kws::engine::parameter_report(model, folded, unfolded));
      }
      return kExitOk;
    }

    if (*init) {
      kws::format::save_model(kws::engine::build_default_float_model(seed), out_path);
      std::cout << "wrote " << out_path << "\n";
      return kExitOk;
    }

    if (*info) {
      const auto model = open_model(model_path);
      std::cout << describe_model(model, fs::file_size(model_path));
      return kExitOk;
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const kws::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case kws::ErrorCode::kIo: return kExitIo;
      case kws::ErrorCode::kInvalidInput:
      case kws::ErrorCode::kInvalidConfig: return kExitUsage;
      case kws::ErrorCode::kUnsupportedFormat: return kExitAudio;
      default: return kExitModel;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
