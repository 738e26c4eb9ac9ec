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

#include "kws/eval/report.h"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace kws::eval {
namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fixed1(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

nlohmann::json latency_json(const LatencyStats& s) {
  return {{"count", s.count}, {"mean_us", s.mean_us}, {"p50_us", s.p50_us}, {"p99_us", s.p99_us}};
}

void latency_lines(std::ostringstream& os, const char* prefix, const LatencyStats& s) {
  os << prefix << "_count=" << s.count << "\n"
     << prefix << "_mean_us=" << fixed1(s.mean_us) << "\n"
     << prefix << "_p50_us=" << fixed1(s.p50_us) << "\n"
     << prefix << "_p99_us=" << fixed1(s.p99_us) << "\n";
}

}  // namespace

std::string format_eval_text(const EvalReport& r) {
  std::ostringstream os;
  const auto& c = r.counts;
  os << "evaluated=" << c.total() << "\n"
     << "skipped=" << r.skipped << "\n"
     << "threshold=" << r.threshold << "\n"
     << "tn=" << c.tn << "\n"
     << "fp=" << c.fp << "\n"
     << "fn=" << c.fn << "\n"
     << "tp=" << c.tp << "\n"
     << "accuracy=" << fixed2(r.accuracy()) << "\n"
     << "precision=" << fixed2(r.precision()) << "\n"
     << "recall=" << fixed2(r.recall()) << "\n";
  latency_lines(os, "latency", r.latency);
  os << "model_bytes=" << r.model_bytes << "\n\n";

  char buf[160];
  os << "confusion_matrix:\n";
  std::snprintf(buf, sizeof(buf), "%-18s %18s %14s\n", "", "pred_non_keyword", "pred_keyword");
  os << buf;
  std::snprintf(buf, sizeof(buf), "%-18s %18llu %14llu\n", "real_non_keyword",
                static_cast<unsigned long long>(c.tn), static_cast<unsigned long long>(c.fp));
  os << buf;
  std::snprintf(buf, sizeof(buf), "%-18s %18llu %14llu\n", "real_keyword",
                static_cast<unsigned long long>(c.fn), static_cast<unsigned long long>(c.tp));
  os << buf;
  return os.str();
}

std::string format_eval_json(const EvalReport& r) {
  nlohmann::json j;
  j["evaluated"] = r.counts.total();
  j["skipped"] = r.skipped;
  j["threshold"] = r.threshold;
  j["confusion"] = {{"tn", r.counts.tn}, {"fp", r.counts.fp}, {"fn", r.counts.fn},
                    {"tp", r.counts.tp}};
  j["accuracy"] = fixed2(r.accuracy());
  j["precision"] = fixed2(r.precision());
  j["recall"] = fixed2(r.recall());
  j["latency"] = latency_json(r.latency);
  j["model_bytes"] = r.model_bytes;
  j["errors"] = r.errors;
  return j.dump(2) + "\n";
}

std::string format_benchmark_text(const BenchmarkReport& r) {
  std::ostringstream os;
  latency_lines(os, "features", r.feature_extraction);
  latency_lines(os, "inference", r.inference);
  latency_lines(os, "total", r.end_to_end);
  return os.str();
}

std::string format_benchmark_json(const BenchmarkReport& r) {
  nlohmann::json j;
  j["features"] = latency_json(r.feature_extraction);
  j["inference"] = latency_json(r.inference);
  j["total"] = latency_json(r.end_to_end);
  return j.dump(2) + "\n";
}

}  // namespace kws::eval
