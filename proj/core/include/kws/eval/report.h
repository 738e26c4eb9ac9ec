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

#ifndef KWS_EVAL_REPORT_H_
#define KWS_EVAL_REPORT_H_

#include <string>

#include "kws/eval/benchmark.h"
#include "kws/eval/evaluate.h"

namespace kws::eval {

// Line-oriented key=value pairs followed by a confusion-matrix block.
// Percentages are printed with two decimals.
std::string format_eval_text(const EvalReport& report);
std::string format_eval_json(const EvalReport& report);

std::string format_benchmark_text(const BenchmarkReport& report);
std::string format_benchmark_json(const BenchmarkReport& report);

}  // namespace kws::eval

#endif  // KWS_EVAL_REPORT_H_
