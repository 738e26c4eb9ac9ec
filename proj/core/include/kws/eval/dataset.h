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

#ifndef KWS_EVAL_DATASET_H_
#define KWS_EVAL_DATASET_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace kws::eval {

enum class Split { kTrain, kValidation, kTest };
enum class Label { kNonKeyword = 0, kKeyword = 1 };

std::string_view split_name(Split split);
// Accepts "train", "validation", "test"; throws kInvalidInput otherwise.
Split parse_split(std::string_view name);

struct DatasetEntry {
  std::filesystem::path path;
  std::string relative;  // "<word>/<file>.wav", as in the list files
  Label label = Label::kNonKeyword;
};

struct DatasetIndex {
  std::vector<DatasetEntry> train;
  std::vector<DatasetEntry> validation;
  std::vector<DatasetEntry> test;
  std::size_t skipped = 0;  // unreadable or malformed wavs
  std::vector<std::string> warnings;

  const std::vector<DatasetEntry>& split(Split s) const;
  std::size_t size() const { return train.size() + validation.size() + test.size(); }
};

inline constexpr const char* kValidationList = "validation_list.txt";
inline constexpr const char* kTestingList = "testing_list.txt";

// Speech Commands layout: one folder per word (folders starting with '_'
// such as _background_noise_ are ignored) plus validation_list.txt and
// testing_list.txt at the root. Files named in a list belong to that split;
// every other wav is train. The keyword folder is the positive class.
//
// A root with no word folders yields an empty index. A root with wavs but
// without the list files throws kIo, as does a missing root. Wavs whose
// header fails the format check are skipped and counted.
DatasetIndex index_dataset(const std::filesystem::path& root, std::string_view keyword);

}  // namespace kws::eval

#endif  // KWS_EVAL_DATASET_H_
