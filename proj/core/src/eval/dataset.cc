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

#include "kws/eval/dataset.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_set>

#include "kws/dsp/wav.h"
#include "kws/error.h"

namespace kws::eval {
namespace fs = std::filesystem;

namespace {

std::unordered_set<std::string> read_list(const fs::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::kIo, "cannot read split list " + file.string());
  std::unordered_set<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) entries.insert(line);
  }
  return entries;
}

bool is_wav(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return ext == ".wav";
}

}  // namespace

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "unknown";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "validation") return Split::kValidation;
  if (name == "test") return Split::kTest;
  fail(ErrorCode::kInvalidInput, "unknown split '" + std::string(name) + "'");
}

const std::vector<DatasetEntry>& DatasetIndex::split(Split s) const {
  switch (s) {
    case Split::kTrain: return train;
    case Split::kValidation: return validation;
    case Split::kTest: return test;
  }
  return test;
}

DatasetIndex index_dataset(const fs::path& root, std::string_view keyword) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) fail(ErrorCode::kIo, "dataset root not found: " + root.string());

  std::vector<std::pair<std::string, fs::path>> wavs;  // (relative, absolute)
  for (const auto& word_dir : fs::directory_iterator(root)) {
    if (!word_dir.is_directory()) continue;
    const std::string word = word_dir.path().filename().string();
    if (word.empty() || word.front() == '_' || word.front() == '.') continue;
    for (const auto& file : fs::directory_iterator(word_dir.path())) {
      if (!file.is_regular_file() || !is_wav(file.path())) continue;
      wavs.emplace_back(word + "/" + file.path().filename().string(), file.path());
    }
  }
  DatasetIndex index;
  if (wavs.empty()) return index;
  std::sort(wavs.begin(), wavs.end());

  const auto validation = read_list(root / kValidationList);
  const auto testing = read_list(root / kTestingList);

  for (auto& [relative, path] : wavs) {
    try {
      dsp::probe_wav(path);
    } catch (const Error& e) {
      ++index.skipped;
      index.warnings.push_back(relative + ": " + e.what());
      continue;
    }
    DatasetEntry entry;
    entry.label = relative.substr(0, relative.find('/')) == keyword ? Label::kKeyword
                                                                     : Label::kNonKeyword;
    entry.path = path;
    entry.relative = relative;
    if (testing.contains(entry.relative)) {
      index.test.push_back(std::move(entry));
    } else if (validation.contains(entry.relative)) {
      index.validation.push_back(std::move(entry));
    } else {
      index.train.push_back(std::move(entry));
    }
  }
  return index;
}

}  // namespace kws::eval
