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

#include <gtest/gtest.h>

#include <fstream>

#include "kws/error.h"
#include "speech_commands.h"

namespace kws::eval {
namespace {

namespace fs = std::filesystem;
using kws::testing::TempDir;

ErrorCode index_code(const fs::path& root) {
  try {
    index_dataset(root, "marvin");
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "indexing succeeded";
  return ErrorCode::kContract;
}

TEST(DatasetTest, SplitsFollowListFiles) {
  TempDir dir("dataset");
  kws::testing::write_synthetic_dataset(dir.path());
  const auto index = index_dataset(dir.path(), "marvin");
  EXPECT_EQ(index.test.size(), 6u);
  EXPECT_EQ(index.validation.size(), 6u);
  EXPECT_EQ(index.train.size(), 6u);
  EXPECT_EQ(index.size(), 18u);
  EXPECT_EQ(index.skipped, 0u);
  for (Split s : {Split::kTrain, Split::kValidation, Split::kTest}) {
    const auto& entries = index.split(s);
    EXPECT_TRUE(std::is_sorted(entries.begin(), entries.end(),
                               [](const auto& a, const auto& b) { return a.relative < b.relative; }));
    std::size_t keywords = 0;
    for (const auto& e : entries) {
      EXPECT_EQ(e.label == Label::kKeyword, e.relative.starts_with("marvin/")) << e.relative;
      EXPECT_FALSE(e.relative.starts_with("_"));
      EXPECT_TRUE(fs::exists(e.path));
      keywords += e.label == Label::kKeyword;
    }
    EXPECT_EQ(keywords, 2u);
  }
}

TEST(DatasetTest, KeywordSelectsPositiveClass) {
  TempDir dir("dataset");
  kws::testing::write_synthetic_dataset(dir.path());
  const auto index = index_dataset(dir.path(), "yes");
  for (const auto& e : index.test) EXPECT_EQ(e.label == Label::kKeyword, e.relative.starts_with("yes/"));
}

TEST(DatasetTest, CorruptClipsAreSkippedAndCounted) {
  TempDir dir("dataset");
  kws::testing::SyntheticDatasetOptions options;
  options.corrupt_test_clip = true;
  kws::testing::write_synthetic_dataset(dir.path(), options);
  const auto index = index_dataset(dir.path(), "marvin");
  EXPECT_EQ(index.skipped, 1u);
  ASSERT_EQ(index.warnings.size(), 1u);
  EXPECT_NE(index.warnings[0].find("corrupt.wav"), std::string::npos);
  EXPECT_EQ(index.test.size(), 6u);
}

TEST(DatasetTest, TestListWinsOverValidation) {
  TempDir dir("dataset");
  kws::testing::write_synthetic_dataset(dir.path());
  const auto before = index_dataset(dir.path(), "marvin");
  const std::string moved = before.test.front().relative;
  std::ofstream(dir.path() / kValidationList, std::ios::app) << moved << "\n";
  const auto after = index_dataset(dir.path(), "marvin");
  EXPECT_EQ(after.test.size(), before.test.size());
  EXPECT_EQ(after.validation.size(), before.validation.size());
}

TEST(DatasetTest, NonWavFilesIgnored) {
  TempDir dir("dataset");
  kws::testing::write_synthetic_dataset(dir.path());
  std::ofstream(dir.path() / "yes" / "README.txt") << "notes";
  EXPECT_EQ(index_dataset(dir.path(), "marvin").size(), 18u);
}

TEST(DatasetTest, MissingRootIsIo) {
  EXPECT_EQ(index_code("/nonexistent/kws/dataset"), ErrorCode::kIo);
}

TEST(DatasetTest, EmptyRootGivesEmptyIndex) {
  TempDir dir("dataset");
  const auto index = index_dataset(dir.path(), "marvin");
  EXPECT_EQ(index.size(), 0u);
  EXPECT_EQ(index.skipped, 0u);
}

TEST(DatasetTest, MissingListFilesIsIo) {
  TempDir dir("dataset");
  kws::testing::write_synthetic_dataset(dir.path());
  fs::remove(dir.path() / kTestingList);
  EXPECT_EQ(index_code(dir.path()), ErrorCode::kIo);
}

TEST(DatasetTest, ParseSplit) {
  EXPECT_EQ(parse_split("train"), Split::kTrain);
  EXPECT_EQ(parse_split("validation"), Split::kValidation);
  EXPECT_EQ(parse_split("test"), Split::kTest);
  EXPECT_EQ(split_name(Split::kValidation), "validation");
  EXPECT_THROW(parse_split("dev"), Error);
}

}  // namespace
}  // namespace kws::eval
