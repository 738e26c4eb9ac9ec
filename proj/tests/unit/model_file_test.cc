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

#include "kws/format/model_file.h"

#include <gtest/gtest.h>

#include <filesystem>

#include "fixture.h"
#include "kws/error.h"
#include "kws/format/calibration.h"
#include "random_models.h"

namespace kws::format {
namespace {

using Bytes = std::vector<std::uint8_t>;

ErrorCode decode_code(const Bytes& bytes) {
  try {
    decode_model(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "decode succeeded";
  return ErrorCode::kContract;
}

void reseal(Bytes& bytes) {
  const std::uint32_t crc = crc32(std::span(bytes).first(bytes.size() - 4));
  for (int i = 0; i < 4; ++i) bytes[bytes.size() - 4 + i] = static_cast<std::uint8_t>(crc >> (8 * i));
}

TEST(Crc32Test, KnownVector) {
  const std::string s = "123456789";
  EXPECT_EQ(crc32(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size())),
            0xCBF43926u);
}

TEST(ModelFileTest, FixtureRoundTrip) {
  const auto& fx = kws::testing::fixture_models();
  for (const auto* m : {&fx.float_model, &fx.int8_model}) {
    const auto bytes = encode_model(*m);
    EXPECT_EQ(decode_model(bytes), *m);
    EXPECT_EQ(encode_model(decode_model(bytes)), bytes);
  }
}

TEST(ModelFileTest, RandomGraphRoundTrip) {
  kws::testing::Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto m = kws::testing::random_float_graph(rng);
    EXPECT_EQ(decode_model(encode_model(m)), m);
    const auto calib = kws::testing::random_features(rng, m.input_shape[0], m.input_shape[1], 4);
    for (bool fold : {true, false}) {
      const auto q = calibrate_and_quantize(m, calib, {fold});
      EXPECT_EQ(decode_model(encode_model(q)), q);
    }
  }
}

TEST(ModelFileTest, HeaderLayout) {
  const auto bytes = encode_model(kws::testing::fixture_models().int8_model);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "KWSM");
  EXPECT_EQ(bytes[4] | (bytes[5] << 8), kFormatVersion);
  EXPECT_EQ(bytes[6], 1);  // integer
  const std::uint32_t len = bytes[8] | (bytes[9] << 8) | (bytes[10] << 16) |
                            (static_cast<std::uint32_t>(bytes[11]) << 24);
  EXPECT_EQ(len, bytes.size());
}

TEST(ModelFileTest, EveryByteFlipIsDetected) {
  const auto original = encode_model(kws::testing::fixture_models().int8_model);
  for (std::size_t i = 0; i < original.size(); ++i) {
    Bytes b = original;
    b[i] ^= 0x01;
    const ErrorCode code = decode_code(b);
    if (i < 4) {
      EXPECT_EQ(code, ErrorCode::kBadMagic) << i;
    } else if (i >= 8 && i < 12) {
      EXPECT_TRUE(code == ErrorCode::kTruncated || code == ErrorCode::kCrcMismatch) << i;
    } else {
      ASSERT_EQ(code, ErrorCode::kCrcMismatch) << i;
    }
  }
}

TEST(ModelFileTest, TruncationIsDetected) {
  const auto original = encode_model(kws::testing::fixture_models().float_model);
  EXPECT_EQ(decode_code({}), ErrorCode::kBadMagic);
  for (std::size_t n = 1; n < original.size(); n += 97) {
    EXPECT_EQ(decode_code(Bytes(original.begin(), original.begin() + n)), ErrorCode::kTruncated)
        << n;
  }
  EXPECT_EQ(decode_code(Bytes(original.begin(), original.end() - 1)), ErrorCode::kTruncated);
}

TEST(ModelFileTest, TrailingBytesAreRejected) {
  auto bytes = encode_model(kws::testing::fixture_models().float_model);
  bytes.push_back(0);
  EXPECT_EQ(decode_code(bytes), ErrorCode::kCrcMismatch);
}

TEST(ModelFileTest, WrongMagic) {
  auto bytes = encode_model(kws::testing::fixture_models().float_model);
  bytes[0] = 'X';
  EXPECT_EQ(decode_code(bytes), ErrorCode::kBadMagic);
  EXPECT_EQ(decode_code({'R', 'I', 'F', 'F', 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}),
            ErrorCode::kBadMagic);
}

TEST(ModelFileTest, UnsupportedVersion) {
  auto bytes = encode_model(kws::testing::fixture_models().float_model);
  bytes[4] = 2;
  reseal(bytes);
  EXPECT_EQ(decode_code(bytes), ErrorCode::kUnsupportedVersion);
}

TEST(ModelFileTest, StructuralDamageUnderValidCrc) {
  auto bytes = encode_model(kws::testing::fixture_models().float_model);
  // Layer count follows the 12-byte header and the rank-3 input shape.
  const std::size_t count_at = kHeaderBytes + 1 + 3 * 4;
  ASSERT_EQ(bytes[count_at], 10);
  bytes[count_at] = 9;
  reseal(bytes);
  EXPECT_EQ(decode_code(bytes), ErrorCode::kShapeInconsistency);

  bytes = encode_model(kws::testing::fixture_models().float_model);
  bytes[kHeaderBytes + 1] = 97;  // input height
  reseal(bytes);
  EXPECT_EQ(decode_code(bytes), ErrorCode::kShapeInconsistency);
}

TEST(ModelFileTest, EncodeRejectsInvalidGraphs) {
  auto m = kws::testing::fixture_models().float_model;
  m.layers[2].input_shape = {1, 2, 3};
  EXPECT_THROW(encode_model(m), Error);
}

TEST(ModelFileTest, SizeBudget) {
  const auto& fx = kws::testing::fixture_models();
  const auto q = encode_model(fx.int8_model).size();
  const auto f = encode_model(fx.float_model).size();
  EXPECT_LE(q, 40960u);
  EXPECT_LE(static_cast<double>(q), 0.32 * static_cast<double>(f));
}

TEST(ModelFileTest, CommittedFilesAreCurrent) {
  // Re-encoding the committed files must reproduce them byte for byte.
  for (const char* name : {kws::testing::kFloatFixtureFile, kws::testing::kInt8FixtureFile}) {
    const auto path = kws::testing::fixture_dir() / name;
    const auto model = load_model(path);
    const auto bytes = encode_model(model);
    EXPECT_EQ(bytes.size(), std::filesystem::file_size(path));
  }
}

TEST(ModelFileTest, FileRoundTripAndMissingFile) {
  const auto dir = std::filesystem::temp_directory_path() / "kws_model_file_test";
  std::filesystem::create_directories(dir);
  const auto& m = kws::testing::fixture_models().int8_model;
  save_model(m, dir / "m.kwsm");
  EXPECT_EQ(load_model(dir / "m.kwsm"), m);
  try {
    load_model(dir / "missing.kwsm");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace kws::format
