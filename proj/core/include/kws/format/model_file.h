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

#ifndef KWS_FORMAT_MODEL_FILE_H_
#define KWS_FORMAT_MODEL_FILE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "kws/engine/graph.h"

namespace kws::format {

inline constexpr char kMagic[4] = {'K', 'W', 'S', 'M'};
inline constexpr std::uint16_t kFormatVersion = 1;
// magic, version, mode, reserved, total length.
inline constexpr std::size_t kHeaderBytes = 12;

// Deterministic little-endian encoding; see docs/model_format.md for the
// byte layout. Validates the model first and throws kUnencodable for
// records the format cannot express.
std::vector<std::uint8_t> encode_model(const engine::ModelGraph& model);

// Never returns a partially constructed model. Failure classes:
//   kBadMagic            empty file or wrong magic
//   kTruncated           fewer bytes than the header declares
//   kCrcMismatch         checksum or trailing-byte mismatch
//   kUnsupportedVersion  version other than kFormatVersion
//   kShapeInconsistency  the decoded graph does not validate
engine::ModelGraph decode_model(std::span<const std::uint8_t> bytes);

void save_model(const engine::ModelGraph& model, const std::filesystem::path& path);
engine::ModelGraph load_model(const std::filesystem::path& path);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

}  // namespace kws::format

#endif  // KWS_FORMAT_MODEL_FILE_H_
