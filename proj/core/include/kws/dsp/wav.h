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

#ifndef KWS_DSP_WAV_H_
#define KWS_DSP_WAV_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "kws/dsp/audio_clip.h"

namespace kws::dsp {

// Accepts only RIFF/WAVE, PCM signed 16-bit little-endian, mono, 16000 Hz.
// Samples map to [-1, 1) by division by 32768. Any other encoding throws
// kUnsupportedFormat; a missing/unreadable file throws kIo; a header or data
// chunk cut short throws kTruncated.
AudioClip parse_wav(std::span<const std::uint8_t> bytes);
AudioClip read_wav(const std::filesystem::path& path);

// Header-only check of the same format rules, reading at most the first few
// kilobytes. Throws like parse_wav except that a short data chunk is not
// detected.
void probe_wav(const std::filesystem::path& path);

// Encodes PCM16 mono at clip.sample_rate. Samples are scaled by 32768,
// rounded half away from zero and saturated to [-32768, 32767].
std::vector<std::uint8_t> encode_wav(const AudioClip& clip);
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

}  // namespace kws::dsp

#endif  // KWS_DSP_WAV_H_
