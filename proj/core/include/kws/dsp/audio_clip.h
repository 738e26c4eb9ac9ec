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

#ifndef KWS_DSP_AUDIO_CLIP_H_
#define KWS_DSP_AUDIO_CLIP_H_

#include <cstddef>
#include <vector>

namespace kws::dsp {

inline constexpr int kSampleRate = 16000;
inline constexpr std::size_t kClipSamples = 16000;  // one second

// Mono audio with samples normalized to [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = kSampleRate;
};

// Zero-pads short clips at the end and truncates long ones to exactly one
// second. Throws kInvalidInput if the sample rate is not 16 kHz.
AudioClip canonicalize(AudioClip clip);

}  // namespace kws::dsp

#endif  // KWS_DSP_AUDIO_CLIP_H_
