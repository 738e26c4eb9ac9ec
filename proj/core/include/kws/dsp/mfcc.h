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

#ifndef KWS_DSP_MFCC_H_
#define KWS_DSP_MFCC_H_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "kws/dsp/audio_clip.h"
#include "kws/dsp/fft.h"

namespace kws::dsp {

struct MfccConfig {
  std::size_t frame_len = 400;  // 25 ms
  std::size_t hop = 160;        // 10 ms
  std::size_t fft_len = 512;
  std::size_t n_mels = 40;
  double fmin = 40.0;
  double fmax = 7600.0;
  std::size_t n_coeffs = 20;
  double log_floor = 1e-10;

  std::size_t n_bins() const { return fft_len / 2 + 1; }

  // Throws kInvalidConfig when any constraint is violated.
  void validate(int sample_rate = kSampleRate) const;
};

struct MelFilterbank {
  std::size_t n_mels = 0;
  std::size_t n_bins = 0;
  std::vector<double> weights;     // n_mels x n_bins, row-major
  std::vector<double> band_edges;  // n_mels + 2 edge frequencies in Hz

  double weight(std::size_t mel, std::size_t bin) const {
    return weights[mel * n_bins + bin];
  }
};

// Row-major n_frames x n_coeffs matrix; the model input for one utterance.
struct FeatureMatrix {
  std::size_t n_frames = 0;
  std::size_t n_coeffs = 0;
  std::vector<double> values;

  double at(std::size_t frame, std::size_t coeff) const {
    return values[frame * n_coeffs + coeff];
  }
  std::span<const double> row(std::size_t frame) const {
    return std::span<const double>(values).subspan(frame * n_coeffs, n_coeffs);
  }

  bool operator==(const FeatureMatrix&) const = default;
};

std::size_t frame_count(std::size_t n_samples, const MfccConfig& cfg);

// Splits the clip as given (no canonicalization) into frames of frame_len
// samples, frame i starting at i * hop.
std::vector<std::vector<double>> frame_signal(const AudioClip& clip,
                                              const MfccConfig& cfg);

// w(n) = 0.54 - 0.46 cos(2 pi n / N), N = frame length.
std::vector<double> apply_hamming(std::span<const double> frame);

// P[k] = |X[k]|^2 / fft_len for k in [0, fft_len / 2]; the frame is
// zero-padded to fft_len.
std::vector<double> power_spectrum(std::span<const double> windowed_frame,
                                   const MfccConfig& cfg);

// HTK mel scale, m = 2595 log10(1 + f / 700).
double hz_to_mel(double hz);
double mel_to_hz(double mel);

MelFilterbank build_mel_filterbank(const MfccConfig& cfg, int sample_rate = kSampleRate);

// Orthonormal DCT-II of log(max(bank * power, log_floor)), first n_coeffs.
std::vector<double> mfcc_frame(std::span<const double> power,
                               const MelFilterbank& bank, const MfccConfig& cfg);

// Reusable extractor: window, FFT plan, filterbank and DCT basis are built
// once. All methods are const and thread-safe.
class MfccExtractor {
 public:
  explicit MfccExtractor(MfccConfig cfg = {});

  const MfccConfig& config() const { return cfg_; }
  const MelFilterbank& filterbank() const { return bank_; }

  // Canonicalizes the clip to one second, then frames, windows, transforms.
  FeatureMatrix extract(const AudioClip& clip) const;

 private:
  void frame_features(std::span<const double> frame, std::span<double> out) const;

  MfccConfig cfg_;
  MelFilterbank bank_;
  Fft fft_;
  std::vector<double> window_;
  std::vector<double> dct_basis_;  // n_coeffs x n_mels
  std::vector<std::pair<std::size_t, std::size_t>> support_;  // nonzero bins per filter
};

FeatureMatrix extract_features(const AudioClip& clip, const MfccConfig& cfg = {});

}  // namespace kws::dsp

#endif  // KWS_DSP_MFCC_H_
