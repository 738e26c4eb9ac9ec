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

#include "kws/dsp/mfcc.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "kws/error.h"

namespace kws::dsp {
namespace {

std::vector<double> hamming_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(n));
  }
  return w;
}

// Row k holds s_k cos(pi k (2n + 1) / (2M)), s_0 = sqrt(1/M), s_k = sqrt(2/M).
std::vector<double> dct_ii_basis(std::size_t n_out, std::size_t n_in) {
  std::vector<double> basis(n_out * n_in);
  const double m = static_cast<double>(n_in);
  for (std::size_t k = 0; k < n_out; ++k) {
    const double s = k == 0 ? std::sqrt(1.0 / m) : std::sqrt(2.0 / m);
    for (std::size_t n = 0; n < n_in; ++n) {
      basis[k * n_in + n] =
          s * std::cos(std::numbers::pi * static_cast<double>(k) *
                       (2.0 * static_cast<double>(n) + 1.0) / (2.0 * m));
    }
  }
  return basis;
}

void power_spectrum_into(std::span<const double> frame, const Fft& fft,
                         std::span<double> out) {
  std::vector<std::complex<double>> buf(fft.length());
  std::copy(frame.begin(), frame.end(), buf.begin());
  fft.forward(buf);
  const double n = static_cast<double>(fft.length());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::norm(buf[k]) / n;
}

// Bins outside [first, last) have zero weight for filter m.
using Support = std::vector<std::pair<std::size_t, std::size_t>>;

Support filter_support(const MelFilterbank& bank) {
  Support support(bank.n_mels, {0, 0});
  for (std::size_t m = 0; m < bank.n_mels; ++m) {
    std::size_t first = bank.n_bins, last = 0;
    for (std::size_t b = 0; b < bank.n_bins; ++b) {
      if (bank.weight(m, b) != 0.0) {
        first = std::min(first, b);
        last = b + 1;
      }
    }
    if (first < last) support[m] = {first, last};
  }
  return support;
}

void cepstrum_into(std::span<const double> power, const MelFilterbank& bank,
                   const Support& support, std::span<const double> basis, double log_floor,
                   std::span<double> out) {
  std::vector<double> log_mel(bank.n_mels);
  for (std::size_t m = 0; m < bank.n_mels; ++m) {
    double energy = 0.0;
    for (std::size_t b = support[m].first; b < support[m].second; ++b) {
      energy += bank.weight(m, b) * power[b];
    }
    log_mel[m] = std::log(std::max(energy, log_floor));
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    double acc = 0.0;
    for (std::size_t m = 0; m < bank.n_mels; ++m) acc += basis[k * bank.n_mels + m] * log_mel[m];
    out[k] = acc;
  }
}

}  // namespace

AudioClip canonicalize(AudioClip clip) {
  if (clip.sample_rate != kSampleRate) {
    fail(ErrorCode::kInvalidInput,
         "sample rate must be 16000 Hz, got " + std::to_string(clip.sample_rate));
  }
  clip.samples.resize(kClipSamples, 0.0);
  return clip;
}

void MfccConfig::validate(int sample_rate) const {
  require(frame_len > 0 && hop > 0, ErrorCode::kInvalidConfig,
          "frame_len and hop must be positive");
  require(is_power_of_two(fft_len), ErrorCode::kInvalidConfig,
          "fft_len must be a power of two");
  require(frame_len <= fft_len, ErrorCode::kInvalidConfig, "frame_len exceeds fft_len");
  require(n_mels > 0, ErrorCode::kInvalidConfig, "n_mels must be positive");
  require(n_coeffs > 0 && n_coeffs <= n_mels, ErrorCode::kInvalidConfig,
          "n_coeffs must be in [1, n_mels]");
  require(fmin > 0.0 && fmin < fmax, ErrorCode::kInvalidConfig,
          "require 0 < fmin < fmax");
  require(fmax <= sample_rate / 2.0, ErrorCode::kInvalidConfig,
          "fmax exceeds the Nyquist frequency");
  require(log_floor > 0.0, ErrorCode::kInvalidConfig, "log_floor must be positive");
}

std::size_t frame_count(std::size_t n_samples, const MfccConfig& cfg) {
  if (n_samples < cfg.frame_len) return 0;
  return (n_samples - cfg.frame_len) / cfg.hop + 1;
}

std::vector<std::vector<double>> frame_signal(const AudioClip& clip,
                                              const MfccConfig& cfg) {
  if (clip.samples.size() < cfg.frame_len) {
    fail(ErrorCode::kInvalidInput, "clip has " + std::to_string(clip.samples.size()) +
                                       " samples, fewer than one frame");
  }
  const std::size_t n = frame_count(clip.samples.size(), cfg);
  std::vector<std::vector<double>> frames;
  frames.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto begin = clip.samples.begin() + static_cast<std::ptrdiff_t>(i * cfg.hop);
    frames.emplace_back(begin, begin + static_cast<std::ptrdiff_t>(cfg.frame_len));
  }
  return frames;
}

std::vector<double> apply_hamming(std::span<const double> frame) {
  const auto w = hamming_window(frame.size());
  std::vector<double> out(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) out[i] = frame[i] * w[i];
  return out;
}

std::vector<double> power_spectrum(std::span<const double> windowed_frame,
                                   const MfccConfig& cfg) {
  require(windowed_frame.size() <= cfg.fft_len, ErrorCode::kContract,
          "frame longer than fft_len");
  const Fft fft(cfg.fft_len);
  std::vector<double> out(cfg.n_bins());
  power_spectrum_into(windowed_frame, fft, out);
  return out;
}

double hz_to_mel(double hz) {
  if (!(hz >= 0.0)) fail(ErrorCode::kInvalidInput, "frequency must be non-negative");
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}

double mel_to_hz(double mel) {
  if (!(mel >= 0.0)) fail(ErrorCode::kInvalidInput, "mel value must be non-negative");
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank build_mel_filterbank(const MfccConfig& cfg, int sample_rate) {
  cfg.validate(sample_rate);
  MelFilterbank bank;
  bank.n_mels = cfg.n_mels;
  bank.n_bins = cfg.n_bins();
  bank.weights.assign(bank.n_mels * bank.n_bins, 0.0);

  const double mel_lo = hz_to_mel(cfg.fmin);
  const double mel_hi = hz_to_mel(cfg.fmax);
  const std::size_t n_edges = cfg.n_mels + 2;
  bank.band_edges.resize(n_edges);
  for (std::size_t i = 0; i < n_edges; ++i) {
    const double mel = mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                    static_cast<double>(n_edges - 1);
    bank.band_edges[i] = mel_to_hz(mel);
  }

  const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(cfg.fft_len);
  for (std::size_t m = 0; m < cfg.n_mels; ++m) {
    const double lo = bank.band_edges[m];
    const double mid = bank.band_edges[m + 1];
    const double hi = bank.band_edges[m + 2];
    for (std::size_t b = 0; b < bank.n_bins; ++b) {
      const double f = static_cast<double>(b) * bin_hz;
      const double rising = (f - lo) / (mid - lo);
      const double falling = (hi - f) / (hi - mid);
      bank.weights[m * bank.n_bins + b] = std::max(0.0, std::min(rising, falling));
    }
  }
  for (std::size_t m = 0; m < cfg.n_mels; ++m) {
    const auto row = std::span<const double>(bank.weights).subspan(m * bank.n_bins, bank.n_bins);
    if (std::none_of(row.begin(), row.end(), [](double w) { return w > 0.0; })) {
      fail(ErrorCode::kInvalidConfig,
           "mel filter " + std::to_string(m) + " covers no FFT bin; increase fft_len");
    }
  }
  return bank;
}

std::vector<double> mfcc_frame(std::span<const double> power,
                               const MelFilterbank& bank, const MfccConfig& cfg) {
  require(power.size() == bank.n_bins, ErrorCode::kContract,
          "power spectrum length does not match filterbank");
  require(cfg.n_coeffs <= bank.n_mels, ErrorCode::kContract,
          "n_coeffs exceeds filterbank size");
  const auto basis = dct_ii_basis(cfg.n_coeffs, bank.n_mels);
  std::vector<double> out(cfg.n_coeffs);
  cepstrum_into(power, bank, filter_support(bank), basis, cfg.log_floor, out);
  return out;
}

MfccExtractor::MfccExtractor(MfccConfig cfg)
    : cfg_(cfg),
      bank_(build_mel_filterbank(cfg_)),
      fft_(cfg_.fft_len),
      window_(hamming_window(cfg_.frame_len)),
      dct_basis_(dct_ii_basis(cfg_.n_coeffs, cfg_.n_mels)),
      support_(filter_support(bank_)) {}

void MfccExtractor::frame_features(std::span<const double> frame,
                                   std::span<double> out) const {
  std::vector<double> windowed(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) windowed[i] = frame[i] * window_[i];
  std::vector<double> power(cfg_.n_bins());
  power_spectrum_into(windowed, fft_, power);
  cepstrum_into(power, bank_, support_, dct_basis_, cfg_.log_floor, out);
}

FeatureMatrix MfccExtractor::extract(const AudioClip& clip) const {
  const AudioClip canonical = canonicalize(clip);
  if (canonical.samples.size() < cfg_.frame_len) {
    fail(ErrorCode::kInvalidInput, "clip shorter than one frame");
  }
  FeatureMatrix features;
  features.n_frames = frame_count(canonical.samples.size(), cfg_);
  features.n_coeffs = cfg_.n_coeffs;
  features.values.resize(features.n_frames * features.n_coeffs);
  const std::span<const double> samples(canonical.samples);
  for (std::size_t f = 0; f < features.n_frames; ++f) {
    frame_features(samples.subspan(f * cfg_.hop, cfg_.frame_len),
                   std::span<double>(features.values).subspan(f * cfg_.n_coeffs, cfg_.n_coeffs));
  }
  return features;
}

FeatureMatrix extract_features(const AudioClip& clip, const MfccConfig& cfg) {
  return MfccExtractor(cfg).extract(clip);
}

}  // namespace kws::dsp
