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

#include "kws/dsp/fft.h"

#include <cmath>
#include <numbers>
#include <utility>

#include "kws/error.h"

namespace kws::dsp {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

Fft::Fft(std::size_t length) : length_(length) {
  require(is_power_of_two(length), ErrorCode::kInvalidConfig,
          "FFT length must be a power of two");
  twiddles_.resize(length / 2);
  for (std::size_t k = 0; k < length / 2; ++k) {
    const double angle =
        -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(length);
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }
  bit_reverse_.resize(length);
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < length) ++bits;
  for (std::size_t i = 0; i < length; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
    bit_reverse_[i] = r;
  }
}

void Fft::forward(std::span<std::complex<double>> data) const {
  require(data.size() == length_, ErrorCode::kContract, "FFT input length mismatch");
  for (std::size_t i = 0; i < length_; ++i) {
    if (i < bit_reverse_[i]) std::swap(data[i], data[bit_reverse_[i]]);
  }
  for (std::size_t half = 1; half < length_; half <<= 1) {
    const std::size_t stride = length_ / (2 * half);
    for (std::size_t start = 0; start < length_; start += 2 * half) {
      for (std::size_t j = 0; j < half; ++j) {
        // Written out; operator* on std::complex goes through the C99 NaN-recovery path.
        const std::complex<double> w = twiddles_[j * stride];
        const std::complex<double> x = data[start + j + half];
        const std::complex<double> t{w.real() * x.real() - w.imag() * x.imag(),
                                     w.real() * x.imag() + w.imag() * x.real()};
        data[start + j + half] = data[start + j] - t;
        data[start + j] += t;
      }
    }
  }
}

}  // namespace kws::dsp
