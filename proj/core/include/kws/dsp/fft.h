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

#ifndef KWS_DSP_FFT_H_
#define KWS_DSP_FFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace kws::dsp {

// Iterative radix-2 decimation-in-time FFT of a fixed power-of-two length.
// Twiddles and the bit-reversal permutation are computed once; `forward` is
// const and may be called concurrently from several threads.
class Fft {
 public:
  explicit Fft(std::size_t length);

  std::size_t length() const { return length_; }

  // In-place forward transform, X[k] = sum_n x[n] exp(-2 pi i k n / N).
  void forward(std::span<std::complex<double>> data) const;

 private:
  std::size_t length_;
  std::vector<std::complex<double>> twiddles_;
  std::vector<std::size_t> bit_reverse_;
};

bool is_power_of_two(std::size_t n);

}  // namespace kws::dsp

#endif  // KWS_DSP_FFT_H_
