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

#ifndef KWS_TENSOR_H_
#define KWS_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace kws {

using Shape = std::vector<std::size_t>;

std::size_t num_elements(const Shape& shape);
std::string shape_to_string(const Shape& shape);

enum class ElemKind : std::uint8_t { kReal32 = 0, kInt8 = 1, kInt32 = 2 };

// Affine mapping real = scale * (q - zero_point).
struct QuantParams {
  double scale = 1.0;
  std::int32_t zero_point = 0;

  // Bit-pattern equality on the scale so round-trips are checked exactly.
  bool operator==(const QuantParams& other) const;
};

// Shaped, immutable, row-major value. int8 tensors always carry QuantParams;
// int32 tensors (biases, accumulators) may.
class Tensor {
 public:
  Tensor() = default;

  static Tensor real(Shape shape, std::vector<float> data);
  static Tensor int8(Shape shape, std::vector<std::int8_t> data, QuantParams quant);
  static Tensor int32(Shape shape, std::vector<std::int32_t> data,
                      std::optional<QuantParams> quant = std::nullopt);

  const Shape& shape() const { return shape_; }
  ElemKind kind() const { return kind_; }
  std::size_t size() const { return num_elements(shape_); }
  const std::optional<QuantParams>& quant() const { return quant_; }

  // Each accessor throws kContract if the element kind does not match.
  std::span<const float> real_data() const;
  std::span<const std::int8_t> int8_data() const;
  std::span<const std::int32_t> int32_data() const;

  bool operator==(const Tensor& other) const;

 private:
  Shape shape_;
  ElemKind kind_ = ElemKind::kReal32;
  std::variant<std::vector<float>, std::vector<std::int8_t>, std::vector<std::int32_t>> data_;
  std::optional<QuantParams> quant_;
};

inline constexpr std::int32_t kInt8Min = -128;
inline constexpr std::int32_t kInt8Max = 127;

// Round half away from zero; the single rounding rule used by every
// quantization step in this library.
std::int64_t round_half_away(double x);

// q = clamp(round_half_away(x / scale) + zero_point, -128, 127).
std::int8_t quantize_value(double x, const QuantParams& qp);
double dequantize_value(std::int32_t q, const QuantParams& qp);

// Throws kInvalidInput on non-finite elements or a non-positive scale.
Tensor quantize(const Tensor& t, const QuantParams& qp);
// Throws kContract when the tensor carries no QuantParams.
Tensor dequantize(const Tensor& t);

// Bias quantization: int32 values at scale `scale`, zero point 0, saturated
// to the int32 range.
Tensor quantize_bias(const Tensor& t, double scale);

// Asymmetric: the range is first widened to contain 0, then
// scale = (max - min) / 255 and zero_point = round(-128 - min / scale)
// clamped to int8. Symmetric: scale = max(|min|, |max|) / 127, zero_point 0.
// An all-zero range yields scale 1, zero_point 0.
QuantParams choose_qparams(double min, double max, bool symmetric);

}  // namespace kws

#endif  // KWS_TENSOR_H_
