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

#include "kws/tensor.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "kws/error.h"

namespace kws {

std::size_t num_elements(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

bool QuantParams::operator==(const QuantParams& other) const {
  return std::bit_cast<std::uint64_t>(scale) == std::bit_cast<std::uint64_t>(other.scale) &&
         zero_point == other.zero_point;
}

namespace {

void check_shape(const Shape& shape, std::size_t data_size) {
  for (std::size_t d : shape) {
    require(d > 0, ErrorCode::kContract, "tensor extents must be positive");
  }
  if (num_elements(shape) != data_size) {
    fail(ErrorCode::kContract, "tensor data length " + std::to_string(data_size) +
                                   " does not match shape " + shape_to_string(shape));
  }
}

void check_quant(const QuantParams& qp) {
  if (!(qp.scale > 0.0) || !std::isfinite(qp.scale)) {
    fail(ErrorCode::kInvalidInput, "quantization scale must be positive and finite");
  }
}

}  // namespace

Tensor Tensor::real(Shape shape, std::vector<float> data) {
  check_shape(shape, data.size());
  Tensor t;
  t.shape_ = std::move(shape);
  t.kind_ = ElemKind::kReal32;
  t.data_ = std::move(data);
  return t;
}

Tensor Tensor::int8(Shape shape, std::vector<std::int8_t> data, QuantParams quant) {
  check_shape(shape, data.size());
  check_quant(quant);
  require(quant.zero_point >= kInt8Min && quant.zero_point <= kInt8Max,
          ErrorCode::kContract, "int8 zero point out of range");
  Tensor t;
  t.shape_ = std::move(shape);
  t.kind_ = ElemKind::kInt8;
  t.data_ = std::move(data);
  t.quant_ = quant;
  return t;
}

Tensor Tensor::int32(Shape shape, std::vector<std::int32_t> data,
                     std::optional<QuantParams> quant) {
  check_shape(shape, data.size());
  if (quant) check_quant(*quant);
  Tensor t;
  t.shape_ = std::move(shape);
  t.kind_ = ElemKind::kInt32;
  t.data_ = std::move(data);
  t.quant_ = quant;
  return t;
}

std::span<const float> Tensor::real_data() const {
  require(kind_ == ElemKind::kReal32, ErrorCode::kContract, "tensor is not real32");
  return std::get<std::vector<float>>(data_);
}

std::span<const std::int8_t> Tensor::int8_data() const {
  require(kind_ == ElemKind::kInt8, ErrorCode::kContract, "tensor is not int8");
  return std::get<std::vector<std::int8_t>>(data_);
}

std::span<const std::int32_t> Tensor::int32_data() const {
  require(kind_ == ElemKind::kInt32, ErrorCode::kContract, "tensor is not int32");
  return std::get<std::vector<std::int32_t>>(data_);
}

bool Tensor::operator==(const Tensor& other) const {
  if (shape_ != other.shape_ || kind_ != other.kind_ || quant_ != other.quant_) return false;
  return std::visit(
      [&](const auto& mine) {
        using Vec = std::decay_t<decltype(mine)>;
        const auto& theirs = std::get<Vec>(other.data_);
        return mine.size() == theirs.size() &&
               (mine.empty() ||
                std::memcmp(mine.data(), theirs.data(),
                            mine.size() * sizeof(typename Vec::value_type)) == 0);
      },
      data_);
}

std::int64_t round_half_away(double x) { return std::llround(x); }

std::int8_t quantize_value(double x, const QuantParams& qp) {
  const double scaled = x / qp.scale;
  // Clamp before rounding so huge inputs cannot overflow the integer cast.
  const double bounded = std::clamp(scaled, -1024.0, 1024.0);
  const std::int64_t q = round_half_away(bounded) + qp.zero_point;
  return static_cast<std::int8_t>(std::clamp<std::int64_t>(q, kInt8Min, kInt8Max));
}

double dequantize_value(std::int32_t q, const QuantParams& qp) {
  return qp.scale * static_cast<double>(q - qp.zero_point);
}

Tensor quantize(const Tensor& t, const QuantParams& qp) {
  check_quant(qp);
  const auto src = t.real_data();
  std::vector<std::int8_t> out(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!std::isfinite(src[i])) fail(ErrorCode::kInvalidInput, "non-finite value in quantize");
    out[i] = quantize_value(src[i], qp);
  }
  return Tensor::int8(t.shape(), std::move(out), qp);
}

Tensor dequantize(const Tensor& t) {
  require(t.quant().has_value(), ErrorCode::kContract, "dequantize needs QuantParams");
  const QuantParams qp = *t.quant();
  std::vector<float> out(t.size());
  if (t.kind() == ElemKind::kInt8) {
    const auto src = t.int8_data();
    for (std::size_t i = 0; i < src.size(); ++i) {
      out[i] = static_cast<float>(dequantize_value(src[i], qp));
    }
  } else {
    const auto src = t.int32_data();
    for (std::size_t i = 0; i < src.size(); ++i) {
      out[i] = static_cast<float>(dequantize_value(src[i], qp));
    }
  }
  return Tensor::real(t.shape(), std::move(out));
}

Tensor quantize_bias(const Tensor& t, double scale) {
  check_quant(QuantParams{scale, 0});
  const auto src = t.real_data();
  std::vector<std::int32_t> out(src.size());
  constexpr double kLo = std::numeric_limits<std::int32_t>::min();
  constexpr double kHi = std::numeric_limits<std::int32_t>::max();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!std::isfinite(src[i])) fail(ErrorCode::kInvalidInput, "non-finite bias");
    const double scaled = std::clamp(static_cast<double>(src[i]) / scale, kLo, kHi);
    out[i] = static_cast<std::int32_t>(std::clamp<std::int64_t>(
        round_half_away(scaled), std::numeric_limits<std::int32_t>::min(),
        std::numeric_limits<std::int32_t>::max()));
  }
  return Tensor::int32(t.shape(), std::move(out), QuantParams{scale, 0});
}

QuantParams choose_qparams(double min, double max, bool symmetric) {
  if (!std::isfinite(min) || !std::isfinite(max)) {
    fail(ErrorCode::kInvalidInput, "calibration range must be finite");
  }
  require(min <= max, ErrorCode::kInvalidInput, "calibration range has min > max");
  if (symmetric) {
    const double bound = std::max(std::abs(min), std::abs(max));
    if (bound == 0.0) return {1.0, 0};
    return {bound / 127.0, 0};
  }
  min = std::min(min, 0.0);
  max = std::max(max, 0.0);
  if (min == max) return {1.0, 0};
  const double scale = (max - min) / 255.0;
  const std::int64_t zp = round_half_away(-128.0 - min / scale);
  return {scale, static_cast<std::int32_t>(std::clamp<std::int64_t>(zp, kInt8Min, kInt8Max))};
}

}  // namespace kws
