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

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "kws/error.h"

namespace kws::format {
namespace {

using engine::Arithmetic;
using engine::LayerKind;
using engine::LayerSpec;
using engine::ModelGraph;

enum class Role : std::uint8_t {
  kWeights = 1,
  kBias = 2,
  kScale = 3,
  kOffset = 4,
  kGamma = 5,
  kBeta = 6,
  kMean = 7,
  kVariance = 8,
  kLut = 9,
};

constexpr std::uint8_t kFlagRelu = 1u << 0;
constexpr std::uint8_t kFlagBatchNorm = 1u << 1;

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void i32(std::int32_t v) { put(static_cast<std::uint32_t>(v), 4); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    bytes_.insert(bytes_.end(), b, b + n);
  }
  void patch_u32(std::size_t at, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
  }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::int32_t i32() { return static_cast<std::int32_t>(static_cast<std::uint32_t>(get(4))); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) fail(ErrorCode::kTruncated, "model record cut short");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

[[noreturn]] void inconsistent(const std::string& what) {
  fail(ErrorCode::kShapeInconsistency, what);
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorCode::kUnencodable, std::string(what) + " exceeds 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

void write_shape(Writer& w, const Shape& s) {
  if (s.size() > 255) fail(ErrorCode::kUnencodable, "tensor rank exceeds 255");
  w.u8(static_cast<std::uint8_t>(s.size()));
  for (std::size_t d : s) w.u32(checked_u32(d, "extent"));
}

Shape read_shape(Reader& r) {
  Shape s(r.u8());
  for (auto& d : s) d = r.u32();
  return s;
}

void write_quant(Writer& w, const std::optional<QuantParams>& q) {
  w.u8(q ? 1 : 0);
  if (q) {
    w.f64(q->scale);
    w.i32(q->zero_point);
  }
}

std::optional<QuantParams> read_quant(Reader& r) {
  const std::uint8_t present = r.u8();
  if (present > 1) inconsistent("invalid QuantParams presence flag");
  if (!present) return std::nullopt;
  QuantParams q;
  q.scale = r.f64();
  q.zero_point = r.i32();
  return q;
}

void write_tensor(Writer& w, Role role, const Tensor& t) {
  w.u8(static_cast<std::uint8_t>(role));
  w.u8(static_cast<std::uint8_t>(t.kind()));
  write_shape(w, t.shape());
  write_quant(w, t.quant());
  switch (t.kind()) {
    case ElemKind::kReal32: {
      const auto d = t.real_data();
      w.u32(checked_u32(d.size() * 4, "blob"));
      for (float v : d) w.u32(std::bit_cast<std::uint32_t>(v));
      break;
    }
    case ElemKind::kInt8: {
      const auto d = t.int8_data();
      w.u32(checked_u32(d.size(), "blob"));
      w.raw(d.data(), d.size());
      break;
    }
    case ElemKind::kInt32: {
      const auto d = t.int32_data();
      w.u32(checked_u32(d.size() * 4, "blob"));
      for (std::int32_t v : d) w.i32(v);
      break;
    }
  }
}

Tensor read_tensor_body(Reader& r, std::uint8_t kind_tag) {
  if (kind_tag > static_cast<std::uint8_t>(ElemKind::kInt32)) inconsistent("unknown element kind");
  const auto kind = static_cast<ElemKind>(kind_tag);
  Shape shape = read_shape(r);
  const auto quant = read_quant(r);
  const std::uint32_t blob_len = r.u32();
  const std::size_t n = num_elements(shape);
  const std::size_t width = kind == ElemKind::kInt8 ? 1 : 4;
  if (shape.empty() || n * width != blob_len) {
    inconsistent("tensor blob length " + std::to_string(blob_len) +
                 " does not match shape " + shape_to_string(shape));
  }
  const auto blob = r.take(blob_len);
  auto word = [&](std::size_t i) {
    return static_cast<std::uint32_t>(blob[4 * i]) |
           (static_cast<std::uint32_t>(blob[4 * i + 1]) << 8) |
           (static_cast<std::uint32_t>(blob[4 * i + 2]) << 16) |
           (static_cast<std::uint32_t>(blob[4 * i + 3]) << 24);
  };
  try {
    switch (kind) {
      case ElemKind::kReal32: {
        if (quant) inconsistent("real32 tensor carries QuantParams");
        std::vector<float> d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = std::bit_cast<float>(word(i));
        return Tensor::real(std::move(shape), std::move(d));
      }
      case ElemKind::kInt8: {
        if (!quant) inconsistent("int8 tensor without QuantParams");
        std::vector<std::int8_t> d(n);
        std::memcpy(d.data(), blob.data(), n);
        return Tensor::int8(std::move(shape), std::move(d), *quant);
      }
      case ElemKind::kInt32: {
        std::vector<std::int32_t> d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = static_cast<std::int32_t>(word(i));
        return Tensor::int32(std::move(shape), std::move(d), quant);
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kShapeInconsistency) throw;
    inconsistent(std::string("invalid tensor: ") + e.what());
  }
  inconsistent("unknown element kind");
}

void write_layer(Writer& w, const LayerSpec& l) {
  w.u8(static_cast<std::uint8_t>(l.kind));
  std::uint8_t flags = 0;
  if (l.relu) flags |= kFlagRelu;
  if (l.batchnorm) flags |= kFlagBatchNorm;
  w.u8(flags);
  if (l.name.size() > std::numeric_limits<std::uint16_t>::max()) {
    fail(ErrorCode::kUnencodable, "layer name too long");
  }
  w.u16(static_cast<std::uint16_t>(l.name.size()));
  w.raw(l.name.data(), l.name.size());
  write_shape(w, l.input_shape);
  write_shape(w, l.output_shape);
  w.u32(checked_u32(l.kernel_h, "kernel_h"));
  w.u32(checked_u32(l.kernel_w, "kernel_w"));
  w.u32(checked_u32(l.stride_h, "stride_h"));
  w.u32(checked_u32(l.stride_w, "stride_w"));
  w.u8(static_cast<std::uint8_t>(l.padding));
  write_quant(w, l.input_quant);
  write_quant(w, l.output_quant);
  if (l.batchnorm) w.f64(l.batchnorm->epsilon);

  std::vector<std::pair<Role, const Tensor*>> tensors;
  if (l.weights) tensors.emplace_back(Role::kWeights, &*l.weights);
  if (l.bias) tensors.emplace_back(Role::kBias, &*l.bias);
  if (l.scale) tensors.emplace_back(Role::kScale, &*l.scale);
  if (l.offset) tensors.emplace_back(Role::kOffset, &*l.offset);
  if (l.batchnorm) {
    tensors.emplace_back(Role::kGamma, &l.batchnorm->gamma);
    tensors.emplace_back(Role::kBeta, &l.batchnorm->beta);
    tensors.emplace_back(Role::kMean, &l.batchnorm->mean);
    tensors.emplace_back(Role::kVariance, &l.batchnorm->variance);
  }
  if (l.lut) tensors.emplace_back(Role::kLut, &*l.lut);
  w.u8(static_cast<std::uint8_t>(tensors.size()));
  for (const auto& [role, t] : tensors) write_tensor(w, role, *t);
}

LayerSpec read_layer(Reader& r) {
  LayerSpec l;
  const std::uint8_t kind = r.u8();
  if (kind < 1 || kind > static_cast<std::uint8_t>(LayerKind::kLogistic)) {
    inconsistent("unknown layer kind tag " + std::to_string(kind));
  }
  l.kind = static_cast<LayerKind>(kind);
  const std::uint8_t flags = r.u8();
  if (flags & ~(kFlagRelu | kFlagBatchNorm)) inconsistent("unknown layer flags");
  l.relu = flags & kFlagRelu;
  const auto name = r.take(r.u16());
  l.name.assign(name.begin(), name.end());
  l.input_shape = read_shape(r);
  l.output_shape = read_shape(r);
  l.kernel_h = r.u32();
  l.kernel_w = r.u32();
  l.stride_h = r.u32();
  l.stride_w = r.u32();
  const std::uint8_t padding = r.u8();
  if (padding != static_cast<std::uint8_t>(engine::Padding::kValid)) {
    inconsistent("unsupported padding mode");
  }
  l.input_quant = read_quant(r);
  l.output_quant = read_quant(r);

  std::optional<double> epsilon;
  if (flags & kFlagBatchNorm) epsilon = r.f64();
  std::optional<Tensor> bn[4];

  const std::uint8_t count = r.u8();
  std::uint8_t last_role = 0;
  for (std::uint8_t i = 0; i < count; ++i) {
    const std::uint8_t role = r.u8();
    if (role <= last_role || role > static_cast<std::uint8_t>(Role::kLut)) {
      inconsistent("tensor roles must be known, unique and ascending");
    }
    last_role = role;
    Tensor t = read_tensor_body(r, r.u8());
    switch (static_cast<Role>(role)) {
      case Role::kWeights: l.weights = std::move(t); break;
      case Role::kBias: l.bias = std::move(t); break;
      case Role::kScale: l.scale = std::move(t); break;
      case Role::kOffset: l.offset = std::move(t); break;
      case Role::kGamma: bn[0] = std::move(t); break;
      case Role::kBeta: bn[1] = std::move(t); break;
      case Role::kMean: bn[2] = std::move(t); break;
      case Role::kVariance: bn[3] = std::move(t); break;
      case Role::kLut: l.lut = std::move(t); break;
    }
  }
  const bool any_bn = bn[0] || bn[1] || bn[2] || bn[3];
  if (epsilon) {
    if (!(bn[0] && bn[1] && bn[2] && bn[3])) inconsistent("incomplete batchnorm parameters");
    l.batchnorm = engine::BatchNormParams{std::move(*bn[0]), std::move(*bn[1]),
                                          std::move(*bn[2]), std::move(*bn[3]), *epsilon};
  } else if (any_bn) {
    inconsistent("batchnorm tensors without the batchnorm flag");
  }
  return l;
}

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in bounded chunks.
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - pos, 1u << 30);
    crc = ::crc32(crc, bytes.data() + pos, static_cast<uInt>(n));
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> encode_model(const ModelGraph& model) {
  model.validate();
  Writer w;
  w.raw(kMagic, 4);
  w.u16(kFormatVersion);
  w.u8(static_cast<std::uint8_t>(model.mode));
  w.u8(0);
  w.u32(0);  // total length, patched below
  write_shape(w, model.input_shape);
  w.u32(checked_u32(model.layers.size(), "layer count"));
  for (const auto& layer : model.layers) write_layer(w, layer);

  const std::size_t total = w.bytes().size() + 4;
  w.patch_u32(8, checked_u32(total, "file length"));
  w.u32(crc32(w.bytes()));
  return std::move(w.bytes());
}

ModelGraph decode_model(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) fail(ErrorCode::kBadMagic, "empty model file");
  const std::size_t magic_len = std::min<std::size_t>(bytes.size(), 4);
  if (std::memcmp(bytes.data(), kMagic, magic_len) != 0) {
    fail(ErrorCode::kBadMagic, "not a KWSM model file");
  }
  if (bytes.size() < kHeaderBytes + 4) fail(ErrorCode::kTruncated, "model header cut short");

  Reader header(bytes.subspan(4, kHeaderBytes - 4));
  const std::uint16_t version = header.u16();
  const std::uint8_t mode = header.u8();
  header.u8();
  const std::uint32_t declared = header.u32();
  if (declared > bytes.size()) {
    fail(ErrorCode::kTruncated, "model file has " + std::to_string(bytes.size()) +
                                    " bytes, header declares " + std::to_string(declared));
  }
  if (declared < bytes.size() || declared < kHeaderBytes + 4) {
    fail(ErrorCode::kCrcMismatch, "model length field does not match the file");
  }
  const auto body = bytes.first(declared - 4);
  Reader trailer(bytes.subspan(declared - 4, 4));
  if (crc32(body) != trailer.u32()) fail(ErrorCode::kCrcMismatch, "model checksum mismatch");
  if (version != kFormatVersion) {
    fail(ErrorCode::kUnsupportedVersion, "model format version " + std::to_string(version));
  }
  if (mode > static_cast<std::uint8_t>(Arithmetic::kInteger)) {
    inconsistent("unknown arithmetic mode");
  }

  ModelGraph model;
  model.mode = static_cast<Arithmetic>(mode);
  Reader r(body.subspan(kHeaderBytes));
  model.input_shape = read_shape(r);
  const std::uint32_t n_layers = r.u32();
  for (std::uint32_t i = 0; i < n_layers; ++i) model.layers.push_back(read_layer(r));
  if (!r.done()) inconsistent("unexpected bytes after the last layer");

  try {
    model.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kShapeInconsistency) throw;
    inconsistent(e.what());
  }
  return model;
}

void save_model(const ModelGraph& model, const std::filesystem::path& path) {
  const auto bytes = encode_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

ModelGraph load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::kIo, "read failed for " + path.string());
  return decode_model(bytes);
}

}  // namespace kws::format
