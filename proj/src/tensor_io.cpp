// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#include "gknn/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace gknn {
namespace detail {

void ByteWriter::put_f32(float v) { put_u32(std::bit_cast<std::uint32_t>(v)); }

float ByteReader::f32(const char* field) { return std::bit_cast<float>(u32(field)); }

std::uint64_t ByteReader::le(int width, const char* field) {
  if (bytes_.size() - pos_ < static_cast<std::size_t>(width)) {
    throw FormatError(std::string("truncated while reading ") + field, pos_);
  }
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
  }
  pos_ += width;
  return v;
}

void ByteReader::expect_magic(const char (&magic)[5]) {
  if (bytes_.size() - pos_ < 4) throw FormatError("truncated magic", pos_);
  if (std::memcmp(bytes_.data() + pos_, magic, 4) != 0) {
    throw FormatError(std::string("bad magic, expected \"") + magic + "\"", pos_);
  }
  pos_ += 4;
}

void ByteReader::require(std::uint64_t count, std::uint64_t width,
                         const char* field) const {
  const std::uint64_t remaining = bytes_.size() - pos_;
  if (width != 0 && count > remaining / width) {
    throw FormatError(std::string("truncated ") + field, pos_);
  }
}

void ByteReader::expect_end() const {
  if (pos_ != bytes_.size()) throw FormatError("trailing bytes", pos_);
}

}  // namespace detail

std::uint64_t Tensor::element_count() const {
  std::uint64_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
  if (t.dims.size() > 255) throw Error(ErrorKind::kShape, "too many dimensions");
  if (t.element_count() != t.data.size()) {
    throw Error(ErrorKind::kShape, "tensor dims do not match data length");
  }
  detail::ByteWriter w;
  w.reserve(8 + 8 * t.dims.size() + 4 * t.data.size());
  w.put_magic("TNSR");
  w.put_u8(kTensorVersion);
  w.put_u8(0);
  w.put_u8(static_cast<std::uint8_t>(t.kind));
  w.put_u8(static_cast<std::uint8_t>(t.dims.size()));
  for (auto d : t.dims) w.put_u64(d);
  for (float v : t.data) w.put_f32(v);
  return w.take();
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic("TNSR");
  const std::size_t version_at = r.offset();
  if (r.u8("version") != kTensorVersion) {
    throw FormatError("unsupported tensor version", version_at);
  }
  const std::size_t dtype_at = r.offset();
  if (r.u8("dtype") != 0) throw FormatError("unsupported dtype", dtype_at);
  const std::size_t kind_at = r.offset();
  const std::uint8_t kind = r.u8("kind");
  if (kind > 2) throw FormatError("unknown tensor kind", kind_at);

  Tensor t;
  t.kind = static_cast<TensorKind>(kind);
  const std::uint8_t ndim = r.u8("ndim");
  r.require(ndim, 8, "dims");
  std::uint64_t count = 1;
  for (std::uint8_t i = 0; i < ndim; ++i) {
    const std::size_t at = r.offset();
    const std::uint64_t d = r.u64("dim");
    if (d != 0 && count > std::numeric_limits<std::uint64_t>::max() / d) {
      throw FormatError("dimension product overflows", at);
    }
    count *= d;
    t.dims.push_back(d);
  }
  r.require(count, 4, "tensor data");
  t.data.resize(count);
  for (auto& v : t.data) v = r.f32("tensor data");
  r.expect_end();
  return t;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

void write_tensor(const std::filesystem::path& path, const Tensor& t) {
  write_file(path, encode_tensor(t));
}

Tensor read_tensor(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_tensor(bytes);
  } catch (const FormatError& e) {
    throw e.with_prefix(path.string() + ": ");
  }
}

Tensor make_tensor(TensorKind kind, const FloatMatrix& m) {
  Tensor t;
  t.kind = kind;
  t.dims = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
  t.data.assign(m.data(), m.data() + m.size());
  return t;
}

FloatMatrix to_matrix(const Tensor& t) {
  if (t.dims.size() != 2) {
    throw Error(ErrorKind::kShape, "expected a 2-d tensor, got " +
                                       std::to_string(t.dims.size()) + "-d");
  }
  const auto rows = static_cast<Eigen::Index>(t.dims[0]);
  const auto cols = static_cast<Eigen::Index>(t.dims[1]);
  return Eigen::Map<const FloatMatrix>(t.data.data(), rows, cols);
}

FloatMatrix to_embeddings(const Tensor& t) {
  if (t.kind != TensorKind::kEmbedding) {
    throw Error(ErrorKind::kShape, "tensor is not an embedding tensor");
  }
  FloatMatrix m = to_matrix(t);
  if (!m.allFinite()) {
    throw Error(ErrorKind::kInvalidEmbedding, "embedding tensor has NaN/Inf entries");
  }
  return m;
}

LogitMatrix to_logits(const Tensor& t) {
  switch (t.kind) {
    case TensorKind::kProb: return LogitMatrix::from_probs(to_matrix(t));
    case TensorKind::kLogProb: return LogitMatrix::from_logprobs(to_matrix(t));
    case TensorKind::kEmbedding: break;
  }
  throw Error(ErrorKind::kShape, "tensor is not a prob/logprob tensor");
}

}  // namespace gknn
