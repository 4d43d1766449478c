// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gknn/core_types.hpp"

namespace gknn {

/// Row-major float32 matrix: frame embeddings and datastore keys.
using FloatMatrix =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class TensorKind : std::uint8_t { kEmbedding = 0, kProb = 1, kLogProb = 2 };

/// Contents of a TNSR file. Only float32 payloads are defined.
///
/// Layout, little-endian: "TNSR", version u8 = 1, dtype u8 = 0 (float32),
/// kind u8, ndim u8, ndim x u64 dims, row-major float32 data.
struct Tensor {
  TensorKind kind = TensorKind::kEmbedding;
  std::vector<std::uint64_t> dims;
  std::vector<float> data;

  std::uint64_t element_count() const;
};

inline constexpr std::uint8_t kTensorVersion = 1;

std::vector<std::uint8_t> encode_tensor(const Tensor& t);
/// Throws FormatError carrying the failing byte offset.
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

void write_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor(const std::filesystem::path& path);

Tensor make_tensor(TensorKind kind, const FloatMatrix& m);

/// Requires a 2-d tensor. Kind is not checked.
FloatMatrix to_matrix(const Tensor& t);

/// Embedding tensors only; rejects NaN/Inf entries.
FloatMatrix to_embeddings(const Tensor& t);

/// Prob or logprob tensors; applies the declared normalization per row.
LogitMatrix to_logits(const Tensor& t);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);

namespace detail {

// Little-endian field codecs shared by the tensor and datastore formats.
class ByteWriter {
 public:
  void put_magic(const char (&magic)[5]) {
    buf_.insert(buf_.end(), magic, magic + 4);
  }
  void put_u8(std::uint8_t v) { buf_.push_back(v); }
  void put_u16(std::uint16_t v) { put_le(v, 2); }
  void put_u32(std::uint32_t v) { put_le(v, 4); }
  void put_u64(std::uint64_t v) { put_le(v, 8); }
  void put_f32(float v);
  void put_bytes(std::span<const std::uint8_t> b) {
    buf_.insert(buf_.end(), b.begin(), b.end());
  }
  std::vector<std::uint8_t> take() { return std::move(buf_); }
  void reserve(std::size_t n) { buf_.reserve(n); }

 private:
  void put_le(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8(const char* field) { return static_cast<std::uint8_t>(le(1, field)); }
  std::uint16_t u16(const char* field) { return static_cast<std::uint16_t>(le(2, field)); }
  std::uint32_t u32(const char* field) { return static_cast<std::uint32_t>(le(4, field)); }
  std::uint64_t u64(const char* field) { return le(8, field); }
  float f32(const char* field);
  void expect_magic(const char (&magic)[5]);
  /// Throws unless `count` elements of `width` bytes remain.
  void require(std::uint64_t count, std::uint64_t width, const char* field) const;
  void expect_end() const;
  std::size_t offset() const { return pos_; }

 private:
  std::uint64_t le(int width, const char* field);
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail
}  // namespace gknn
