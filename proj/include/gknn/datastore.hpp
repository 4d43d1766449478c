// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "gknn/core_types.hpp"
#include "gknn/tensor_io.hpp"

namespace gknn {

enum class StoreLang : std::uint8_t { kCN = 0, kEN = 1, kAll = 2 };

std::string_view to_string(StoreLang lang);
/// Accepts "cn", "en", "all" (case-insensitive). Throws kConfig.
StoreLang parse_store_lang(std::string_view text);

/// Per-frame CTC pseudo-labels: argmax of each row, ties to the lowest id.
template <typename Derived>
std::vector<TokenId> pseudo_labels(const Eigen::MatrixBase<Derived>& posteriors) {
  if (posteriors.rows() == 0) {
    throw Error(ErrorKind::kShape, "pseudo_labels needs at least one frame");
  }
  std::vector<TokenId> labels;
  labels.reserve(static_cast<std::size_t>(posteriors.rows()));
  for (Eigen::Index i = 0; i < posteriors.rows(); ++i) {
    const auto best = argmax_lowest(posteriors.row(i));
    if (!best) {
      throw Error(ErrorKind::kInvalidLogits,
                  "frame " + std::to_string(i) + " contains NaN");
    }
    labels.push_back(static_cast<TokenId>(*best));
  }
  return labels;
}

inline std::vector<TokenId> pseudo_labels(const LogitMatrix& logits) {
  return pseudo_labels(logits.probs());
}

/// Frame-level key/value pairs: keys are float32 embeddings, values are
/// pseudo-label token ids. Immutable once constructed.
class Datastore {
 public:
  Datastore(StoreLang lang, FloatMatrix keys, std::vector<TokenId> values);

  StoreLang lang() const { return lang_; }
  Eigen::Index dim() const { return keys_.cols(); }
  std::size_t count() const { return values_.size(); }
  const FloatMatrix& keys() const { return keys_; }
  const std::vector<TokenId>& values() const { return values_; }

  /// Checks value range and, for CN/EN stores, the label languages.
  void check_vocabulary(const Vocabulary& vocab) const;

  /// Count of entries per token id, sized to the vocabulary.
  std::vector<std::size_t> label_histogram(std::size_t vocab_size) const;

  bool operator==(const Datastore& other) const;

 private:
  StoreLang lang_;
  FloatMatrix keys_;
  std::vector<TokenId> values_;
};

/// Keys are the embeddings as given, values the pseudo-labels. Blank frames
/// are kept.
Datastore build_datastore(const FloatMatrix& embeddings, const LogitMatrix& logits,
                          StoreLang lang, const Vocabulary& vocab);

inline constexpr std::uint8_t kDatastoreVersion = 1;

/// "KNDS", version u8, lang u8, 2 reserved bytes, dim u32, count u64, keys
/// (count x dim float32, row-major), values (count x u32). Little-endian.
std::vector<std::uint8_t> encode_datastore(const Datastore& ds);
Datastore decode_datastore(std::span<const std::uint8_t> bytes);

void save_datastore(const Datastore& ds, const std::filesystem::path& path);
Datastore load_datastore(const std::filesystem::path& path);

}  // namespace gknn
