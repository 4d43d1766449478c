// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#include "gknn/datastore.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>

namespace gknn {

std::string_view to_string(StoreLang lang) {
  switch (lang) {
    case StoreLang::kCN: return "cn";
    case StoreLang::kEN: return "en";
    case StoreLang::kAll: return "all";
  }
  return "?";
}

StoreLang parse_store_lang(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "cn") return StoreLang::kCN;
  if (lower == "en") return StoreLang::kEN;
  if (lower == "all") return StoreLang::kAll;
  throw Error(ErrorKind::kConfig, "unknown store language \"" + std::string(text) + "\"");
}

Datastore::Datastore(StoreLang lang, FloatMatrix keys, std::vector<TokenId> values)
    : lang_(lang), keys_(std::move(keys)), values_(std::move(values)) {
  if (static_cast<std::size_t>(keys_.rows()) != values_.size()) {
    throw Error(ErrorKind::kShape, "datastore has " + std::to_string(keys_.rows()) +
                                       " keys but " + std::to_string(values_.size()) +
                                       " values");
  }
  if (keys_.cols() == 0) throw Error(ErrorKind::kShape, "datastore key dimension is 0");
  if (!keys_.allFinite()) {
    throw Error(ErrorKind::kInvalidEmbedding, "datastore keys contain NaN/Inf");
  }
}

void Datastore::check_vocabulary(const Vocabulary& vocab) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const TokenId v = values_[i];
    if (v >= vocab.size()) {
      throw Error(ErrorKind::kShape, "entry " + std::to_string(i) + " has token id " +
                                         std::to_string(v) + " outside the vocabulary");
    }
    if (lang_ == StoreLang::kAll) continue;
    const TokenClass cls = vocab.token_class(v);
    const TokenClass want = lang_ == StoreLang::kCN ? TokenClass::kCN : TokenClass::kEN;
    if (cls != TokenClass::kBlank && cls != want) {
      throw LabelLanguageError("frame " + std::to_string(i) + ": pseudo-label \"" +
                                   vocab.token(v) + "\" is " +
                                   std::string(to_string(cls)) + " but the store is " +
                                   std::string(to_string(lang_)),
                               i);
    }
  }
}

std::vector<std::size_t> Datastore::label_histogram(std::size_t vocab_size) const {
  std::vector<std::size_t> hist(vocab_size, 0);
  for (TokenId v : values_) {
    if (v < vocab_size) ++hist[v];
  }
  return hist;
}

bool Datastore::operator==(const Datastore& other) const {
  if (lang_ != other.lang_ || values_ != other.values_ ||
      keys_.rows() != other.keys_.rows() || keys_.cols() != other.keys_.cols()) {
    return false;
  }
  // Bitwise, so -0.0 and 0.0 differ.
  return std::memcmp(keys_.data(), other.keys_.data(),
                     sizeof(float) * static_cast<std::size_t>(keys_.size())) == 0;
}

Datastore build_datastore(const FloatMatrix& embeddings, const LogitMatrix& logits,
                          StoreLang lang, const Vocabulary& vocab) {
  if (embeddings.rows() == 0 || logits.frames() == 0) {
    throw Error(ErrorKind::kShape, "cannot build a datastore from zero frames");
  }
  if (embeddings.rows() != logits.frames()) {
    throw Error(ErrorKind::kShape, "frame count mismatch: embeddings have " +
                                       std::to_string(embeddings.rows()) +
                                       " frames, logits have " +
                                       std::to_string(logits.frames()));
  }
  if (static_cast<std::size_t>(logits.vocab_size()) != vocab.size()) {
    throw Error(ErrorKind::kShape, "logits have " + std::to_string(logits.vocab_size()) +
                                       " columns but the vocabulary has " +
                                       std::to_string(vocab.size()) + " tokens");
  }
  Datastore ds(lang, embeddings, pseudo_labels(logits));
  ds.check_vocabulary(vocab);
  return ds;
}

std::vector<std::uint8_t> encode_datastore(const Datastore& ds) {
  detail::ByteWriter w;
  w.reserve(20 + ds.count() * (4 * static_cast<std::size_t>(ds.dim()) + 4));
  w.put_magic("KNDS");
  w.put_u8(kDatastoreVersion);
  w.put_u8(static_cast<std::uint8_t>(ds.lang()));
  w.put_u16(0);
  w.put_u32(static_cast<std::uint32_t>(ds.dim()));
  w.put_u64(ds.count());
  const FloatMatrix& keys = ds.keys();
  for (Eigen::Index i = 0; i < keys.size(); ++i) w.put_f32(keys.data()[i]);
  for (TokenId v : ds.values()) w.put_u32(v);
  return w.take();
}

Datastore decode_datastore(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic("KNDS");
  std::size_t at = r.offset();
  if (r.u8("version") != kDatastoreVersion) {
    throw FormatError("unsupported datastore version", at);
  }
  at = r.offset();
  const std::uint8_t lang = r.u8("lang");
  if (lang > 2) throw FormatError("unknown datastore language", at);
  at = r.offset();
  if (r.u16("reserved") != 0) throw FormatError("reserved bytes must be zero", at);
  at = r.offset();
  const std::uint32_t dim = r.u32("dim");
  if (dim == 0) throw FormatError("key dimension is zero", at);
  const std::uint64_t count = r.u64("count");
  r.require(count, static_cast<std::uint64_t>(dim) * 4 + 4, "keys/values");

  FloatMatrix keys(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < keys.size(); ++i) {
    at = r.offset();
    const float v = r.f32("keys");
    if (!std::isfinite(v)) throw FormatError("non-finite key", at);
    keys.data()[i] = v;
  }
  std::vector<TokenId> values(count);
  for (auto& v : values) v = r.u32("values");
  r.expect_end();
  return Datastore(static_cast<StoreLang>(lang), std::move(keys), std::move(values));
}

void save_datastore(const Datastore& ds, const std::filesystem::path& path) {
  write_file(path, encode_datastore(ds));
}

Datastore load_datastore(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_datastore(bytes);
  } catch (const FormatError& e) {
    throw e.with_prefix(path.string() + ": ");
  }
}

}  // namespace gknn
