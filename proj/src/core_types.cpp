// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#include "gknn/core_types.hpp"

#include <fstream>
#include <sstream>

#include <unicode/utf8.h>

namespace gknn {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidToken: return "invalid-token";
    case ErrorKind::kDegenerateDistribution: return "degenerate-distribution";
    case ErrorKind::kInvalidLogits: return "invalid-logits";
    case ErrorKind::kInvalidEmbedding: return "invalid-embedding";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kLabelLanguage: return "label-language-violation";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kEmptyStore: return "empty-store";
    case ErrorKind::kEmptyNeighbors: return "empty-neighbors";
    case ErrorKind::kGateUnavailable: return "gate-unavailable";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kUndefinedRate: return "undefined-rate";
    case ErrorKind::kInvalidDuration: return "invalid-duration";
    case ErrorKind::kSpec: return "spec";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

std::string_view to_string(Lang lang) { return lang == Lang::kCN ? "cn" : "en"; }

std::string_view to_string(TokenClass cls) {
  switch (cls) {
    case TokenClass::kCN: return "cn";
    case TokenClass::kEN: return "en";
    case TokenClass::kBlank: return "blank";
  }
  return "?";
}

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());
  std::int32_t i = 0;
  while (i < length) {
    UChar32 cp;
    U8_NEXT(s, i, length, cp);
    if (cp < 0) {
      throw Error(ErrorKind::kInvalidToken,
                  "malformed UTF-8 at byte " + std::to_string(i));
    }
    out.push_back(static_cast<char32_t>(cp));
  }
  return out;
}

std::string encode_utf8(char32_t cp) {
  std::uint8_t buf[U8_MAX_LENGTH];
  std::int32_t len = 0;
  UBool error = false;
  U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (error) throw Error(ErrorKind::kInvalidToken, "codepoint not encodable");
  return std::string(reinterpret_cast<const char*>(buf), len);
}

TokenClass classify_token(std::string_view token) {
  if (token.empty()) throw Error(ErrorKind::kInvalidToken, "empty token");
  if (token == kBlankLiteral) return TokenClass::kBlank;
  for (char32_t cp : decode_utf8(token)) {
    if (is_cjk(cp)) return TokenClass::kCN;
  }
  return TokenClass::kEN;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens)
    : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_.front() != kBlankLiteral) {
    throw Error(ErrorKind::kInvalidToken, "token 0 must be \"<blk>\"");
  }
  const auto n = static_cast<Eigen::Index>(tokens_.size());
  classes_.reserve(tokens_.size());
  cn_mask_ = Eigen::ArrayXd::Zero(n);
  en_mask_ = Eigen::ArrayXd::Zero(n);
  for (std::size_t id = 0; id < tokens_.size(); ++id) {
    const TokenClass cls = classify_token(tokens_[id]);
    if (id > 0 && cls == TokenClass::kBlank) {
      throw Error(ErrorKind::kInvalidToken,
                  "\"<blk>\" may only appear as token 0 (found at " +
                      std::to_string(id) + ")");
    }
    if (!index_.emplace(tokens_[id], static_cast<TokenId>(id)).second) {
      throw Error(ErrorKind::kInvalidToken,
                  "duplicate token \"" + tokens_[id] + "\"");
    }
    classes_.push_back(cls);
    if (cls == TokenClass::kCN) cn_mask_[id] = 1.0;
    if (cls == TokenClass::kEN) en_mask_[id] = 1.0;
  }
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open vocabulary " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  try {
    return Vocabulary(std::move(tokens));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ProbDist ProbDist::from_normalized(Vector p) {
  if (p.size() == 0) {
    throw Error(ErrorKind::kDegenerateDistribution, "empty distribution");
  }
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0) {
      throw Error(ErrorKind::kDegenerateDistribution,
                  "entry " + std::to_string(i) + " is negative or non-finite");
    }
  }
  const double sum = p.sum();
  if (std::abs(sum - 1.0) > kProbSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "distribution sums to " << sum;
    throw Error(ErrorKind::kDegenerateDistribution, msg.str());
  }
  return ProbDist(std::move(p));
}

TokenId ProbDist::argmax() const {
  return static_cast<TokenId>(*argmax_lowest(p_));
}

namespace detail {

ProbDist normalize_impl(Eigen::VectorXd p) {
  if (p.size() == 0) {
    throw Error(ErrorKind::kDegenerateDistribution, "empty distribution");
  }
  if (!p.allFinite() || (p.array() < 0.0).any()) {
    throw Error(ErrorKind::kDegenerateDistribution,
                "negative or non-finite mass");
  }
  const double sum = p.sum();
  if (!(sum > 0.0)) {
    throw Error(ErrorKind::kDegenerateDistribution, "all-zero mass");
  }
  // Already normalized up to accumulated rounding: leave the bits alone.
  const double slack = 2.0 * static_cast<double>(p.size()) *
                       std::numeric_limits<double>::epsilon();
  if (std::abs(sum - 1.0) <= slack) return ProbDist::from_normalized(std::move(p));
  p /= sum;
  return ProbDist::from_normalized(std::move(p));
}

}  // namespace detail

ProbDist LogitMatrix::row(Eigen::Index frame) const {
  return ProbDist::from_normalized(probs_.row(frame).transpose());
}

LogitMatrix LogitMatrix::from_probs_impl(Matrix m) {
  LogitMatrix out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (m.row(r).hasNaN()) {
      throw Error(ErrorKind::kInvalidLogits,
                  "frame " + std::to_string(r) + " contains NaN");
    }
    try {
      m.row(r) = normalize(m.row(r).transpose()).values().transpose();
    } catch (const Error& e) {
      throw Error(ErrorKind::kInvalidLogits,
                  "frame " + std::to_string(r) + ": " + e.what());
    }
  }
  out.probs_ = std::move(m);
  return out;
}

LogitMatrix LogitMatrix::from_logprobs_impl(Matrix m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (m.row(r).hasNaN() || m.cols() == 0) {
      throw Error(ErrorKind::kInvalidLogits,
                  "frame " + std::to_string(r) + " contains NaN");
    }
    const double peak = m.row(r).maxCoeff();
    if (!std::isfinite(peak)) {
      throw Error(ErrorKind::kInvalidLogits,
                  "frame " + std::to_string(r) + " has no finite maximum");
    }
    m.row(r) = (m.row(r).array() - peak).exp().matrix();
  }
  return from_probs_impl(std::move(m));
}

}  // namespace gknn
