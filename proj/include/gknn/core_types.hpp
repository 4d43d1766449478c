// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "gknn/error.hpp"

namespace gknn {

using TokenId = std::uint32_t;

/// The two gating outcomes. Blank is never one of them.
enum class Lang : std::uint8_t { kCN = 0, kEN = 1 };

enum class TokenClass : std::uint8_t { kCN = 0, kEN = 1, kBlank = 2 };

inline constexpr std::string_view kBlankLiteral = "<blk>";
inline constexpr TokenId kBlankId = 0;

inline constexpr Lang other(Lang lang) {
  return lang == Lang::kCN ? Lang::kEN : Lang::kCN;
}
inline constexpr TokenClass to_class(Lang lang) {
  return lang == Lang::kCN ? TokenClass::kCN : TokenClass::kEN;
}
std::string_view to_string(Lang lang);
std::string_view to_string(TokenClass cls);

/// True for codepoints in the CJK unified ideograph blocks used for language
/// tagging (U+4E00-9FFF, U+3400-4DBF, U+F900-FAFF).
constexpr bool is_cjk(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
         (cp >= 0xF900 && cp <= 0xFAFF);
}

/// Decodes UTF-8 into codepoints. Throws kInvalidToken on malformed input.
std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(char32_t cp);

/// BLANK iff the token is "<blk>"; CN iff any codepoint is CJK; else EN.
TokenClass classify_token(std::string_view token);

/// Ordered token list. Index 0 is always "<blk>"; every other token is tagged
/// CN or EN by classify_token.
class Vocabulary {
 public:
  explicit Vocabulary(std::vector<std::string> tokens);

  /// One token per line, line number = token id.
  static Vocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  TokenClass token_class(TokenId id) const { return classes_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<TokenId> find(std::string_view token) const;

  /// 1.0 for tokens of `lang`, 0.0 elsewhere (blank included).
  const Eigen::ArrayXd& language_mask(Lang lang) const {
    return lang == Lang::kCN ? cn_mask_ : en_mask_;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<TokenClass> classes_;
  std::unordered_map<std::string, TokenId> index_;
  Eigen::ArrayXd cn_mask_;
  Eigen::ArrayXd en_mask_;
};

inline constexpr double kProbSumTolerance = 1e-9;

/// A probability vector over vocabulary indices, accumulated in double
/// precision. Entries are non-negative, finite, and sum to 1 within 1e-9.
class ProbDist {
 public:
  using Vector = Eigen::VectorXd;

  ProbDist() = default;

  /// Validates without rescaling. Throws kDegenerateDistribution.
  static ProbDist from_normalized(Vector p);

  const Vector& values() const { return p_; }
  Eigen::Index size() const { return p_.size(); }
  double operator[](Eigen::Index i) const { return p_[i]; }

  /// Index of the largest entry; ties go to the lowest index.
  TokenId argmax() const;

  bool operator==(const ProbDist& other) const {
    return p_.size() == other.p_.size() && p_ == other.p_;
  }

 private:
  explicit ProbDist(Vector p) : p_(std::move(p)) {}
  Vector p_;
};

/// Argmax over a dense row; ties go to the lowest index. NaN yields nullopt.
template <typename Derived>
std::optional<Eigen::Index> argmax_lowest(const Eigen::DenseBase<Derived>& row) {
  Eigen::Index best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    const double v = static_cast<double>(row(i));
    if (std::isnan(v)) return std::nullopt;
    if (v > best_val || i == 0) {
      best = i;
      best_val = v;
    }
  }
  return best;
}

namespace detail {
ProbDist normalize_impl(Eigen::VectorXd p);
}  // namespace detail

/// p / sum(p), accumulated in double precision whatever the input scalar.
/// Inputs already normalized to rounding error are returned unchanged, which
/// makes normalize idempotent bit-for-bit.
/// Throws kDegenerateDistribution for negative, non-finite, or all-zero input.
template <typename Derived>
ProbDist normalize(const Eigen::MatrixBase<Derived>& p) {
  return detail::normalize_impl(p.template cast<double>().eval());
}

inline ProbDist normalize(const ProbDist& p) {
  return detail::normalize_impl(p.values());
}

/// Per-frame CTC posteriors stored as probabilities (T x |V|, row-major).
class LogitMatrix {
 public:
  using Matrix =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  LogitMatrix() = default;

  /// Rows are non-negative masses; each is normalized.
  template <typename Derived>
  static LogitMatrix from_probs(const Eigen::MatrixBase<Derived>& probs) {
    return from_probs_impl(probs.template cast<double>().eval());
  }

  /// Rows are log-probabilities (or unnormalized logits); each is
  /// exponentiated with a max shift and normalized.
  template <typename Derived>
  static LogitMatrix from_logprobs(const Eigen::MatrixBase<Derived>& logprobs) {
    return from_logprobs_impl(logprobs.template cast<double>().eval());
  }

  Eigen::Index frames() const { return probs_.rows(); }
  Eigen::Index vocab_size() const { return probs_.cols(); }
  const Matrix& probs() const { return probs_; }
  ProbDist row(Eigen::Index frame) const;

 private:
  static LogitMatrix from_probs_impl(Matrix m);
  static LogitMatrix from_logprobs_impl(Matrix m);
  Matrix probs_;
};

}  // namespace gknn
