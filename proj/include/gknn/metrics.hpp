// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gknn/core_types.hpp"

namespace gknn {

/// A single Chinese character (CN) or a whitespace-free non-CJK word (EN).
struct MixedUnit {
  std::string text;
  Lang lang = Lang::kEN;

  bool operator==(const MixedUnit&) const = default;
};

using MixedTokenSeq = std::vector<MixedUnit>;

/// NFC-normalizes, then splits: every CJK codepoint is its own CN unit, every
/// maximal run of other non-whitespace codepoints is an EN unit.
MixedTokenSeq tokenize_mixed(std::string_view text);

/// Units joined by single spaces.
std::string render_units(const MixedTokenSeq& units);

struct LangCounts {
  std::size_t subs = 0;
  std::size_t dels = 0;
  std::size_t ins = 0;
  std::size_t ref_units = 0;

  std::size_t errors() const { return subs + dels + ins; }
  LangCounts& operator+=(const LangCounts& o);
  bool operator==(const LangCounts&) const = default;
};

/// Edit operations split by language. Substitutions and deletions belong to
/// the reference unit's language, insertions to the hypothesis unit's.
struct ErrorCounts {
  LangCounts cn;
  LangCounts en;

  std::size_t errors() const { return cn.errors() + en.errors(); }
  std::size_t ref_units() const { return cn.ref_units + en.ref_units; }
  ErrorCounts& operator+=(const ErrorCounts& o);
  bool operator==(const ErrorCounts&) const = default;
};

/// Unit-cost Levenshtein alignment. Among minimal alignments the backtrace
/// prefers match, then substitution, deletion, insertion.
ErrorCounts align_errors(const MixedTokenSeq& ref, const MixedTokenSeq& hyp);

struct EvalReport {
  double mer = 0.0;
  /// Empty when the language has errors but no reference units.
  std::optional<double> cer_cn;
  std::optional<double> wer_en;
  ErrorCounts counts;
  std::optional<double> rtf;

  /// Rates in percent. Throws kUndefinedRate when there are no reference
  /// units but there are errors.
  static EvalReport from_counts(const ErrorCounts& counts,
                                std::optional<double> rtf = std::nullopt);

  /// Keys: mer, cer_cn, wer_en, subs_cn, dels_cn, ins_cn, subs_en, dels_en,
  /// ins_en, rtf. Undefined values are null.
  std::string to_json() const;
  /// Same keys, one "key=value" per line.
  std::string to_text() const;
};

EvalReport mer(const MixedTokenSeq& ref, const MixedTokenSeq& hyp);

/// processing / audio. Throws kInvalidDuration unless audio_seconds > 0.
double rtf(double processing_seconds, double audio_seconds);

}  // namespace gknn
