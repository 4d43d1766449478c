// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#include "gknn/metrics.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

namespace gknn {
namespace {

std::string nfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw Error(ErrorKind::kIo, std::string("ICU NFC unavailable: ") + u_errorName(status));
  }
  const icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<std::int32_t>(text.size())));
  const icu::UnicodeString out = normalizer->normalize(src, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorKind::kIo, std::string("NFC failed: ") + u_errorName(status));
  }
  std::string utf8;
  out.toUTF8String(utf8);
  return utf8;
}

std::optional<double> percent(std::size_t errors, std::size_t units) {
  if (units == 0) {
    if (errors == 0) return 0.0;
    return std::nullopt;
  }
  return 100.0 * static_cast<double>(errors) / static_cast<double>(units);
}

}  // namespace

MixedTokenSeq tokenize_mixed(std::string_view text) {
  MixedTokenSeq units;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) units.push_back({std::move(word), Lang::kEN});
    word.clear();
  };
  for (char32_t cp : decode_utf8(nfc(text))) {
    if (u_isUWhiteSpace(static_cast<UChar32>(cp))) {
      flush();
    } else if (is_cjk(cp)) {
      flush();
      units.push_back({encode_utf8(cp), Lang::kCN});
    } else {
      word += encode_utf8(cp);
    }
  }
  flush();
  return units;
}

std::string render_units(const MixedTokenSeq& units) {
  std::string out;
  for (const auto& u : units) {
    if (!out.empty()) out.push_back(' ');
    out += u.text;
  }
  return out;
}

LangCounts& LangCounts::operator+=(const LangCounts& o) {
  subs += o.subs;
  dels += o.dels;
  ins += o.ins;
  ref_units += o.ref_units;
  return *this;
}

ErrorCounts& ErrorCounts::operator+=(const ErrorCounts& o) {
  cn += o.cn;
  en += o.en;
  return *this;
}

ErrorCounts align_errors(const MixedTokenSeq& ref, const MixedTokenSeq& hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  const std::size_t stride = m + 1;
  std::vector<std::size_t> cost((n + 1) * stride);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return cost[i * stride + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1].text == hyp[j - 1].text ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  ErrorCounts counts;
  auto lang_of = [&](Lang l) -> LangCounts& { return l == Lang::kCN ? counts.cn : counts.en; };
  for (const auto& u : ref) ++lang_of(u.lang).ref_units;

  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const std::size_t here = at(i, j);
    if (i > 0 && j > 0 && ref[i - 1].text == hyp[j - 1].text && here == at(i - 1, j - 1)) {
      --i;
      --j;
    } else if (i > 0 && j > 0 && here == at(i - 1, j - 1) + 1) {
      ++lang_of(ref[i - 1].lang).subs;
      --i;
      --j;
    } else if (i > 0 && here == at(i - 1, j) + 1) {
      ++lang_of(ref[i - 1].lang).dels;
      --i;
    } else {
      ++lang_of(hyp[j - 1].lang).ins;
      --j;
    }
  }
  return counts;
}

EvalReport EvalReport::from_counts(const ErrorCounts& counts, std::optional<double> rtf) {
  EvalReport r;
  const auto total = percent(counts.errors(), counts.ref_units());
  if (!total) {
    throw Error(ErrorKind::kUndefinedRate,
                "error rate undefined: empty reference with a non-empty hypothesis");
  }
  r.mer = *total;
  r.cer_cn = percent(counts.cn.errors(), counts.cn.ref_units);
  r.wer_en = percent(counts.en.errors(), counts.en.ref_units);
  r.counts = counts;
  r.rtf = rtf;
  return r;
}

std::string EvalReport::to_json() const {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::ordered_json j;
  j["mer"] = mer;
  j["cer_cn"] = opt(cer_cn);
  j["wer_en"] = opt(wer_en);
  j["subs_cn"] = counts.cn.subs;
  j["dels_cn"] = counts.cn.dels;
  j["ins_cn"] = counts.cn.ins;
  j["subs_en"] = counts.en.subs;
  j["dels_en"] = counts.en.dels;
  j["ins_en"] = counts.en.ins;
  j["rtf"] = opt(rtf);
  return j.dump();
}

std::string EvalReport::to_text() const {
  std::ostringstream out;
  auto opt = [&](const std::optional<double>& v) {
    if (v) {
      out << *v;
    } else {
      out << "undefined";
    }
  };
  out.setf(std::ios::fixed);
  out.precision(4);
  out << "mer=" << mer << '\n';
  out << "cer_cn=";
  opt(cer_cn);
  out << "\nwer_en=";
  opt(wer_en);
  out << "\nsubs_cn=" << counts.cn.subs << "\ndels_cn=" << counts.cn.dels
      << "\nins_cn=" << counts.cn.ins << "\nsubs_en=" << counts.en.subs
      << "\ndels_en=" << counts.en.dels << "\nins_en=" << counts.en.ins << "\nrtf=";
  out.precision(6);
  opt(rtf);
  out << '\n';
  return out.str();
}

EvalReport mer(const MixedTokenSeq& ref, const MixedTokenSeq& hyp) {
  return EvalReport::from_counts(align_errors(ref, hyp));
}

double rtf(double processing_seconds, double audio_seconds) {
  if (!(audio_seconds > 0.0) || !std::isfinite(audio_seconds)) {
    throw Error(ErrorKind::kInvalidDuration, "audio duration must be positive");
  }
  return processing_seconds / audio_seconds;
}

}  // namespace gknn
