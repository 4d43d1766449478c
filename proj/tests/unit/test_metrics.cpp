// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <json.hpp>

#include "gknn/error.hpp"
#include "gknn/metrics.hpp"

using namespace gknn;

TEST_CASE("tokenize_mixed") {
  const MixedTokenSeq a = tokenize_mixed("我like猫");
  REQUIRE(a.size() == 3);
  CHECK(a[0] == MixedUnit{"我", Lang::kCN});
  CHECK(a[1] == MixedUnit{"like", Lang::kEN});
  CHECK(a[2] == MixedUnit{"猫", Lang::kCN});

  const MixedTokenSeq b = tokenize_mixed("hello world");
  REQUIRE(b.size() == 2);
  CHECK(b[1] == MixedUnit{"world", Lang::kEN});

  CHECK(tokenize_mixed("").empty());
  CHECK(tokenize_mixed(" \t　 ").empty());
  CHECK(render_units(tokenize_mixed("我们 like　it")) == "我 们 like it");
}

TEST_CASE("tokenize_mixed normalizes to NFC") {
  // "e" + combining acute vs precomposed U+00E9.
  CHECK(tokenize_mixed("cafe\xcc\x81") == tokenize_mixed("caf\xc3\xa9"));
}

TEST_CASE("mer examples") {
  const EvalReport same = mer(tokenize_mixed("我 like 猫"), tokenize_mixed("我 like 猫"));
  CHECK(same.mer == 0.0);

  const EvalReport sub = mer(tokenize_mixed("我 like 猫"), tokenize_mixed("我 like 狗"));
  CHECK(sub.counts.cn.subs == 1);
  CHECK(sub.counts.errors() == 1);
  CHECK(sub.mer == doctest::Approx(100.0 / 3.0));
  CHECK(*sub.cer_cn == doctest::Approx(50.0));
  CHECK(*sub.wer_en == 0.0);

  const EvalReport ins = mer(tokenize_mixed("我"), tokenize_mixed("我 cat"));
  CHECK(ins.counts.en.ins == 1);
  CHECK(ins.counts.cn.errors() == 0);
  CHECK(ins.mer == 100.0);
  CHECK_FALSE(ins.wer_en.has_value());
  CHECK(*ins.cer_cn == 0.0);
}

TEST_CASE("deletions are attributed to the reference language") {
  const ErrorCounts c = align_errors(tokenize_mixed("我 like 猫"), tokenize_mixed("我 猫"));
  CHECK(c.en.dels == 1);
  CHECK(c.errors() == 1);
  CHECK(c.cn.ref_units == 2);
  CHECK(c.en.ref_units == 1);
}

TEST_CASE("undefined rates") {
  CHECK(mer({}, {}).mer == 0.0);
  try {
    mer({}, tokenize_mixed("cat"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUndefinedRate);
  }
}

TEST_CASE("report serialization") {
  ErrorCounts c;
  c.cn = {1, 0, 0, 2};
  c.en = {0, 0, 1, 0};
  const EvalReport r = EvalReport::from_counts(c, 0.5);
  const auto j = nlohmann::ordered_json::parse(r.to_json());
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"mer", "cer_cn", "wer_en", "subs_cn", "dels_cn",
                                         "ins_cn", "subs_en", "dels_en", "ins_en", "rtf"});
  CHECK(j["mer"] == 100.0);
  CHECK(j["wer_en"].is_null());
  CHECK(j["rtf"] == 0.5);
  CHECK(r.to_text().find("wer_en=undefined") != std::string::npos);
}

TEST_CASE("rtf") {
  CHECK(rtf(1.39, 100.0) == doctest::Approx(0.0139));
  CHECK(rtf(0.0, 10.0) == 0.0);
  CHECK(rtf(5.0, 2.5) == 2.0);
  try {
    rtf(1.0, 0.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidDuration);
  }
}
