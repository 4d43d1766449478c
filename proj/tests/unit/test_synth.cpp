// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <map>

#include "gknn/ctc_decode.hpp"
#include "gknn/datastore.hpp"
#include "gknn/error.hpp"
#include "gknn/manifest.hpp"
#include "gknn/metrics.hpp"
#include "gknn/rng.hpp"
#include "gknn/synth.hpp"
#include "gknn/tensor_io.hpp"
#include "test_util.hpp"

using namespace gknn;

namespace {

SynthSpec small() {
  SynthSpec s;
  s.utterances = 30;
  s.train_utterances = 20;
  return s;
}

double ctc_only_mer(const SynthCorpus& c) {
  ErrorCounts counts;
  for (const auto& u : c.test) {
    const LogitMatrix l = LogitMatrix::from_probs(u.posteriors);
    std::vector<ProbDist> rows;
    for (Eigen::Index i = 0; i < l.frames(); ++i) rows.push_back(l.row(i));
    counts += align_errors(tokenize_mixed(u.reference),
                           tokenize_mixed(greedy_decode(rows, c.vocab).text));
  }
  return EvalReport::from_counts(counts).mer;
}

std::map<std::string, std::vector<std::uint8_t>> tree(const std::filesystem::path& root) {
  std::map<std::string, std::vector<std::uint8_t>> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      files[std::filesystem::relative(e.path(), root).string()] = read_file(e.path());
    }
  }
  return files;
}

}  // namespace

TEST_CASE("counter rng reference values") {
  // SplitMix64 with a zero key reproduces the published SplitMix64 stream.
  CounterRng rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
  CHECK(rng.at(0) == 0xE220A8397B1DCDAFULL);
  CHECK(CounterRng(1).substream(2).key() == CounterRng(1).substream(2).key());
  CHECK(CounterRng(1).substream(2).key() != CounterRng(1).substream(3).key());
}

TEST_CASE("counter rng ranges") {
  CounterRng rng(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const auto b = rng.between(2, 4);
    CHECK(b >= 2);
    CHECK(b <= 4);
    CHECK(rng.below(7) < 7);
    CHECK(std::isfinite(rng.normal()));
  }
}

TEST_CASE("vocabulary layout") {
  const SynthSpec s = small();
  const Vocabulary v = synth_vocabulary(s);
  CHECK(v.size() == 71);
  for (TokenId id = 1; id <= 40; ++id) CHECK(v.token_class(id) == TokenClass::kCN);
  for (TokenId id = 41; id <= 70; ++id) CHECK(v.token_class(id) == TokenClass::kEN);
  CHECK(confusable_token(s, 1) == 41);
  CHECK(confusable_token(s, 31) == 41);
  CHECK(confusable_token(s, 41) == 1);
  CHECK(confusable_token(s, 70) == 30);
}

TEST_CASE("generation is deterministic") {
  testing::TempDir dir("synth_det");
  const SynthSpec s = small();
  write_corpus(generate(s), s, dir.path() / "a");
  write_corpus(generate(s), s, dir.path() / "b");
  const auto a = tree(dir.path() / "a");
  CHECK(a.size() > 10);
  CHECK(a == tree(dir.path() / "b"));

  SynthSpec other = s;
  other.seed += 1;
  write_corpus(generate(other), other, dir.path() / "c");
  CHECK(a != tree(dir.path() / "c"));
}

TEST_CASE("corpus structure") {
  const SynthSpec s = small();
  const SynthCorpus c = generate(s);
  CHECK(c.train_cn.size() == 20);
  CHECK(c.train_en.size() == 20);
  CHECK(c.test.size() == 30);
  for (const auto& u : c.test) {
    CHECK(u.embeddings.rows() == u.posteriors.rows());
    CHECK(u.embeddings.cols() == s.dim);
    CHECK(u.lang_frames.size() == static_cast<std::size_t>(u.embeddings.rows()));
    CHECK(u.frame_tokens.front() == kBlankId);
    CHECK(u.frame_tokens.back() == kBlankId);
    CHECK(render_tokens(greedy_collapse(u.frame_tokens), c.vocab) == u.reference);
    for (std::size_t f = 0; f < u.frame_tokens.size(); ++f) {
      const TokenId tok = u.frame_tokens[f];
      if (tok != kBlankId) {
        CHECK(u.lang_frames[f] == static_cast<std::uint8_t>(c.vocab.token_class(tok)));
      }
    }
  }
}

TEST_CASE("language labels agree with the reference text") {
  const SynthCorpus c = generate(small());
  for (const auto& u : c.test) {
    const MixedTokenSeq units = tokenize_mixed(u.reference);
    CHECK(render_units(units) == u.reference);
    std::vector<Lang> from_frames;
    const auto tokens = greedy_collapse(u.frame_tokens);
    for (TokenId t : tokens) from_frames.push_back(static_cast<Lang>(c.vocab.token_class(t)));
    std::vector<Lang> from_text;
    for (const auto& unit : units) from_text.push_back(unit.lang);
    CHECK(from_frames == from_text);
  }
}

TEST_CASE("training utterances are monolingual") {
  const SynthCorpus c = generate(small());
  for (const auto* split : {&c.train_cn, &c.train_en}) {
    const Lang want = split == &c.train_cn ? Lang::kCN : Lang::kEN;
    for (const auto& u : *split) {
      for (const auto& unit : tokenize_mixed(u.reference)) CHECK(unit.lang == want);
    }
  }
}

TEST_CASE("monolingual training splits build clean stores") {
  const SynthCorpus c = generate(small());
  for (const auto& u : c.train_cn) {
    CHECK_NOTHROW(build_datastore(u.embeddings, LogitMatrix::from_probs(u.posteriors),
                                  StoreLang::kCN, c.vocab));
  }
  for (const auto& u : c.train_en) {
    CHECK_NOTHROW(build_datastore(u.embeddings, LogitMatrix::from_probs(u.posteriors),
                                  StoreLang::kEN, c.vocab));
  }
}

TEST_CASE("confusion controls CTC-only errors") {
  SynthSpec clean = small();
  clean.confusion_rate = 0.0;
  clean.cluster_sep = 20.0;
  CHECK(ctc_only_mer(generate(clean)) == 0.0);

  SynthSpec noisy = small();
  noisy.confusion_rate = 0.4;
  CHECK(ctc_only_mer(generate(noisy)) > 0.0);
}

TEST_CASE("written manifests resolve and match the corpus") {
  testing::TempDir dir("synth_manifest");
  const SynthSpec s = small();
  const SynthCorpus c = generate(s);
  write_corpus(c, s, dir.path());
  const auto test = read_manifest(dir.path() / "test" / "manifest.jsonl");
  REQUIRE(test.size() == c.test.size());
  CHECK(test[0].id == "test_0000");
  CHECK(test[0].reference == c.test[0].reference);
  CHECK(to_embeddings(read_tensor(test[0].embeddings)) == c.test[0].embeddings);
  CHECK(test[0].lang_frames == c.test[0].lang_frames);
  CHECK(Vocabulary::load(dir.path() / "vocab.txt").tokens() == c.vocab.tokens());
  CHECK(SynthSpec::load(dir.path() / "spec.json").to_json() == s.to_json());
}

TEST_CASE("spec parsing") {
  CHECK(SynthSpec::from_json("{}").to_json() == SynthSpec{}.to_json());
  const SynthSpec s = SynthSpec::from_json(R"({"dim": 8, "test_leak": [0.6, 0.7]})");
  CHECK(s.dim == 8);
  CHECK(s.test_leak == RealRange{0.6, 0.7});
  auto spec_error = [](const std::string& text) {
    try {
      SynthSpec::from_json(text);
    } catch (const Error& e) {
      return e.kind() == ErrorKind::kSpec;
    }
    return false;
  };
  CHECK(spec_error(R"({"dimension": 8})"));
  CHECK(spec_error(R"({"dim": 0})"));
  CHECK(spec_error(R"({"dim": "eight"})"));
  CHECK(spec_error(R"({"confusion_rate": 1.5})"));
  CHECK(spec_error(R"({"train_leak": [0.1, 0.6]})"));
  CHECK(spec_error(R"({"frames_per_token": [3, 2]})"));
  CHECK(spec_error("[1, 2]"));
  CHECK(spec_error("{"));
}
