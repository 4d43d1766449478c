// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#include "gknn/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gknn/manifest.hpp"
#include "gknn/rng.hpp"

namespace gknn {
namespace {

constexpr std::string_view kCommonHanzi =
    "的一是不了人我在有他这中大来上国个到说们为子和你地出道也时年得就那要下以生会"
    "自着去之过家学对可里后小么心多天而能好都然没日于起还发成事只作当想看文无开手十"
    "用主行方又如前所本见经头面公同三已老从动两长";

constexpr std::array<std::string_view, 48> kEnglishWords = {
    "love",   "story",  "study", "environment", "hello",  "world",  "music",
    "movie",  "phone",  "coffee", "email",      "party",  "game",   "weekend",
    "office", "video",  "online", "design",     "project", "meeting", "ticket",
    "hotel",  "taxi",   "menu",  "shopping",    "friend", "happy",  "sorry",
    "okay",   "cool",   "nice",  "team",        "class",  "exam",   "course",
    "paper",  "report", "deadline", "boss",     "salary", "iphone", "app",
    "wifi",   "model",  "style", "brand",       "fashion", "campus"};

// Stream tags for CounterRng::substream.
constexpr std::uint64_t kGeometryStream = 1;
constexpr std::uint64_t kTrainCnStream = 2;
constexpr std::uint64_t kTrainEnStream = 3;
constexpr std::uint64_t kTestStream = 4;

struct Geometry {
  Eigen::MatrixXd centroids;  // vocab x dim, row 0 = blank
};

Eigen::VectorXd gaussian_vector(CounterRng& rng, int dim, double scale) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = scale * rng.normal();
  return v;
}

Geometry make_geometry(const SynthSpec& spec) {
  CounterRng rng = CounterRng(spec.seed).substream(kGeometryStream);
  const int vocab = 1 + spec.vocab_cn + spec.vocab_en;
  // E||a - b||^2 = 2 * dim * scale^2 for independent N(0, scale^2 I) draws.
  const double anchor_scale = spec.anchor_sep / std::sqrt(2.0 * spec.dim);

  Eigen::VectorXd lang_dir = gaussian_vector(rng, spec.dim, 1.0);
  lang_dir.normalize();
  const Eigen::VectorXd cn_shift = 0.5 * spec.cluster_sep * lang_dir;

  Geometry g;
  g.centroids.resize(vocab, spec.dim);
  g.centroids.row(0) = gaussian_vector(rng, spec.dim, anchor_scale).transpose();
  std::vector<Eigen::VectorXd> cn_anchor(spec.vocab_cn);
  for (int i = 0; i < spec.vocab_cn; ++i) {
    cn_anchor[i] = gaussian_vector(rng, spec.dim, anchor_scale);
    g.centroids.row(1 + i) = (cn_anchor[i] + cn_shift).transpose();
  }
  for (int j = 0; j < spec.vocab_en; ++j) {
    const Eigen::VectorXd anchor =
        j < spec.vocab_cn ? cn_anchor[j] : gaussian_vector(rng, spec.dim, anchor_scale);
    g.centroids.row(1 + spec.vocab_cn + j) = (anchor - cn_shift).transpose();
  }
  return g;
}

TokenId random_token(CounterRng& rng, const SynthSpec& spec, Lang lang) {
  if (lang == Lang::kCN) return 1 + static_cast<TokenId>(rng.below(spec.vocab_cn));
  return 1 + spec.vocab_cn + static_cast<TokenId>(rng.below(spec.vocab_en));
}

Lang lang_of(const SynthSpec& spec, TokenId id) {
  return id <= static_cast<TokenId>(spec.vocab_cn) ? Lang::kCN : Lang::kEN;
}

SynthUtterance render_utterance(const SynthSpec& spec, const Geometry& geo,
                                const Vocabulary& vocab, CounterRng& rng,
                                const std::vector<TokenId>& tokens, bool train,
                                std::string id) {
  const RealRange leak_range = train ? spec.train_leak : spec.test_leak;
  std::vector<TokenId> frame_tokens;
  std::vector<std::uint8_t> lang_frames;
  std::vector<double> leaks;  // 0 for frames that are not confused
  auto add_blanks = [&](Lang context) {
    const int b = static_cast<int>(rng.between(spec.blank_frames.first, spec.blank_frames.second));
    for (int f = 0; f < b; ++f) {
      frame_tokens.push_back(kBlankId);
      lang_frames.push_back(static_cast<std::uint8_t>(context));
      leaks.push_back(0.0);
    }
  };
  add_blanks(lang_of(spec, tokens.front()));
  for (TokenId tok : tokens) {
    const Lang l = lang_of(spec, tok);
    const int f = static_cast<int>(
        rng.between(spec.frames_per_token.first, spec.frames_per_token.second));
    // Confusion covers the whole token span with one leak fraction.
    const double leak = rng.bernoulli(spec.confusion_rate)
                            ? rng.uniform(leak_range.first, leak_range.second)
                            : 0.0;
    for (int i = 0; i < f; ++i) {
      frame_tokens.push_back(tok);
      lang_frames.push_back(static_cast<std::uint8_t>(l));
      leaks.push_back(leak);
    }
    add_blanks(l);
  }

  const auto frames = static_cast<Eigen::Index>(frame_tokens.size());
  const auto v = static_cast<Eigen::Index>(vocab.size());
  SynthUtterance u;
  u.id = std::move(id);
  u.embeddings.resize(frames, spec.dim);
  u.posteriors.resize(frames, v);
  for (Eigen::Index t = 0; t < frames; ++t) {
    const TokenId tok = frame_tokens[static_cast<std::size_t>(t)];
    for (int d = 0; d < spec.dim; ++d) {
      u.embeddings(t, d) =
          static_cast<float>(geo.centroids(tok, d) + spec.cluster_radius * rng.normal());
    }
    Eigen::VectorXd p = Eigen::VectorXd::Constant(v, spec.smoothing / static_cast<double>(v));
    const double rest = 1.0 - spec.smoothing;
    const double leak = leaks[static_cast<std::size_t>(t)];
    if (leak > 0.0) {
      p[tok] += rest * (1.0 - leak);
      p[confusable_token(spec, tok)] += rest * leak;
    } else {
      p[tok] += rest;
    }
    u.posteriors.row(t) = p.cast<float>().transpose();
  }
  std::string ref;
  for (TokenId tok : tokens) {
    if (!ref.empty()) ref.push_back(' ');
    ref += vocab.token(tok);
  }
  u.reference = std::move(ref);
  u.lang_frames = std::move(lang_frames);
  u.frame_tokens = std::move(frame_tokens);
  return u;
}

std::string utt_id(std::string_view prefix, int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d", index);
  return std::string(prefix) + buf;
}

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void SynthSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kSpec, what); };
  if (dim <= 0) fail("dim must be positive");
  if (vocab_cn <= 0 || vocab_en <= 0) fail("vocab_cn and vocab_en must be positive");
  if (!(cluster_sep > 0.0)) fail("cluster_sep must be positive");
  if (!(cluster_radius >= 0.0)) fail("cluster_radius must be non-negative");
  if (!(anchor_sep >= 0.0)) fail("anchor_sep must be non-negative");
  auto prob = [&](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) fail(std::string(name) + " must lie in [0, 1]");
  };
  prob(confusion_rate, "confusion_rate");
  prob(cs_rate, "cs_rate");
  if (!(smoothing >= 0.0 && smoothing < 1.0)) fail("smoothing must lie in [0, 1)");
  if (!(test_leak.first > 0.5 && test_leak.first <= test_leak.second && test_leak.second <= 1.0)) {
    fail("test_leak must satisfy 0.5 < lo <= hi <= 1");
  }
  if (!(train_leak.first >= 0.0 && train_leak.first <= train_leak.second &&
        train_leak.second < 0.5)) {
    fail("train_leak must satisfy 0 <= lo <= hi < 0.5");
  }
  auto range = [&](const IntRange& r, int min_lo, const char* name) {
    if (r.first < min_lo || r.second < r.first) {
      fail(std::string(name) + " must satisfy " + std::to_string(min_lo) + " <= lo <= hi");
    }
  };
  range(frames_per_token, 1, "frames_per_token");
  range(tokens_per_utterance, 1, "tokens_per_utterance");
  range(blank_frames, 1, "blank_frames");
  if (utterances < 0 || train_utterances < 0) fail("utterance counts must be >= 0");
}

SynthSpec SynthSpec::from_json(const std::string& text) {
  static const std::vector<std::string> kKeys = {
      "seed",         "dim",         "vocab_cn",         "vocab_en",
      "cluster_sep",  "cluster_radius", "anchor_sep",    "confusion_rate",
      "test_leak",    "train_leak",  "smoothing",        "frames_per_token",
      "tokens_per_utterance", "blank_frames", "cs_rate", "utterances",
      "train_utterances"};
  SynthSpec s;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw Error(ErrorKind::kSpec, "spec must be a JSON object");
    for (const auto& [key, unused] : j.items()) {
      if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
        throw Error(ErrorKind::kSpec, "unknown spec key \"" + key + "\"");
      }
    }
    read_field(j, "seed", s.seed);
    read_field(j, "dim", s.dim);
    read_field(j, "vocab_cn", s.vocab_cn);
    read_field(j, "vocab_en", s.vocab_en);
    read_field(j, "cluster_sep", s.cluster_sep);
    read_field(j, "cluster_radius", s.cluster_radius);
    read_field(j, "anchor_sep", s.anchor_sep);
    read_field(j, "confusion_rate", s.confusion_rate);
    read_field(j, "test_leak", s.test_leak);
    read_field(j, "train_leak", s.train_leak);
    read_field(j, "smoothing", s.smoothing);
    read_field(j, "frames_per_token", s.frames_per_token);
    read_field(j, "tokens_per_utterance", s.tokens_per_utterance);
    read_field(j, "blank_frames", s.blank_frames);
    read_field(j, "cs_rate", s.cs_rate);
    read_field(j, "utterances", s.utterances);
    read_field(j, "train_utterances", s.train_utterances);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kSpec, std::string("bad spec: ") + e.what());
  }
  s.validate();
  return s;
}

SynthSpec SynthSpec::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kSpec, "cannot open spec " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string SynthSpec::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["dim"] = dim;
  j["vocab_cn"] = vocab_cn;
  j["vocab_en"] = vocab_en;
  j["cluster_sep"] = cluster_sep;
  j["cluster_radius"] = cluster_radius;
  j["anchor_sep"] = anchor_sep;
  j["confusion_rate"] = confusion_rate;
  j["test_leak"] = test_leak;
  j["train_leak"] = train_leak;
  j["smoothing"] = smoothing;
  j["frames_per_token"] = frames_per_token;
  j["tokens_per_utterance"] = tokens_per_utterance;
  j["blank_frames"] = blank_frames;
  j["cs_rate"] = cs_rate;
  j["utterances"] = utterances;
  j["train_utterances"] = train_utterances;
  return j.dump(2) + "\n";
}

Vocabulary synth_vocabulary(const SynthSpec& spec) {
  std::vector<std::string> tokens{std::string(kBlankLiteral)};
  const std::u32string hanzi = decode_utf8(kCommonHanzi);
  for (int i = 0; i < spec.vocab_cn; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    tokens.push_back(idx < hanzi.size() ? encode_utf8(hanzi[idx])
                                        : encode_utf8(U'一' + static_cast<char32_t>(i)));
  }
  for (int j = 0; j < spec.vocab_en; ++j) {
    const auto idx = static_cast<std::size_t>(j);
    tokens.push_back(idx < kEnglishWords.size() ? std::string(kEnglishWords[idx])
                                                : "w" + std::to_string(j));
  }
  return Vocabulary(std::move(tokens));
}

TokenId confusable_token(const SynthSpec& spec, TokenId id) {
  const auto n_cn = static_cast<TokenId>(spec.vocab_cn);
  const auto n_en = static_cast<TokenId>(spec.vocab_en);
  if (id == kBlankId) throw Error(ErrorKind::kSpec, "blank has no confusable partner");
  if (id <= n_cn) return 1 + n_cn + (id - 1) % n_en;
  return 1 + (id - 1 - n_cn) % n_cn;
}

SynthCorpus generate(const SynthSpec& spec) {
  spec.validate();
  SynthCorpus corpus{synth_vocabulary(spec), {}, {}, {}};
  const Geometry geo = make_geometry(spec);
  const CounterRng root(spec.seed);

  auto monolingual = [&](Lang lang, std::uint64_t stream, std::string_view prefix) {
    std::vector<SynthUtterance> out;
    const CounterRng split = root.substream(stream);
    for (int u = 0; u < spec.train_utterances; ++u) {
      CounterRng rng = split.substream(static_cast<std::uint64_t>(u));
      const int n = static_cast<int>(
          rng.between(spec.tokens_per_utterance.first, spec.tokens_per_utterance.second));
      std::vector<TokenId> tokens;
      for (int i = 0; i < n; ++i) tokens.push_back(random_token(rng, spec, lang));
      out.push_back(render_utterance(spec, geo, corpus.vocab, rng, tokens, true,
                                     utt_id(prefix, u)));
    }
    return out;
  };
  corpus.train_cn = monolingual(Lang::kCN, kTrainCnStream, "train_cn_");
  corpus.train_en = monolingual(Lang::kEN, kTrainEnStream, "train_en_");

  const CounterRng test = root.substream(kTestStream);
  for (int u = 0; u < spec.utterances; ++u) {
    CounterRng rng = test.substream(static_cast<std::uint64_t>(u));
    const int n = static_cast<int>(
        rng.between(spec.tokens_per_utterance.first, spec.tokens_per_utterance.second));
    Lang lang = rng.bernoulli(0.5) ? Lang::kCN : Lang::kEN;
    std::vector<TokenId> tokens;
    for (int i = 0; i < n; ++i) {
      if (i > 0 && rng.bernoulli(spec.cs_rate)) lang = other(lang);
      tokens.push_back(random_token(rng, spec, lang));
    }
    corpus.test.push_back(
        render_utterance(spec, geo, corpus.vocab, rng, tokens, false, utt_id("test_", u)));
  }
  return corpus;
}

void write_corpus(const SynthCorpus& corpus, const SynthSpec& spec,
                  const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir / "train" / "utts", ec);
  fs::create_directories(dir / "test" / "utts", ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());

  corpus.vocab.save(dir / "vocab.txt");
  {
    std::ofstream out(dir / "spec.json", std::ios::binary | std::ios::trunc);
    out << spec.to_json();
  }

  auto write_split = [&](const fs::path& split_dir,
                         const std::vector<const SynthUtterance*>& utts) {
    std::vector<ManifestEntry> entries;
    for (const SynthUtterance* u : utts) {
      const fs::path emb = fs::path("utts") / (u->id + ".emb.tnsr");
      const fs::path log = fs::path("utts") / (u->id + ".logits.tnsr");
      write_tensor(split_dir / emb, make_tensor(TensorKind::kEmbedding, u->embeddings));
      write_tensor(split_dir / log, make_tensor(TensorKind::kProb, u->posteriors));
      entries.push_back({u->id, emb, log, u->reference, u->lang_frames});
    }
    write_manifest(split_dir / "manifest.jsonl", entries);
  };

  std::vector<const SynthUtterance*> train;
  for (const auto& u : corpus.train_cn) train.push_back(&u);
  for (const auto& u : corpus.train_en) train.push_back(&u);
  std::vector<const SynthUtterance*> test;
  for (const auto& u : corpus.test) test.push_back(&u);
  write_split(dir / "train", train);
  write_split(dir / "test", test);

  auto concat = [&](const std::vector<const SynthUtterance*>& utts, const std::string& name) {
    Eigen::Index rows = 0;
    for (const auto* u : utts) rows += u->embeddings.rows();
    FloatMatrix emb(rows, spec.dim);
    FloatMatrix post(rows, static_cast<Eigen::Index>(corpus.vocab.size()));
    Eigen::Index r = 0;
    for (const auto* u : utts) {
      emb.middleRows(r, u->embeddings.rows()) = u->embeddings;
      post.middleRows(r, u->posteriors.rows()) = u->posteriors;
      r += u->embeddings.rows();
    }
    write_tensor(dir / "train" / (name + "_embeddings.tnsr"), make_tensor(TensorKind::kEmbedding, emb));
    write_tensor(dir / "train" / (name + "_logits.tnsr"), make_tensor(TensorKind::kProb, post));
  };
  std::vector<const SynthUtterance*> cn;
  for (const auto& u : corpus.train_cn) cn.push_back(&u);
  std::vector<const SynthUtterance*> en;
  for (const auto& u : corpus.train_en) en.push_back(&u);
  concat(cn, "cn");
  concat(en, "en");
  concat(train, "all");
}

}  // namespace gknn
