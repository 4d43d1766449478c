// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gknn/core_types.hpp"
#include "gknn/tensor_io.hpp"

namespace gknn {

using IntRange = std::pair<int, int>;
using RealRange = std::pair<double, double>;

/// Parameters of the synthetic bilingual corpus.
///
/// Geometry: every CN token i owns an anchor drawn from N(0, I) scaled so
/// anchors sit about `anchor_sep` apart. EN token j shares the anchor of its
/// confusable CN token j (own anchor when j >= vocab_cn). A global language
/// direction shifts CN centroids by +cluster_sep/2 and EN centroids by
/// -cluster_sep/2, so each confusable pair is exactly `cluster_sep` apart.
/// Frames are centroid + N(0, cluster_radius^2 I). Blank has its own anchor.
///
/// Posteriors: smoothing mass spread uniformly, the rest on the true token.
/// With probability confusion_rate a frame moves a fraction `leak` of that
/// rest to the confusable token: drawn from `test_leak` for test frames
/// (leak > 0.5 flips the argmax) and from `train_leak` for the monolingual
/// training split (leak < 0.5, argmax kept).
///
/// Confusable pairs: CN i <-> EN (i mod vocab_en); EN j -> CN (j mod vocab_cn).
struct SynthSpec {
  std::uint64_t seed = 20240917;
  int dim = 32;
  int vocab_cn = 40;
  int vocab_en = 30;
  double cluster_sep = 4.0;
  double cluster_radius = 1.0;
  double anchor_sep = 12.0;
  double confusion_rate = 0.4;
  RealRange test_leak{0.55, 0.85};
  RealRange train_leak{0.05, 0.45};
  double smoothing = 0.02;
  IntRange frames_per_token{2, 4};
  IntRange tokens_per_utterance{4, 10};
  IntRange blank_frames{1, 2};
  double cs_rate = 0.3;
  int utterances = 200;
  /// Monolingual training utterances per language.
  int train_utterances = 150;

  /// Throws kSpec.
  void validate() const;

  /// Unknown keys are rejected; missing keys keep their defaults.
  static SynthSpec from_json(const std::string& text);
  static SynthSpec load(const std::filesystem::path& path);
  std::string to_json() const;
};

struct SynthUtterance {
  std::string id;
  FloatMatrix embeddings;
  /// Row-normalized posteriors, stored as a `prob` tensor.
  FloatMatrix posteriors;
  std::string reference;
  std::vector<std::uint8_t> lang_frames;
  /// Ground-truth token per frame (blank for gap frames).
  std::vector<TokenId> frame_tokens;
};

struct SynthCorpus {
  Vocabulary vocab;
  std::vector<SynthUtterance> train_cn;
  std::vector<SynthUtterance> train_en;
  std::vector<SynthUtterance> test;
};

/// Token ids: 0 blank, 1..vocab_cn CN characters, then EN words.
Vocabulary synth_vocabulary(const SynthSpec& spec);

/// Confusable partner of a non-blank token id.
TokenId confusable_token(const SynthSpec& spec, TokenId id);

/// Deterministic given the SynthSpec.
SynthCorpus generate(const SynthSpec& spec);

/// Writes:
///   vocab.txt, spec.json
///   train/{cn,en,all}_{embeddings,logits}.tnsr   concatenated per language
///   train/manifest.jsonl, test/manifest.jsonl    plus per-utterance tensors
void write_corpus(const SynthCorpus& corpus, const SynthSpec& spec,
                  const std::filesystem::path& dir);

}  // namespace gknn
