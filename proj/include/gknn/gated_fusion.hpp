// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "gknn/core_types.hpp"
#include "gknn/knn_index.hpp"
#include "gknn/tensor_io.hpp"

namespace gknn {

/// Ablation ladder:
///   S0 CTC only
///   S1 one bilingual store, lambda-interpolated
///   S2 two monolingual stores, per-frame gate picks one
///   S3 S2 plus down-scaling of the non-selected language by t
enum class DecodeMode { kS0 = 0, kS1 = 1, kS2 = 2, kS3 = 3 };

std::string_view to_string(DecodeMode mode);
/// "s0".."s3", case-insensitive. Throws kConfig.
DecodeMode parse_decode_mode(std::string_view text);

struct FusionConfig {
  std::size_t k = 1024;
  std::size_t n = 10;
  double tau = 1.0;
  double lambda = 0.25;
  double t = 200.0;
  DecodeMode mode = DecodeMode::kS3;

  /// 1 <= n <= k, 0 <= lambda <= 1, tau > 0, t >= 1. Throws kConfig.
  void validate() const;
};

struct GateDecision {
  Lang lang = Lang::kCN;
  double d_cn = 0.0;
  double d_en = 0.0;
};

/// Mean of the first min(n, |set|) distances of each (distance-sorted) set;
/// CN wins ties. Throws kGateUnavailable if either set is empty.
GateDecision gate(const NeighborSet& cn, const NeighborSet& en, std::size_t n);

/// lambda * p_knn + (1 - lambda) * p_ctc.
ProbDist interpolate(const ProbDist& p_ctc, const ProbDist& p_knn, double lambda);

/// Divides the mass of tokens in the language opposite to `selected` by t and
/// renormalizes. Blank and selected-language tokens are not scaled.
ProbDist scale_alternate(const ProbDist& p, Lang selected, const Vocabulary& vocab,
                         double t);

/// Indices over the datastores a decode mode needs. Unused slots stay null.
struct DecodeStores {
  std::shared_ptr<const KnnIndex> cn;
  std::shared_ptr<const KnnIndex> en;
  std::shared_ptr<const KnnIndex> all;

  /// Throws kConfig if `mode` needs a store that is missing.
  void check(DecodeMode mode) const;
};

struct FusedFrame {
  ProbDist dist;
  std::optional<GateDecision> gate;
  /// Set when retrieval was impossible and the frame kept P_CTC.
  bool fell_back = false;
};

FusedFrame fuse_frame(const QueryRef& query, const ProbDist& p_ctc,
                      const DecodeStores& stores, const Vocabulary& vocab,
                      const FusionConfig& cfg);

struct UtteranceDecode {
  std::vector<ProbDist> dists;
  std::vector<std::optional<GateDecision>> gates;
  std::size_t fallbacks = 0;
};

/// Frames are fused independently and returned in input order.
UtteranceDecode decode_utterance(const FloatMatrix& embeddings,
                                 const LogitMatrix& logits,
                                 const DecodeStores& stores,
                                 const Vocabulary& vocab, const FusionConfig& cfg);

}  // namespace gknn
