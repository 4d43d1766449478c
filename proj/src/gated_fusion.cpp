// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#include "gknn/gated_fusion.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace gknn {

std::string_view to_string(DecodeMode mode) {
  switch (mode) {
    case DecodeMode::kS0: return "s0";
    case DecodeMode::kS1: return "s1";
    case DecodeMode::kS2: return "s2";
    case DecodeMode::kS3: return "s3";
  }
  return "?";
}

DecodeMode parse_decode_mode(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "s0") return DecodeMode::kS0;
  if (lower == "s1") return DecodeMode::kS1;
  if (lower == "s2") return DecodeMode::kS2;
  if (lower == "s3") return DecodeMode::kS3;
  throw Error(ErrorKind::kConfig, "unknown decode mode \"" + std::string(text) +
                                      "\" (expected s0, s1, s2 or s3)");
}

void FusionConfig::validate() const {
  if (k < 1) throw Error(ErrorKind::kConfig, "k must be >= 1");
  if (n < 1 || n > k) {
    throw Error(ErrorKind::kConfig, "n must satisfy 1 <= n <= k (n=" + std::to_string(n) +
                                        ", k=" + std::to_string(k) + ")");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorKind::kConfig, "lambda must lie in [0, 1]");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorKind::kConfig, "tau must be positive and finite");
  }
  if (!(t >= 1.0) || std::isnan(t)) throw Error(ErrorKind::kConfig, "t must be >= 1");
}

GateDecision gate(const NeighborSet& cn, const NeighborSet& en, std::size_t n) {
  if (cn.empty() || en.empty()) {
    throw Error(ErrorKind::kGateUnavailable,
                std::string("no neighbors retrieved from the ") +
                    (cn.empty() ? "CN" : "EN") + " store");
  }
  if (n == 0) throw Error(ErrorKind::kConfig, "gate needs n >= 1");
  auto top_mean = [n](const NeighborSet& ns) {
    const std::size_t m = std::min(n, ns.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += ns.entries[i].distance;
    return sum / static_cast<double>(m);
  };
  GateDecision d;
  d.d_cn = top_mean(cn);
  d.d_en = top_mean(en);
  d.lang = d.d_cn <= d.d_en ? Lang::kCN : Lang::kEN;
  return d;
}

ProbDist interpolate(const ProbDist& p_ctc, const ProbDist& p_knn, double lambda) {
  if (p_ctc.size() != p_knn.size()) {
    throw Error(ErrorKind::kShape, "interpolating distributions over " +
                                       std::to_string(p_ctc.size()) + " and " +
                                       std::to_string(p_knn.size()) + " tokens");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorKind::kConfig, "lambda must lie in [0, 1]");
  }
  return ProbDist::from_normalized(lambda * p_knn.values() +
                                   (1.0 - lambda) * p_ctc.values());
}

ProbDist scale_alternate(const ProbDist& p, Lang selected, const Vocabulary& vocab,
                         double t) {
  if (static_cast<std::size_t>(p.size()) != vocab.size()) {
    throw Error(ErrorKind::kShape, "distribution and vocabulary sizes differ");
  }
  if (!(t >= 1.0)) throw Error(ErrorKind::kConfig, "t must be >= 1");
  if (t == 1.0) return p;
  const Eigen::ArrayXd& alternate = vocab.language_mask(other(selected));
  const Eigen::ArrayXd divisor = (alternate > 0.0).select(t, Eigen::ArrayXd::Ones(p.size()));
  return normalize((p.values().array() / divisor).matrix());
}

void DecodeStores::check(DecodeMode mode) const {
  switch (mode) {
    case DecodeMode::kS0:
      return;
    case DecodeMode::kS1:
      if (!all) throw Error(ErrorKind::kConfig, "mode s1 needs the bilingual (all) store");
      return;
    case DecodeMode::kS2:
    case DecodeMode::kS3:
      if (!cn || !en) {
        throw Error(ErrorKind::kConfig, std::string("mode ") +
                                            std::string(to_string(mode)) +
                                            " needs both the cn and en stores");
      }
      return;
  }
}

FusedFrame fuse_frame(const QueryRef& query, const ProbDist& p_ctc,
                      const DecodeStores& stores, const Vocabulary& vocab,
                      const FusionConfig& cfg) {
  stores.check(cfg.mode);
  FusedFrame out{p_ctc, std::nullopt, false};
  if (cfg.mode == DecodeMode::kS0) return out;

  const std::size_t vocab_size = static_cast<std::size_t>(p_ctc.size());
  if (cfg.mode == DecodeMode::kS1) {
    if (stores.all->store().count() == 0) {
      out.fell_back = true;
      return out;
    }
    const NeighborSet ns = stores.all->search(query, cfg.k);
    out.dist = interpolate(p_ctc, knn_distribution(ns, vocab_size, cfg.tau), cfg.lambda);
    return out;
  }

  if (stores.cn->store().count() == 0 || stores.en->store().count() == 0) {
    out.fell_back = true;
    return out;
  }
  const NeighborSet ns_cn = stores.cn->search(query, cfg.k);
  const NeighborSet ns_en = stores.en->search(query, cfg.k);
  GateDecision decision;
  try {
    decision = gate(ns_cn, ns_en, cfg.n);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kGateUnavailable) throw;
    out.fell_back = true;
    return out;
  }
  out.gate = decision;
  const NeighborSet& selected = decision.lang == Lang::kCN ? ns_cn : ns_en;
  out.dist = interpolate(p_ctc, knn_distribution(selected, vocab_size, cfg.tau),
                         cfg.lambda);
  if (cfg.mode == DecodeMode::kS3) {
    out.dist = scale_alternate(out.dist, decision.lang, vocab, cfg.t);
  }
  return out;
}

UtteranceDecode decode_utterance(const FloatMatrix& embeddings,
                                 const LogitMatrix& logits,
                                 const DecodeStores& stores,
                                 const Vocabulary& vocab, const FusionConfig& cfg) {
  if (embeddings.rows() != logits.frames()) {
    throw Error(ErrorKind::kShape, "frame count mismatch: embeddings have " +
                                       std::to_string(embeddings.rows()) +
                                       " frames, logits have " +
                                       std::to_string(logits.frames()));
  }
  if (logits.frames() > 0 && static_cast<std::size_t>(logits.vocab_size()) != vocab.size()) {
    throw Error(ErrorKind::kShape, "logit columns do not match the vocabulary");
  }
  cfg.validate();
  stores.check(cfg.mode);

  UtteranceDecode out;
  out.dists.reserve(static_cast<std::size_t>(logits.frames()));
  out.gates.reserve(static_cast<std::size_t>(logits.frames()));
  for (Eigen::Index i = 0; i < logits.frames(); ++i) {
    FusedFrame f = fuse_frame(embeddings.row(i).transpose(), logits.row(i), stores,
                              vocab, cfg);
    if (f.fell_back) ++out.fallbacks;
    out.dists.push_back(std::move(f.dist));
    out.gates.push_back(f.gate);
  }
  return out;
}

}  // namespace gknn
