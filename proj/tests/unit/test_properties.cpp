// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

// Randomized invariants not already covered by the acceptance suite.

#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "gknn/ctc_decode.hpp"
#include "gknn/gated_fusion.hpp"
#include "gknn/metrics.hpp"
#include "gknn/rng.hpp"

using namespace gknn;

namespace {

constexpr int kCases = 1000;

const Vocabulary& vocab() {
  static const Vocabulary v({"<blk>", "我", "猫", "狗", "like", "cat", "dog"});
  return v;
}

ProbDist random_dist(CounterRng& rng, Eigen::Index n) {
  Eigen::VectorXd p(n);
  for (auto& x : p) x = rng.bernoulli(0.1) ? 0.0 : rng.uniform(0.0, 1.0);
  p[static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)))] += 0.01;
  return normalize(p);
}

NeighborSet random_neighbors(CounterRng& rng) {
  NeighborSet ns;
  const auto n = static_cast<std::size_t>(rng.between(1, 30));
  for (std::size_t i = 0; i < n; ++i) {
    ns.entries.push_back({i, rng.uniform(0.0, 50.0), static_cast<TokenId>(rng.below(7))});
  }
  std::sort(ns.entries.begin(), ns.entries.end(),
            [](const Neighbor& a, const Neighbor& b) { return a.distance < b.distance; });
  ns.k_requested = n;
  return ns;
}

}  // namespace

TEST_CASE("gate agrees with a brute-force mean") {
  CounterRng rng(1);
  for (int c = 0; c < kCases; ++c) {
    const NeighborSet cn = random_neighbors(rng);
    const NeighborSet en = random_neighbors(rng);
    const auto n = static_cast<std::size_t>(rng.between(1, 40));
    auto oracle = [n](const NeighborSet& ns) {
      std::vector<double> d;
      for (const auto& e : ns.entries) d.push_back(e.distance);
      std::sort(d.begin(), d.end());
      d.resize(std::min(n, d.size()));
      return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    };
    const GateDecision g = gate(cn, en, n);
    CHECK(g.d_cn == oracle(cn));
    CHECK(g.d_en == oracle(en));
    CHECK((g.lang == Lang::kCN) == (g.d_cn <= g.d_en));
  }
}

TEST_CASE("interpolating a distribution with itself is the identity") {
  CounterRng rng(2);
  for (int c = 0; c < kCases; ++c) {
    const ProbDist p = random_dist(rng, 7);
    const ProbDist q = interpolate(p, p, rng.uniform());
    CHECK((q.values() - p.values()).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("scale_alternate preserves order within groups and moves mass") {
  CounterRng rng(3);
  for (int c = 0; c < kCases; ++c) {
    const ProbDist p = random_dist(rng, 7);
    const Lang sel = rng.bernoulli(0.5) ? Lang::kCN : Lang::kEN;
    const double t = rng.uniform(1.0001, 500.0);
    const ProbDist s = scale_alternate(p, sel, vocab(), t);
    const Eigen::ArrayXd& alt = vocab().language_mask(other(sel));
    const double alt_mass = (p.values().array() * alt).sum();
    for (Eigen::Index i = 0; i < 7; ++i) {
      for (Eigen::Index j = 0; j < 7; ++j) {
        if (alt[i] == alt[j] && p[i] < p[j]) CHECK(s[i] <= s[j]);
      }
      if (alt_mass > 0.0 && alt_mass < 1.0 && p[i] > 0.0) {
        if (alt[i] > 0.0) {
          CHECK(s[i] < p[i]);
        } else {
          CHECK(s[i] > p[i]);
        }
      }
    }
  }
}

TEST_CASE("frames are decoded independently") {
  CounterRng rng(4);
  FloatMatrix cn(20, 3);
  FloatMatrix en(20, 3);
  std::vector<TokenId> cn_v(20);
  std::vector<TokenId> en_v(20);
  for (Eigen::Index i = 0; i < 20; ++i) {
    for (Eigen::Index d = 0; d < 3; ++d) {
      cn(i, d) = static_cast<float>(rng.normal());
      en(i, d) = static_cast<float>(rng.normal() + 1.0);
    }
    cn_v[static_cast<std::size_t>(i)] = static_cast<TokenId>(rng.below(4));
    en_v[static_cast<std::size_t>(i)] = rng.bernoulli(0.3) ? 0 : static_cast<TokenId>(4 + rng.below(3));
  }
  for (auto& v : cn_v) {
    if (v > 3) v = 0;
  }
  DecodeStores stores;
  stores.cn = std::make_shared<const KnnIndex>(Datastore(StoreLang::kCN, cn, cn_v));
  stores.en = std::make_shared<const KnnIndex>(Datastore(StoreLang::kEN, en, en_v));
  FusionConfig cfg;
  cfg.k = 8;
  cfg.n = 3;
  cfg.t = 5.0;

  FloatMatrix emb(12, 3);
  Eigen::MatrixXd probs(12, 7);
  for (Eigen::Index i = 0; i < 12; ++i) {
    for (Eigen::Index d = 0; d < 3; ++d) emb(i, d) = static_cast<float>(rng.normal() + 0.5);
    probs.row(i) = random_dist(rng, 7).values().transpose();
  }
  const UtteranceDecode base = decode_utterance(emb, LogitMatrix::from_probs(probs), stores, vocab(), cfg);

  std::vector<Eigen::Index> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size() - 1; i > 0; --i) {
    std::swap(perm[i], perm[static_cast<std::size_t>(rng.below(i + 1))]);
  }
  FloatMatrix emb_p(12, 3);
  Eigen::MatrixXd probs_p(12, 7);
  for (Eigen::Index i = 0; i < 12; ++i) {
    emb_p.row(i) = emb.row(perm[static_cast<std::size_t>(i)]);
    probs_p.row(i) = probs.row(perm[static_cast<std::size_t>(i)]);
  }
  const UtteranceDecode shuffled =
      decode_utterance(emb_p, LogitMatrix::from_probs(probs_p), stores, vocab(), cfg);
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(shuffled.dists[i] == base.dists[static_cast<std::size_t>(perm[i])]);
  }
}

TEST_CASE("edit distance is symmetric and insertions balance length") {
  CounterRng rng(5);
  const char* units[] = {"我", "猫", "like", "cat"};
  for (int c = 0; c < kCases; ++c) {
    MixedTokenSeq a;
    MixedTokenSeq b;
    for (auto* s : {&a, &b}) {
      const auto n = rng.below(8);
      for (std::uint64_t i = 0; i < n; ++i) {
        const auto u = rng.below(4);
        s->push_back({units[u], u < 2 ? Lang::kCN : Lang::kEN});
      }
    }
    const ErrorCounts ab = align_errors(a, b);
    const ErrorCounts ba = align_errors(b, a);
    CHECK(ab.errors() == ba.errors());
    const auto ins = static_cast<long>(ab.cn.ins + ab.en.ins);
    const auto dels = static_cast<long>(ab.cn.dels + ab.en.dels);
    CHECK(ins - dels == static_cast<long>(b.size()) - static_cast<long>(a.size()));
  }
}

TEST_CASE("scaled argmax matches the unnormalized division") {
  CounterRng rng(6);
  for (int c = 0; c < kCases; ++c) {
    const ProbDist p = random_dist(rng, 7);
    const Lang sel = rng.bernoulli(0.5) ? Lang::kCN : Lang::kEN;
    const double t = rng.uniform(1.0, 300.0);
    Eigen::VectorXd raw = p.values();
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
      if (vocab().language_mask(other(sel))[i] > 0.0) raw[i] /= t;
    }
    CHECK(scale_alternate(p, sel, vocab(), t).argmax() == *argmax_lowest(raw));
  }
}

TEST_CASE("greedy decode matches a one-pass reference") {
  CounterRng rng(7);
  const Vocabulary& v = vocab();
  for (int c = 0; c < kCases; ++c) {
    std::vector<ProbDist> frames;
    const auto n = rng.below(25);
    for (std::uint64_t i = 0; i < n; ++i) frames.push_back(random_dist(rng, 7));
    const Hypothesis h = greedy_decode(frames, v);

    std::vector<TokenId> expect;
    std::optional<TokenId> last;
    for (const auto& f : frames) {
      const TokenId best = f.argmax();
      if (best != kBlankId && best != last) expect.push_back(best);
      last = best;
    }
    CHECK(h.token_ids == expect);
    CHECK(h.token_ids.size() <= frames.size());
    CHECK(std::find(h.token_ids.begin(), h.token_ids.end(), kBlankId) == h.token_ids.end());

    // An extra blank between two different tokens changes nothing.
    for (std::size_t i = 1; i < frames.size(); ++i) {
      if (frames[i - 1].argmax() != frames[i].argmax() && frames[i - 1].argmax() != kBlankId &&
          frames[i].argmax() != kBlankId) {
        auto padded = frames;
        padded.insert(padded.begin() + static_cast<std::ptrdiff_t>(i),
                      ProbDist::from_normalized(Eigen::VectorXd::Unit(7, 0)));
        CHECK(greedy_decode(padded, v).token_ids == h.token_ids);
        break;
      }
    }
  }
}

TEST_CASE("tokenize after render is idempotent") {
  CounterRng rng(8);
  const char* pieces[] = {"我", "猫", "like", "cat", " ", "　", "\t", "ok猫", "x"};
  for (int c = 0; c < kCases; ++c) {
    std::string text;
    const auto n = rng.below(12);
    for (std::uint64_t i = 0; i < n; ++i) text += pieces[rng.below(9)];
    const MixedTokenSeq once = tokenize_mixed(text);
    CHECK(tokenize_mixed(render_units(once)) == once);
    for (const auto& u : once) {
      CHECK(u.text.find(' ') == std::string::npos);
      CHECK((u.lang == Lang::kCN) == (classify_token(u.text) == TokenClass::kCN));
    }
  }
}
