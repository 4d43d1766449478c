// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "gknn/ctc_decode.hpp"
#include "gknn/error.hpp"

using namespace gknn;

namespace {

const Vocabulary& ab() {
  static const Vocabulary v({"<blk>", "a", "b"});
  return v;
}

std::vector<ProbDist> frames(const std::vector<TokenId>& ids) {
  std::vector<ProbDist> out;
  for (TokenId id : ids) {
    Eigen::Vector3d p = Eigen::Vector3d::Constant(0.1);
    p[id] = 0.8;
    out.push_back(ProbDist::from_normalized(p));
  }
  return out;
}

}  // namespace

TEST_CASE("greedy collapse") {
  constexpr TokenId blk = 0, a = 1, b = 2;
  CHECK(greedy_decode(frames({blk, a, a, blk, b}), ab()).text == "a b");
  CHECK(greedy_decode(frames({a, a, b, b}), ab()).text == "a b");
  CHECK(greedy_decode(frames({a, blk, a}), ab()).text == "a a");
  CHECK(greedy_decode(frames({blk, blk}), ab()).text.empty());
  CHECK(greedy_decode(frames({}), ab()).token_ids.empty());
  CHECK(greedy_collapse(std::vector<TokenId>{b, b, blk, b, a}) == std::vector<TokenId>{b, b, a});
}

TEST_CASE("argmax ties in decoding use the lowest id") {
  const ProbDist tie = ProbDist::from_normalized(Eigen::Vector3d(0.2, 0.4, 0.4));
  CHECK(greedy_decode(std::vector<ProbDist>{tie}, ab()).token_ids == std::vector<TokenId>{1});
}

TEST_CASE("mixed tokens are joined by spaces") {
  const Vocabulary v({"<blk>", "我", "like", "猫"});
  CHECK(render_tokens(std::vector<TokenId>{1, 2, 3}, v) == "我 like 猫");
}

TEST_CASE("distribution size must match the vocabulary") {
  const ProbDist two = ProbDist::from_normalized(Eigen::Vector2d(0.5, 0.5));
  CHECK_THROWS_AS(greedy_decode(std::vector<ProbDist>{two}, ab()), Error);
}
