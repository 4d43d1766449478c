// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#include "gknn/ctc_decode.hpp"

namespace gknn {

std::vector<TokenId> greedy_collapse(std::span<const TokenId> frame_argmax) {
  std::vector<TokenId> out;
  bool have_prev = false;
  TokenId prev = kBlankId;
  for (TokenId id : frame_argmax) {
    if (id != kBlankId && (!have_prev || id != prev)) out.push_back(id);
    prev = id;
    have_prev = true;
  }
  return out;
}

std::string render_tokens(std::span<const TokenId> ids, const Vocabulary& vocab) {
  std::string text;
  for (TokenId id : ids) {
    if (!text.empty()) text.push_back(' ');
    text += vocab.token(id);
  }
  return text;
}

Hypothesis greedy_decode(std::span<const ProbDist> dists, const Vocabulary& vocab) {
  std::vector<TokenId> best;
  best.reserve(dists.size());
  for (const ProbDist& d : dists) {
    if (static_cast<std::size_t>(d.size()) != vocab.size()) {
      throw Error(ErrorKind::kShape, "frame distribution size differs from the vocabulary");
    }
    best.push_back(d.argmax());
  }
  Hypothesis h;
  h.token_ids = greedy_collapse(best);
  h.text = render_tokens(h.token_ids, vocab);
  return h;
}

}  // namespace gknn
