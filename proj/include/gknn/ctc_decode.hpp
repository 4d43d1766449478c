// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "gknn/core_types.hpp"

namespace gknn {

struct Hypothesis {
  std::vector<TokenId> token_ids;
  std::string text;
};

/// Per-frame argmax (ties to the lowest id), merge repeats, drop blanks.
std::vector<TokenId> greedy_collapse(std::span<const TokenId> frame_argmax);

/// Greedy CTC search. Text is the surviving tokens joined by single spaces.
Hypothesis greedy_decode(std::span<const ProbDist> dists, const Vocabulary& vocab);

std::string render_tokens(std::span<const TokenId> ids, const Vocabulary& vocab);

}  // namespace gknn
