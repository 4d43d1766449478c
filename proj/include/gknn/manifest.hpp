// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gknn {

/// One JSON Lines record:
///   {"id", "embeddings", "logits", "reference", "lang_frames": [0|1, ...]}
/// Tensor paths are stored relative to the manifest's directory.
struct ManifestEntry {
  std::string id;
  std::filesystem::path embeddings;
  std::filesystem::path logits;
  std::string reference;
  /// 0 = CN, 1 = EN per frame; absent when ground truth is unknown.
  std::optional<std::vector<std::uint8_t>> lang_frames;
};

/// Relative tensor paths come back resolved against the manifest directory.
/// Throws kFormat on malformed lines or duplicate ids.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries);

}  // namespace gknn
