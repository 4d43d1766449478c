// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gknn {

enum class ErrorKind {
  kInvalidToken,
  kDegenerateDistribution,
  kInvalidLogits,
  kInvalidEmbedding,
  kShape,
  kLabelLanguage,
  kFormat,
  kEmptyStore,
  kEmptyNeighbors,
  kGateUnavailable,
  kConfig,
  kUndefinedRate,
  kInvalidDuration,
  kSpec,
  kIo,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed binary file. `offset` is the byte position where decoding failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(ErrorKind::kFormat,
              what + " (at byte offset " + std::to_string(offset) + ")"),
        message_(what),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& message() const noexcept { return message_; }

  FormatError with_prefix(const std::string& prefix) const {
    return FormatError(prefix + message_, offset_);
  }

 private:
  std::string message_;
  std::size_t offset_;
};

/// A monolingual store received a pseudo-label from the other language.
class LabelLanguageError : public Error {
 public:
  LabelLanguageError(const std::string& what, std::size_t frame)
      : Error(ErrorKind::kLabelLanguage, what), frame_(frame) {}

  std::size_t frame() const noexcept { return frame_; }

 private:
  std::size_t frame_;
};

}  // namespace gknn
