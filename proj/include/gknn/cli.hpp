// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

#include "gknn/error.hpp"

namespace gknn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

/// Usage/config errors map to 2, data-validation errors to 3.
int exit_code_for(ErrorKind kind);

/// Entry point shared by the `gknn` binary and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gknn::cli
