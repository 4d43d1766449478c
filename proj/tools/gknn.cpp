// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "gknn/cli.hpp"

int main(int argc, char** argv) { return gknn::cli::run(argc, argv, std::cout, std::cerr); }
