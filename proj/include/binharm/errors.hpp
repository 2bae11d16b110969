// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace binharm {

// Bad input: invalid parameters, malformed files, out-of-contract calls.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A well-formed computation that could not complete (track out of bounds,
// unreachable calibration target, I/O failure).
class RuntimeError : public std::runtime_error {
 public:
  explicit RuntimeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace binharm
