//===-- errors.hpp - Error types ---------------------------------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#pragma once

#include <stdexcept>
#include <string>

namespace selfsched {

/// Invalid user input: unknown schedule token, malformed workload spec,
/// out-of-domain parameters. Maps to CLI exit code 1.
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string &what) : std::invalid_argument(what) {}
};

/// A scheduling-contract breach detected at run time, e.g. a strategy
/// yielding a chunk outside the iteration space. Maps to CLI exit code 2.
class ContractViolation : public std::runtime_error {
public:
  explicit ContractViolation(const std::string &what)
      : std::runtime_error(what) {}
};

} // namespace selfsched
