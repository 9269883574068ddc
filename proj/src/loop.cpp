//===-- loop.cpp - Iteration space model --------------------------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "selfsched/loop.hpp"

#include <string>

namespace selfsched {

CanonicalLoop canonicalize(Index lower, Index upper, Index stride) {
  if (stride == 0) {
    throw ConfigError("loop stride must be nonzero (lower=" +
                      std::to_string(lower) +
                      ", upper=" + std::to_string(upper) + ")");
  }
  Index count = 0;
  if (stride > 0 && lower < upper) {
    count = ceil_div(upper - lower, stride);
  } else if (stride < 0 && lower > upper) {
    count = ceil_div(lower - upper, -stride);
  }
  return CanonicalLoop{count, lower, stride};
}

Index LoopDescriptor::iteration_count() const {
  return canonicalize(lower, upper, stride).count;
}

void LoopDescriptor::validate() const {
  canonicalize(lower, upper, stride);
  if (chunk_param < 1) {
    throw ConfigError("chunk_param must be >= 1, got " +
                      std::to_string(chunk_param));
  }
}

std::vector<Index> chunk_to_source_indices(const Chunk &chunk,
                                           const LoopDescriptor &loop) {
  const CanonicalLoop canon = canonicalize(loop.lower, loop.upper, loop.stride);
  if (chunk.first < 0 || chunk.size < 1 ||
      chunk.first + chunk.size > canon.count) {
    throw ContractViolation(
        "chunk [" + std::to_string(chunk.first) + ", " +
        std::to_string(chunk.first + chunk.size) + ") outside iteration space [0, " +
        std::to_string(canon.count) + ")");
  }
  std::vector<Index> indices;
  indices.reserve(static_cast<std::size_t>(chunk.size));
  for (Index k = chunk.first; k < chunk.first + chunk.size; ++k) {
    indices.push_back(canon.source_index(k));
  }
  return indices;
}

} // namespace selfsched
