//===-- loop.hpp - Iteration space model --------------------------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// Describes a strided parallel loop and the chunks a scheduler hands out.
/// Strategies never see raw strided bounds: the space is canonicalized onto
/// logical iterations 0..N-1 once, and mapped back only when a loop body (or
/// a trace reader) needs source indices.
///
//===----------------------------------------------------------------------===//

#pragma once

#include "selfsched/errors.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace selfsched {

using Index = std::int64_t;

/// A parallel loop as seen by the runtime.
///
/// `upper` is exclusive. `stride` may be negative; it must not be zero.
/// `chunk_param` is the grouping parameter handed to strategies that take
/// one; it is not the canonical chunk size of any particular schedule.
/// `site_id` identifies the loop call site across invocations and keys the
/// cross-invocation history store.
struct LoopDescriptor {
  Index lower = 0;
  Index upper = 0;
  Index stride = 1;
  Index chunk_param = 1;
  std::string site_id = "anonymous";

  /// Number of logical iterations; computable up front for any valid loop.
  Index iteration_count() const;

  /// Throws ConfigError on stride == 0 or chunk_param < 1.
  void validate() const;

  bool operator==(const LoopDescriptor &) const = default;
};

/// A contiguous block of logical iterations handed to one thread by a
/// single dequeue. `first` and `size` live in the canonical 0..N-1 space;
/// `seq` is the global dequeue sequence number stamped by the strategy.
struct Chunk {
  Index first = 0;
  Index size = 0;
  std::uint64_t seq = 0;

  bool operator==(const Chunk &) const = default;
};

/// Result of normalizing a strided space: logical iteration k in [0, count)
/// corresponds to source index origin + k*stride.
struct CanonicalLoop {
  Index count = 0;
  Index origin = 0;
  Index stride = 1;

  Index source_index(Index k) const { return origin + k * stride; }
};

/// Normalizes (lower, upper, stride) onto 0..N-1. Empty loops yield
/// count == 0. Throws ConfigError when stride == 0.
CanonicalLoop canonicalize(Index lower, Index upper, Index stride);

/// Expands a chunk back to the source indices its body iterations touch,
/// in execution order. Throws ContractViolation when the chunk falls
/// outside the loop's iteration space.
std::vector<Index> chunk_to_source_indices(const Chunk &chunk,
                                           const LoopDescriptor &loop);

/// Ceiling division for nonnegative numerator, positive denominator.
constexpr Index ceil_div(Index num, Index den) {
  return (num + den - 1) / den;
}

} // namespace selfsched
