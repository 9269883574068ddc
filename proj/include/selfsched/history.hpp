//===-- history.hpp - Cross-invocation loop history ---------------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// Per-loop-site records that survive across invocations of the same loop.
/// Adaptive strategies read what earlier invocations stored (typically
/// per-thread weights) and write updated state from their fini hook.
///
/// Time units are whatever the executor supplies: virtual ticks in
/// simulation, nanoseconds in real mode. Strategies must not assume one.
///
//===----------------------------------------------------------------------===//

#pragma once

#include "selfsched/loop.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace selfsched {

/// Per-thread accumulators for one invocation.
struct ThreadStats {
  double busy = 0.0;
  std::uint64_t iters = 0;
  std::uint64_t chunks = 0;

  bool operator==(const ThreadStats &) const = default;
};

/// Everything the runtime remembers about one loop site.
struct LoopRecord {
  std::string site_id;
  std::uint64_t invocation_count = 0;
  std::vector<ThreadStats> thread_stats;
  /// Adaptation state carried to the next invocation; sums to team_size.
  std::vector<double> weights;
  /// Strategy-owned state surviving across invocations; not serialized.
  std::shared_ptr<void> user_blob;

  /// Zeroes thread_stats for a fresh invocation.
  void reset_stats(int team_size);

  /// Returns the stored weights, re-initializing to uniform (all 1.0)
  /// whenever the stored vector does not match team_size.
  std::vector<double> weights_or_uniform(int team_size) const;
};

/// Accumulates one finished chunk into the record. Integer counters
/// saturate instead of wrapping.
void history_record_chunk(LoopRecord &record, int thread_id,
                          const Chunk &chunk, double elapsed);

/// Stores `raw` as the record's weights, rescaled so they sum to their
/// count. Throws ConfigError if any entry is not positive.
void store_weights_normalized(LoopRecord &record, std::span<const double> raw);

/// Map from loop site to its record. Lookup of an unseen site creates a
/// fresh record with invocation_count = 0. Records live as long as the
/// store does.
class HistoryStore {
public:
  LoopRecord &at_site(const std::string &site_id);

  const std::map<std::string, LoopRecord> &records() const { return records_; }

private:
  std::map<std::string, LoopRecord> records_;
};

/// JSON per the trace schema:
///   {site_id, invocation_count, weights:[...],
///    per_thread:[{busy, iters, chunks}...]}
std::string loop_record_to_json(const LoopRecord &record);

/// JSON array of all records, ordered by site_id.
std::string history_to_json(const HistoryStore &store);

} // namespace selfsched
