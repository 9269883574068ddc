//===-- scheduler.hpp - Scheduling strategy contract ---------------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// The behavioral contract every loop scheduling strategy implements.
///
/// A strategy's life cycle within one parallel loop is:
///
///   init(loop, team_size, record)   once, all threads quiescent
///   next(thread_id)                 repeatedly, concurrently, per thread,
///                                   until it yields no chunk
///   begin_chunk / end_chunk         measurement hooks around each chunk
///   fini(record)                    once, all threads quiescent
///
/// Rules a strategy must obey:
///  - Once next() yields no chunk for a thread, every later call by that
///    thread yields no chunk.
///  - Across all threads, yielded chunks cover the iteration space exactly
///    once: no loss, no duplication.
///  - next/begin_chunk/end_chunk are called concurrently by team threads;
///    init and fini are called by the executor with no thread in flight.
///
//===----------------------------------------------------------------------===//

#pragma once

#include "selfsched/history.hpp"
#include "selfsched/loop.hpp"

#include <atomic>
#include <map>
#include <optional>
#include <string>

namespace selfsched {

/// Introspection data for traces and the CLI. `monotonic_chunks` is true
/// iff successive chunk sizes are non-increasing in dequeue order; it is
/// recorded as metadata and enforces nothing.
struct StrategyInfo {
  std::string name;
  std::map<std::string, std::string> parameters;
  bool monotonic_chunks = false;

  bool operator==(const StrategyInfo &) const = default;
};

/// Behavioral interface for loop scheduling strategies.
class Scheduler {
public:
  virtual ~Scheduler() = default;

  /// One-time setup for a loop invocation; also where a strategy plans any
  /// work distribution it fixes up front. `record` is the loop site's
  /// cross-invocation history, with thread_stats already reset.
  virtual void init(const LoopDescriptor &loop, int team_size,
                    LoopRecord &record) = 0;

  /// Hands the calling thread its next chunk, or nothing when the loop is
  /// complete for that thread. Safe for concurrent invocation.
  virtual std::optional<Chunk> next(int thread_id) = 0;

  /// Clean-up and persistence of adaptation state.
  virtual void fini(LoopRecord &record) { (void)record; }

  /// Measurement hook: the chunk is about to execute on thread_id.
  virtual void begin_chunk(int thread_id, const Chunk &chunk) {
    (void)thread_id;
    (void)chunk;
  }

  /// Measurement hook: the chunk finished after `elapsed` time units
  /// (virtual ticks in simulation, nanoseconds in real mode).
  virtual void end_chunk(int thread_id, const Chunk &chunk, double elapsed) {
    (void)thread_id;
    (void)chunk;
    (void)elapsed;
  }

  virtual StrategyInfo info() const = 0;
};

/// Shared plumbing for the built-in strategies: canonical iteration count,
/// team size, and the global dequeue sequence counter that stamps chunks.
class SchedulerBase : public Scheduler {
protected:
  /// Canonicalizes the loop and resets the sequence counter. Call first
  /// from init().
  void start(const LoopDescriptor &loop, int team_size);

  /// Builds a chunk stamped with the next sequence number. Callers that
  /// hold a dequeue lock get sequence numbers in dequeue order; lock-free
  /// strategies get the atomic's order.
  Chunk take(Index first, Index size) {
    return Chunk{first, size, seq_.fetch_add(1, std::memory_order_relaxed)};
  }

  Index total_iterations() const { return total_; }
  int team_size() const { return team_; }

private:
  Index total_ = 0;
  int team_ = 0;
  std::atomic<std::uint64_t> seq_{0};
};

} // namespace selfsched
