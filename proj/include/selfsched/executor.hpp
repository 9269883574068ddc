//===-- executor.hpp - Parallel loop execution ----------------------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// Runs a loop under a strategy, following the canonical transformed shape
/// of a scheduled parallel loop:
///
///   init(...)            once, before any worker moves
///   while (chunk = next())
///     begin_chunk; body over the chunk; end_chunk
///   fini(...)            once, after every worker is done
///
/// Two modes: real threads with wall-clock timing, and a single-threaded
/// event-driven simulation over virtual per-thread clocks that is
/// bit-reproducible for identical inputs.
///
//===----------------------------------------------------------------------===//

#pragma once

#include "selfsched/cost_model.hpp"
#include "selfsched/history.hpp"
#include "selfsched/loop.hpp"
#include "selfsched/report.hpp"
#include "selfsched/scheduler.hpp"

#include <cstdint>
#include <vector>

namespace selfsched {

enum class ExecMode { Real, Sim };

struct TeamConfig {
  int team_size = 1;
  ExecMode mode = ExecMode::Real;
  /// Per-thread speed multipliers, simulation only; empty means all 1.0.
  std::vector<double> thread_speeds;
  std::uint64_t seed = 0;
  /// Scheduling overhead charged per dequeue, simulation ticks.
  double dequeue_overhead = 0.0;

  void validate() const;
};

/// Executes the loop on a team of real threads. The strategy's init runs
/// before any worker starts (the spawn edge is the barrier) and fini after
/// all workers joined. A body exception drains the run: other threads
/// finish their current chunk, stop dequeuing, and the first error lands
/// in the report. A strategy yielding a chunk outside the iteration space
/// aborts with ContractViolation.
ExecutionReport parallel_for(const LoopDescriptor &loop, Scheduler &strategy,
                             const BodyCallback &body, const TeamConfig &team,
                             HistoryStore &history);

/// Deterministic event-driven execution: the thread with the smallest
/// virtual clock (ties to the lowest id) dequeues next; a chunk advances
/// the clock by sum(cost(i))/speed plus the per-dequeue overhead.
ExecutionReport simulate(const LoopDescriptor &loop, Scheduler &strategy,
                         const CostModel &cost_model, const TeamConfig &team,
                         HistoryStore &history);

/// Runs `count` invocations against the same loop site so history
/// accumulates; real mode uses a spin body shaped by the cost model.
/// Stops at the first failing invocation.
std::vector<ExecutionReport> run_invocations(int count,
                                             const LoopDescriptor &loop,
                                             Scheduler &strategy,
                                             const CostModel &cost_model,
                                             const TeamConfig &team,
                                             HistoryStore &history);

} // namespace selfsched
