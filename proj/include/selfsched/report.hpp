//===-- report.hpp - Execution traces and imbalance metrics --------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// The evidence layer: per-chunk traces from one loop execution, coverage
/// verification, load-balance statistics, and CSV/JSON serialization.
/// Times are virtual ticks in simulation and nanoseconds in real mode,
/// flagged by the report's `mode` field.
///
//===----------------------------------------------------------------------===//

#pragma once

#include "selfsched/loop.hpp"
#include "selfsched/scheduler.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace selfsched {

struct ChunkLogEntry {
  std::uint64_t seq = 0;
  int thread = 0;
  Index first = 0;
  Index size = 0;
  double t_begin = 0.0;
  double t_end = 0.0;

  bool operator==(const ChunkLogEntry &) const = default;
};

/// Full trace of one parallel loop execution.
struct ExecutionReport {
  std::vector<ChunkLogEntry> chunk_log; // sorted by seq
  std::vector<double> thread_finish;    // max t_end per thread, 0 if no chunk
  int team_size = 0;
  LoopDescriptor loop;
  StrategyInfo strategy;
  std::string mode; // "sim" | "real"
  std::optional<std::string> error;

  bool operator==(const ExecutionReport &) const = default;
};

struct CoverageResult {
  bool ok = true;
  std::string detail; // names the first duplicated or missing index
};

/// Expands all chunks and checks the multiset of covered iterations equals
/// {0..N-1} exactly once.
CoverageResult verify_coverage(const ExecutionReport &report,
                               const LoopDescriptor &loop);

struct ImbalanceMetrics {
  double makespan = 0.0;
  double mean_finish = 0.0;
  double percent_imbalance = 0.0; // (makespan/mean - 1) * 100
  double cov = 0.0;               // population stddev / mean of finish times
  std::uint64_t total_chunks = 0;
};

/// Load-balance statistics over all team threads. An empty loop reports
/// zeros by convention.
ImbalanceMetrics imbalance_metrics(const ExecutionReport &report);

/// Chunk sizes in dequeue (seq) order.
std::vector<Index> chunk_size_sequence(const ExecutionReport &report);

/// CSV with exactly the columns seq,thread,first,size,t_begin,t_end and a
/// header row. Times print in shortest round-trip form, so sim-mode
/// integer ticks stay integers.
void export_csv(const ExecutionReport &report, std::ostream &out);

/// JSON mirroring the report fields; import_json is its exact inverse.
void export_json(const ExecutionReport &report, std::ostream &out);
ExecutionReport import_json(std::istream &in);
ExecutionReport report_from_json_text(const std::string &text);

/// Writes the report to `path` in the given format ("csv" | "json").
void export_report(const ExecutionReport &report, const std::string &format,
                   const std::string &path);

/// Shortest round-trip decimal form of a double ("25" for 25.0).
std::string format_time(double value);

} // namespace selfsched
