//===-- experiment.hpp - Benchmark harness wiring -------------------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// Everything the CLI does, as library calls: build a loop, a strategy and
/// a workload from a flat config, run the invocations, verify coverage,
/// emit traces, summary rows, and history dumps. The CLI binary is a thin
/// flag parser over run_experiment / run_sweep.
///
//===----------------------------------------------------------------------===//

#pragma once

#include "selfsched/executor.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace selfsched {

/// Flat experiment description mirroring the CLI flags. More than one
/// schedule or workload means a sweep over their Cartesian product.
struct ExperimentConfig {
  Index iters = 0;
  Index lower = 0;
  Index stride = 1;
  std::optional<Index> chunk;
  std::vector<std::string> schedules = {"static"};
  std::vector<std::string> workloads = {"constant:1"};
  int threads = 1;
  std::string mode = "sim";
  std::vector<double> speeds;
  std::uint64_t seed = 0;
  int invocations = 1;
  double overhead = 0.0;
  std::string format = "csv";
  std::string out; // empty: no trace files
  bool dump_history = false;

  bool is_sweep() const {
    return schedules.size() > 1 || workloads.size() > 1;
  }

  /// Throws ConfigError on invalid mode/format tokens or parameter ranges.
  void validate() const;

  /// One-line flat echo, key=value separated by spaces.
  std::string echo() const;
};

/// The loop the config describes; `site_id` keys the history store.
LoopDescriptor experiment_loop(const ExperimentConfig &config,
                               const std::string &site_id);

TeamConfig experiment_team(const ExperimentConfig &config);

/// Runs one schedule x workload experiment: `invocations` runs against one
/// loop site, coverage checked on every invocation, per-invocation trace
/// files when `out` is set, and a summary table (one row per invocation)
/// on `summary`. Throws on the first error.
void run_experiment(const ExperimentConfig &config, std::ostream &summary);

/// Cartesian product of schedules x workloads under a shared seed; writes
/// one combined CSV of summary rows keyed by (schedule, workload) to `out`
/// if set, else to `summary`.
void run_sweep(const ExperimentConfig &config, std::ostream &summary);

} // namespace selfsched
