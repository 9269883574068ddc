//===-- schedbench.cpp - Loop scheduling benchmark CLI --------------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
//
// Thin flag parser over the experiment library. Exit codes: 0 success,
// 1 usage error, 2 runtime or contract error.
//
//===----------------------------------------------------------------------===//

#include "selfsched/experiment.hpp"
#include "selfsched/strategies.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv) {
  CLI::App app{"schedbench - parallel loop scheduling benchmark harness"};

  selfsched::ExperimentConfig config;
  config.schedules.clear();
  config.workloads.clear();

  std::int64_t chunk = 0;

  app.set_config("--config", "", "flat key = value config file");
  app.allow_config_extras(false);

  app.add_option("--iters", config.iters, "iteration count");
  app.add_option("--lower", config.lower, "loop lower bound");
  app.add_option("--stride", config.stride, "loop stride (nonzero)");
  app.add_option("--chunk", chunk, "chunk parameter for chunked schedules");
  app.add_option("--schedule", config.schedules,
                 "schedule token with optional params, e.g. static, "
                 "dynamic,16, wf2,1.5:0.5; repeat for a sweep")
      ->take_all();
  app.add_option("--threads", config.threads, "team size");
  app.add_option("--mode", config.mode, "execution mode: real | sim");
  app.add_option("--speeds", config.speeds,
                 "per-thread speed multipliers (sim), e.g. 1,1,1,0.5")
      ->delimiter(',');
  app.add_option("--seed", config.seed, "seed for seeded schedules/workloads");
  app.add_option("--workload", config.workloads,
                 "workload spec, e.g. constant:1, exponential:10:7; repeat "
                 "for a sweep")
      ->take_all();
  app.add_option("--invocations", config.invocations,
                 "number of repeated invocations against one loop site");
  app.add_option("--overhead", config.overhead,
                 "per-dequeue scheduling overhead in sim ticks");
  app.add_option("--format", config.format, "trace format: csv | json");
  app.add_option("--out", config.out, "trace (or sweep CSV) output path");
  app.add_flag("--dump-history", config.dump_history,
               "print the history store as JSON after the summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion") {
      return app.exit(e);
    }
    app.exit(e);
    return 1;
  }

  if (app.count("--chunk") > 0 || chunk != 0) {
    config.chunk = chunk;
  }
  if (config.schedules.empty()) {
    config.schedules = {"static"};
  }
  if (config.workloads.empty()) {
    config.workloads = {"constant:1"};
  }

  try {
    if (config.is_sweep()) {
      selfsched::run_sweep(config, std::cout);
    } else {
      selfsched::run_experiment(config, std::cout);
    }
  } catch (const selfsched::ConfigError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
