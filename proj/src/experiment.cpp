//===-- experiment.cpp - Benchmark harness wiring -------------------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "selfsched/experiment.hpp"

#include "selfsched/strategies.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace selfsched {

namespace {

std::string csv_field(const std::string &value) {
  if (value.find_first_of(",\"") == std::string::npos) {
    return value;
  }
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') {
      quoted += '"';
    }
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string trace_path(const std::string &out, int invocation,
                       int invocations) {
  if (invocations == 1) {
    return out;
  }
  const std::size_t slash = out.find_last_of('/');
  const std::size_t dot = out.find_last_of('.');
  const std::string tag = ".inv" + std::to_string(invocation);
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return out + tag;
  }
  return out.substr(0, dot) + tag + out.substr(dot);
}

struct InvocationRow {
  int invocation;
  ImbalanceMetrics metrics;
};

// Runs one (schedule, workload) combination, checking coverage and writing
// trace files; returns one metrics row per invocation.
std::vector<InvocationRow> run_combination(const ExperimentConfig &config,
                                           const std::string &schedule,
                                           const std::string &workload,
                                           const std::string &site_id,
                                           HistoryStore &history,
                                           bool write_traces) {
  const LoopDescriptor loop = experiment_loop(config, site_id);
  const TeamConfig team = experiment_team(config);
  const CostModel model = CostModel::parse(workload, config.seed);
  auto strategy =
      make_scheduler(schedule, RegistryOptions{config.chunk, config.seed});

  const auto reports = run_invocations(config.invocations, loop, *strategy,
                                       model, team, history);
  std::vector<InvocationRow> rows;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const ExecutionReport &report = reports[i];
    if (report.error) {
      throw std::runtime_error("invocation " + std::to_string(i + 1) +
                               " failed: " + *report.error);
    }
    const CoverageResult coverage = verify_coverage(report, loop);
    if (!coverage.ok) {
      throw ContractViolation("coverage violation in invocation " +
                              std::to_string(i + 1) + ": " + coverage.detail);
    }
    if (write_traces && !config.out.empty()) {
      export_report(report, config.format,
                    trace_path(config.out, static_cast<int>(i) + 1,
                               config.invocations));
    }
    rows.push_back({static_cast<int>(i) + 1, imbalance_metrics(report)});
  }
  return rows;
}

std::string join(const std::vector<std::string> &values, char sep) {
  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) {
      joined += sep;
    }
    joined += values[i];
  }
  return joined;
}

} // namespace

void ExperimentConfig::validate() const {
  if (mode != "real" && mode != "sim") {
    throw ConfigError("mode must be 'real' or 'sim', got '" + mode + "'");
  }
  if (format != "csv" && format != "json") {
    throw ConfigError("format must be 'csv' or 'json', got '" + format + "'");
  }
  if (invocations < 1) {
    throw ConfigError("invocations must be >= 1");
  }
  if (iters < 0) {
    throw ConfigError("iters must be >= 0");
  }
  if (chunk && *chunk < 1) {
    throw ConfigError("chunk must be >= 1");
  }
  if (schedules.empty() || workloads.empty()) {
    throw ConfigError("at least one schedule and one workload are required");
  }
  experiment_team(*this).validate();
}

std::string ExperimentConfig::echo() const {
  std::ostringstream os;
  os << "iters=" << iters << " lower=" << lower << " stride=" << stride;
  if (chunk) {
    os << " chunk=" << *chunk;
  }
  os << " schedule=" << join(schedules, ';')
     << " workload=" << join(workloads, ';') << " threads=" << threads
     << " mode=" << mode;
  if (!speeds.empty()) {
    os << " speeds=";
    for (std::size_t i = 0; i < speeds.size(); ++i) {
      os << (i ? "," : "") << format_time(speeds[i]);
    }
  }
  os << " seed=" << seed << " invocations=" << invocations
     << " overhead=" << format_time(overhead) << " format=" << format;
  return os.str();
}

LoopDescriptor experiment_loop(const ExperimentConfig &config,
                               const std::string &site_id) {
  LoopDescriptor loop;
  loop.lower = config.lower;
  loop.stride = config.stride == 0 ? 1 : config.stride;
  loop.upper = config.lower + config.iters * loop.stride;
  loop.chunk_param = config.chunk.value_or(1);
  loop.site_id = site_id;
  return loop;
}

TeamConfig experiment_team(const ExperimentConfig &config) {
  TeamConfig team;
  team.team_size = config.threads;
  team.mode = config.mode == "sim" ? ExecMode::Sim : ExecMode::Real;
  team.thread_speeds = config.speeds;
  team.seed = config.seed;
  team.dequeue_overhead = config.overhead;
  return team;
}

void run_experiment(const ExperimentConfig &config, std::ostream &summary) {
  config.validate();
  const std::string &schedule = config.schedules.front();
  const std::string &workload = config.workloads.front();

  HistoryStore history;
  const std::string site_id = "run:" + schedule;
  const auto rows = run_combination(config, schedule, workload, site_id,
                                    history, /*write_traces=*/true);

  summary << "# config: " << config.echo() << '\n';
  summary << "invocation makespan percent_imbalance cov total_chunks\n";
  for (const InvocationRow &row : rows) {
    summary << row.invocation << ' ' << format_time(row.metrics.makespan)
            << ' ' << format_time(row.metrics.percent_imbalance) << ' '
            << format_time(row.metrics.cov) << ' ' << row.metrics.total_chunks
            << '\n';
  }
  if (config.dump_history) {
    summary << history_to_json(history) << '\n';
  }
}

void run_sweep(const ExperimentConfig &config, std::ostream &summary) {
  config.validate();

  HistoryStore history;
  std::ostringstream csv;
  csv << "schedule,workload,invocation,makespan,percent_imbalance,cov,"
         "total_chunks\n";
  for (const std::string &schedule : config.schedules) {
    for (const std::string &workload : config.workloads) {
      const std::string site_id = "sweep:" + schedule + "|" + workload;
      const auto rows = run_combination(config, schedule, workload, site_id,
                                        history, /*write_traces=*/false);
      for (const InvocationRow &row : rows) {
        csv << csv_field(schedule) << ',' << csv_field(workload) << ','
            << row.invocation << ',' << format_time(row.metrics.makespan)
            << ',' << format_time(row.metrics.percent_imbalance) << ','
            << format_time(row.metrics.cov) << ',' << row.metrics.total_chunks
            << '\n';
      }
    }
  }

  if (!config.out.empty()) {
    std::ofstream file(config.out, std::ios::binary);
    if (!file) {
      throw ConfigError("cannot open output file '" + config.out + "'");
    }
    file << csv.str();
    summary << "# config: " << config.echo() << '\n';
    summary << "# sweep written to " << config.out << '\n';
  } else {
    summary << csv.str();
  }
  if (config.dump_history) {
    summary << history_to_json(history) << '\n';
  }
}

} // namespace selfsched
