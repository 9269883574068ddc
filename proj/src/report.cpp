//===-- report.cpp - Execution traces and imbalance metrics --------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "selfsched/report.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace selfsched {

std::string format_time(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

CoverageResult verify_coverage(const ExecutionReport &report,
                               const LoopDescriptor &loop) {
  const Index n = loop.iteration_count();
  std::vector<bool> visited(static_cast<std::size_t>(n), false);
  for (const ChunkLogEntry &entry : report.chunk_log) {
    if (entry.first < 0 || entry.size < 1 || entry.first + entry.size > n) {
      return {false, "chunk seq " + std::to_string(entry.seq) + " range [" +
                         std::to_string(entry.first) + ", " +
                         std::to_string(entry.first + entry.size) +
                         ") outside iteration space [0, " + std::to_string(n) +
                         ")"};
    }
    for (Index k = entry.first; k < entry.first + entry.size; ++k) {
      if (visited[static_cast<std::size_t>(k)]) {
        return {false, "duplicate index " + std::to_string(k)};
      }
      visited[static_cast<std::size_t>(k)] = true;
    }
  }
  for (Index k = 0; k < n; ++k) {
    if (!visited[static_cast<std::size_t>(k)]) {
      return {false, "missing index " + std::to_string(k)};
    }
  }
  return {true, {}};
}

ImbalanceMetrics imbalance_metrics(const ExecutionReport &report) {
  ImbalanceMetrics metrics;
  metrics.total_chunks = report.chunk_log.size();
  if (report.thread_finish.empty()) {
    return metrics;
  }
  double sum = 0.0;
  double max = 0.0;
  for (double finish : report.thread_finish) {
    sum += finish;
    max = std::max(max, finish);
  }
  const double mean = sum / static_cast<double>(report.thread_finish.size());
  if (mean <= 0.0) {
    return metrics; // empty loop: zeros by convention
  }
  double var = 0.0;
  for (double finish : report.thread_finish) {
    var += (finish - mean) * (finish - mean);
  }
  var /= static_cast<double>(report.thread_finish.size());
  metrics.makespan = max;
  metrics.mean_finish = mean;
  metrics.percent_imbalance = (max / mean - 1.0) * 100.0;
  metrics.cov = std::sqrt(var) / mean;
  return metrics;
}

std::vector<Index> chunk_size_sequence(const ExecutionReport &report) {
  std::vector<Index> sizes;
  sizes.reserve(report.chunk_log.size());
  for (const ChunkLogEntry &entry : report.chunk_log) {
    sizes.push_back(entry.size);
  }
  return sizes;
}

void export_csv(const ExecutionReport &report, std::ostream &out) {
  out << "seq,thread,first,size,t_begin,t_end\n";
  for (const ChunkLogEntry &entry : report.chunk_log) {
    out << entry.seq << ',' << entry.thread << ',' << entry.first << ','
        << entry.size << ',' << format_time(entry.t_begin) << ','
        << format_time(entry.t_end) << '\n';
  }
}

namespace {

nlohmann::json to_json(const ExecutionReport &report) {
  nlohmann::json log = nlohmann::json::array();
  for (const ChunkLogEntry &e : report.chunk_log) {
    log.push_back({{"seq", e.seq},
                   {"thread", e.thread},
                   {"first", e.first},
                   {"size", e.size},
                   {"t_begin", e.t_begin},
                   {"t_end", e.t_end}});
  }
  nlohmann::json j = {
      {"mode", report.mode},
      {"team_size", report.team_size},
      {"loop",
       {{"lower", report.loop.lower},
        {"upper", report.loop.upper},
        {"stride", report.loop.stride},
        {"chunk_param", report.loop.chunk_param},
        {"site_id", report.loop.site_id}}},
      {"strategy",
       {{"name", report.strategy.name},
        {"parameters", report.strategy.parameters},
        {"monotonic_chunks", report.strategy.monotonic_chunks}}},
      {"chunk_log", log},
      {"thread_finish", report.thread_finish},
  };
  if (report.error) {
    j["error"] = *report.error;
  } else {
    j["error"] = nullptr;
  }
  return j;
}

ExecutionReport from_json(const nlohmann::json &j) {
  ExecutionReport report;
  report.mode = j.at("mode").get<std::string>();
  report.team_size = j.at("team_size").get<int>();
  const auto &loop = j.at("loop");
  report.loop.lower = loop.at("lower").get<Index>();
  report.loop.upper = loop.at("upper").get<Index>();
  report.loop.stride = loop.at("stride").get<Index>();
  report.loop.chunk_param = loop.at("chunk_param").get<Index>();
  report.loop.site_id = loop.at("site_id").get<std::string>();
  const auto &strategy = j.at("strategy");
  report.strategy.name = strategy.at("name").get<std::string>();
  report.strategy.parameters =
      strategy.at("parameters").get<std::map<std::string, std::string>>();
  report.strategy.monotonic_chunks =
      strategy.at("monotonic_chunks").get<bool>();
  for (const auto &e : j.at("chunk_log")) {
    report.chunk_log.push_back({e.at("seq").get<std::uint64_t>(),
                                e.at("thread").get<int>(),
                                e.at("first").get<Index>(),
                                e.at("size").get<Index>(),
                                e.at("t_begin").get<double>(),
                                e.at("t_end").get<double>()});
  }
  report.thread_finish = j.at("thread_finish").get<std::vector<double>>();
  if (!j.at("error").is_null()) {
    report.error = j.at("error").get<std::string>();
  }
  return report;
}

} // namespace

void export_json(const ExecutionReport &report, std::ostream &out) {
  out << to_json(report).dump(2) << '\n';
}

ExecutionReport import_json(std::istream &in) {
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

ExecutionReport report_from_json_text(const std::string &text) {
  return from_json(nlohmann::json::parse(text));
}

void export_report(const ExecutionReport &report, const std::string &format,
                   const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot open output file '" + path + "'");
  }
  if (format == "csv") {
    export_csv(report, out);
  } else if (format == "json") {
    export_json(report, out);
  } else {
    throw ConfigError("unknown trace format '" + format +
                      "'; expected csv or json");
  }
}

} // namespace selfsched
