//===-- executor.cpp - Parallel loop execution ----------------------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "selfsched/executor.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <chrono>
#include <limits>
#include <mutex>
#include <thread>

namespace selfsched {

void TeamConfig::validate() const {
  if (team_size < 1) {
    throw ConfigError("team size must be >= 1, got " +
                      std::to_string(team_size));
  }
  if (!thread_speeds.empty() &&
      thread_speeds.size() != static_cast<std::size_t>(team_size)) {
    throw ConfigError("speed count " + std::to_string(thread_speeds.size()) +
                      " does not match team size " +
                      std::to_string(team_size));
  }
  for (double s : thread_speeds) {
    if (!(s > 0.0)) {
      throw ConfigError("thread speeds must be positive");
    }
  }
  if (dequeue_overhead < 0.0) {
    throw ConfigError("dequeue overhead must be >= 0");
  }
}

namespace {

void check_chunk(const Chunk &chunk, Index total) {
  if (chunk.first < 0 || chunk.size < 1 || chunk.first + chunk.size > total) {
    throw ContractViolation(
        "strategy yielded chunk seq " + std::to_string(chunk.seq) + " [" +
        std::to_string(chunk.first) + ", " +
        std::to_string(chunk.first + chunk.size) +
        ") outside iteration space [0, " + std::to_string(total) + ")");
  }
}

ExecutionReport make_report(const LoopDescriptor &loop,
                            const Scheduler &strategy, const TeamConfig &team) {
  ExecutionReport report;
  report.team_size = team.team_size;
  report.loop = loop;
  report.strategy = strategy.info();
  report.mode = team.mode == ExecMode::Sim ? "sim" : "real";
  report.thread_finish.assign(static_cast<std::size_t>(team.team_size), 0.0);
  return report;
}

// Merges per-thread chunk logs into seq order and folds them into the
// loop record, then finalizes the invocation.
void finish_invocation(ExecutionReport &report, LoopRecord &record,
                       Scheduler &strategy) {
  std::sort(report.chunk_log.begin(), report.chunk_log.end(),
            [](const ChunkLogEntry &a, const ChunkLogEntry &b) {
              return a.seq < b.seq;
            });
  for (const ChunkLogEntry &entry : report.chunk_log) {
    history_record_chunk(record,
                         entry.thread,
                         Chunk{entry.first, entry.size, entry.seq},
                         entry.t_end - entry.t_begin);
  }
  strategy.fini(record);
  record.invocation_count += 1;
}

} // namespace

ExecutionReport parallel_for(const LoopDescriptor &loop, Scheduler &strategy,
                             const BodyCallback &body, const TeamConfig &team,
                             HistoryStore &history) {
  team.validate();
  loop.validate();
  if (team.mode != ExecMode::Real) {
    throw ConfigError("parallel_for requires a real-mode team config");
  }
  const Index total = loop.iteration_count();
  const CanonicalLoop canon = canonicalize(loop.lower, loop.upper, loop.stride);

  LoopRecord &record = history.at_site(loop.site_id);
  record.reset_stats(team.team_size);
  strategy.init(loop, team.team_size, record);

  ExecutionReport report = make_report(loop, strategy, team);
  std::vector<std::vector<ChunkLogEntry>> logs(
      static_cast<std::size_t>(team.team_size));

  std::atomic<bool> stop{false};
  std::mutex error_mutex;
  std::optional<std::string> first_error;
  std::optional<std::string> violation;

  const auto epoch = std::chrono::steady_clock::now();
  auto now_ns = [epoch] {
    return std::chrono::duration<double, std::nano>(
               std::chrono::steady_clock::now() - epoch)
        .count();
  };

  auto fail = [&](std::optional<std::string> &slot, std::string message) {
    std::lock_guard lock(error_mutex);
    if (!slot) {
      slot = std::move(message);
    }
    stop.store(true, std::memory_order_relaxed);
  };

  auto worker = [&](int tid) {
    auto &log = logs[static_cast<std::size_t>(tid)];
    while (!stop.load(std::memory_order_relaxed)) {
      std::optional<Chunk> chunk;
      try {
        chunk = strategy.next(tid);
      } catch (const std::exception &e) {
        fail(violation, std::string("strategy next() threw: ") + e.what());
        break;
      }
      if (!chunk) {
        break;
      }
      if (chunk->first < 0 || chunk->size < 1 ||
          chunk->first + chunk->size > total) {
        fail(violation, "strategy yielded chunk seq " +
                            std::to_string(chunk->seq) + " [" +
                            std::to_string(chunk->first) + ", " +
                            std::to_string(chunk->first + chunk->size) +
                            ") outside iteration space [0, " +
                            std::to_string(total) + ")");
        break;
      }
      strategy.begin_chunk(tid, *chunk);
      const double t_begin = now_ns();
      try {
        for (Index k = chunk->first; k < chunk->first + chunk->size; ++k) {
          body(tid, canon.source_index(k));
        }
      } catch (const std::exception &e) {
        fail(first_error, e.what());
      } catch (...) {
        fail(first_error, "unknown body error");
      }
      const double t_end = now_ns();
      strategy.end_chunk(tid, *chunk, t_end - t_begin);
      log.push_back(
          {chunk->seq, tid, chunk->first, chunk->size, t_begin, t_end});
    }
  };

  if (team.team_size == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(team.team_size));
    for (int t = 0; t < team.team_size; ++t) {
      threads.emplace_back(worker, t);
    }
    for (auto &thread : threads) {
      thread.join();
    }
  }

  for (int t = 0; t < team.team_size; ++t) {
    const auto &log = logs[static_cast<std::size_t>(t)];
    double finish = 0.0;
    for (const ChunkLogEntry &entry : log) {
      finish = std::max(finish, entry.t_end);
      report.chunk_log.push_back(entry);
    }
    report.thread_finish[static_cast<std::size_t>(t)] = finish;
  }
  report.error = first_error;

  if (violation) {
    throw ContractViolation(*violation);
  }
  finish_invocation(report, record, strategy);
  assert(report.error || verify_coverage(report, loop).ok);
  return report;
}

ExecutionReport simulate(const LoopDescriptor &loop, Scheduler &strategy,
                         const CostModel &cost_model, const TeamConfig &team,
                         HistoryStore &history) {
  team.validate();
  loop.validate();
  if (team.mode != ExecMode::Sim) {
    throw ConfigError("simulate requires a sim-mode team config");
  }
  const Index total = loop.iteration_count();
  const int p = team.team_size;

  LoopRecord &record = history.at_site(loop.site_id);
  record.reset_stats(p);
  strategy.init(loop, p, record);

  ExecutionReport report = make_report(loop, strategy, team);

  std::vector<double> clock(static_cast<std::size_t>(p), 0.0);
  std::vector<bool> done(static_cast<std::size_t>(p), false);
  int active = p;
  auto speed_of = [&](int t) {
    return team.thread_speeds.empty()
               ? 1.0
               : team.thread_speeds[static_cast<std::size_t>(t)];
  };

  while (active > 0) {
    int tid = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int t = 0; t < p; ++t) {
      if (!done[static_cast<std::size_t>(t)] &&
          clock[static_cast<std::size_t>(t)] < best) {
        best = clock[static_cast<std::size_t>(t)];
        tid = t;
      }
    }
    std::optional<Chunk> chunk = strategy.next(tid);
    if (!chunk) {
      done[static_cast<std::size_t>(tid)] = true;
      --active;
      continue;
    }
    check_chunk(*chunk, total);
    strategy.begin_chunk(tid, *chunk);
    double ticks = 0.0;
    for (Index k = chunk->first; k < chunk->first + chunk->size; ++k) {
      ticks += cost_model.cost(k);
    }
    ticks /= speed_of(tid);
    const double t_begin =
        clock[static_cast<std::size_t>(tid)] + team.dequeue_overhead;
    const double t_end = t_begin + ticks;
    clock[static_cast<std::size_t>(tid)] = t_end;
    strategy.end_chunk(tid, *chunk, t_end - t_begin);
    report.chunk_log.push_back(
        {chunk->seq, tid, chunk->first, chunk->size, t_begin, t_end});
  }

  for (int t = 0; t < p; ++t) {
    report.thread_finish[static_cast<std::size_t>(t)] =
        clock[static_cast<std::size_t>(t)];
  }
  finish_invocation(report, record, strategy);
  assert(verify_coverage(report, loop).ok);
  return report;
}

std::vector<ExecutionReport> run_invocations(int count,
                                             const LoopDescriptor &loop,
                                             Scheduler &strategy,
                                             const CostModel &cost_model,
                                             const TeamConfig &team,
                                             HistoryStore &history) {
  if (count < 1) {
    throw ConfigError("invocation count must be >= 1, got " +
                      std::to_string(count));
  }
  std::vector<ExecutionReport> reports;
  reports.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    if (team.mode == ExecMode::Sim) {
      reports.push_back(simulate(loop, strategy, cost_model, team, history));
    } else {
      const BodyCallback body = as_spin_body(cost_model, loop);
      reports.push_back(parallel_for(loop, strategy, body, team, history));
    }
    if (reports.back().error) {
      break;
    }
  }
  return reports;
}

} // namespace selfsched
