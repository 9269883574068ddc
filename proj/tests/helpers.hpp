//===-- helpers.hpp - Shared test scaffolding ------------------------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#pragma once

#include "oracles.hpp"
#include "selfsched/executor.hpp"
#include "selfsched/strategies.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

namespace testutil {

using namespace selfsched;

inline LoopDescriptor unit_loop(Index n, const std::string &site = "test") {
  return LoopDescriptor{0, n, 1, 1, site};
}

inline TeamConfig sim_team(int p, std::vector<double> speeds = {},
                           double overhead = 0.0, std::uint64_t seed = 0) {
  TeamConfig team;
  team.team_size = p;
  team.mode = ExecMode::Sim;
  team.thread_speeds = std::move(speeds);
  team.seed = seed;
  team.dequeue_overhead = overhead;
  return team;
}

inline TeamConfig real_team(int p) {
  TeamConfig team;
  team.team_size = p;
  team.mode = ExecMode::Real;
  return team;
}

inline ExecutionReport run_sim(Scheduler &strategy, Index n, int p,
                               const CostModel &model = CostModel::constant(1),
                               std::vector<double> speeds = {},
                               double overhead = 0.0) {
  HistoryStore history;
  return simulate(unit_loop(n), strategy, model,
                  sim_team(p, std::move(speeds), overhead), history);
}

// Chunk stream as issued, in dequeue order.
inline std::vector<oracle::PlannedChunk>
issued_in_seq_order(const ExecutionReport &report) {
  std::vector<oracle::PlannedChunk> out;
  for (const ChunkLogEntry &e : report.chunk_log) {
    out.push_back({e.first, e.size, e.thread});
  }
  return out;
}

// Chunk stream sorted by position, for laws that fix the assignment rather
// than the dequeue order.
inline std::vector<oracle::PlannedChunk>
issued_by_first(const ExecutionReport &report) {
  auto out = issued_in_seq_order(report);
  std::sort(out.begin(), out.end(),
            [](const oracle::PlannedChunk &a, const oracle::PlannedChunk &b) {
              return a.first < b.first;
            });
  return out;
}

inline bool same_positions(const std::vector<oracle::PlannedChunk> &got,
                           const std::vector<oracle::PlannedChunk> &want,
                           bool check_thread) {
  if (got.size() != want.size()) {
    return false;
  }
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (got[i].first != want[i].first || got[i].size != want[i].size) {
      return false;
    }
    if (check_thread && got[i].thread != want[i].thread) {
      return false;
    }
  }
  return true;
}

/// Instrumented strategy: delegates to an inner scheduler and records the
/// full call sequence so tests can assert the executor protocol.
class RecordingScheduler : public Scheduler {
public:
  enum class Kind { Init, Next, NextEmpty, Begin, End, Fini };

  struct Event {
    Kind kind;
    int thread;
  };

  explicit RecordingScheduler(Scheduler &inner) : inner_(inner) {}

  void init(const LoopDescriptor &loop, int team_size,
            LoopRecord &record) override {
    record_event(Kind::Init, -1);
    team_size_ = team_size;
    inner_.init(loop, team_size, record);
  }

  std::optional<Chunk> next(int thread_id) override {
    auto chunk = inner_.next(thread_id);
    record_event(chunk ? Kind::Next : Kind::NextEmpty, thread_id);
    return chunk;
  }

  void begin_chunk(int thread_id, const Chunk &chunk) override {
    record_event(Kind::Begin, thread_id);
    inner_.begin_chunk(thread_id, chunk);
  }

  void end_chunk(int thread_id, const Chunk &chunk, double elapsed) override {
    record_event(Kind::End, thread_id);
    inner_.end_chunk(thread_id, chunk, elapsed);
  }

  void fini(LoopRecord &record) override {
    record_event(Kind::Fini, -1);
    inner_.fini(record);
  }

  StrategyInfo info() const override { return inner_.info(); }

  /// Empty string when the recorded sequence is a valid protocol:
  /// one init first, one fini last, and per thread a run of
  /// next/begin/end triples closed by a single sticky empty next.
  std::string protocol_violation() const {
    std::lock_guard lock(mutex_);
    if (events_.empty() || events_.front().kind != Kind::Init) {
      return "first event is not init";
    }
    if (events_.back().kind != Kind::Fini) {
      return "last event is not fini";
    }
    std::size_t inits = 0;
    std::size_t finis = 0;
    std::vector<std::vector<Kind>> per_thread(
        static_cast<std::size_t>(team_size_));
    for (const Event &event : events_) {
      if (event.kind == Kind::Init) {
        ++inits;
        continue;
      }
      if (event.kind == Kind::Fini) {
        ++finis;
        continue;
      }
      if (event.thread < 0 || event.thread >= team_size_) {
        return "thread id out of range";
      }
      per_thread[static_cast<std::size_t>(event.thread)].push_back(event.kind);
    }
    if (inits != 1) {
      return "init called " + std::to_string(inits) + " times";
    }
    if (finis != 1) {
      return "fini called " + std::to_string(finis) + " times";
    }
    for (int t = 0; t < team_size_; ++t) {
      const auto &seq = per_thread[static_cast<std::size_t>(t)];
      std::size_t i = 0;
      while (i + 2 < seq.size() && seq[i] == Kind::Next &&
             seq[i + 1] == Kind::Begin && seq[i + 2] == Kind::End) {
        i += 3;
      }
      // A clean run closes every thread with exactly one sticky empty next.
      if (!(i + 1 == seq.size() && seq[i] == Kind::NextEmpty)) {
        return "thread " + std::to_string(t) +
               " has a malformed event sequence";
      }
    }
    return {};
  }

  std::size_t event_count() const {
    std::lock_guard lock(mutex_);
    return events_.size();
  }

private:
  void record_event(Kind kind, int thread) {
    std::lock_guard lock(mutex_);
    events_.push_back({kind, thread});
  }

  Scheduler &inner_;
  mutable std::mutex mutex_;
  std::vector<Event> events_;
  int team_size_ = 0;
};

} // namespace testutil
