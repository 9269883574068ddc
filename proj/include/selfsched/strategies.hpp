//===-- strategies.hpp - Built-in scheduling strategies ------------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// The built-in strategy catalog. Each class implements one chunk-size law:
///
///   static        fixed blocks of ceil(N/P) (or a given chunk), assigned
///                 round-robin at init
///   static-cyclic iteration i runs on thread i mod P
///   dynamic       fixed-size chunks handed out from a shared counter
///   ss            pure self-scheduling, chunk size 1
///   guided        chunk = ceil(remaining / P), floored at a minimum
///   tss           trapezoid: sizes fall linearly from a first to a last
///   fac2          batches of P equal chunks, each batch half the remainder
///   wf2           fac2 batches with per-thread weighted shares
///   rand          chunk size drawn uniformly from [lo, hi]
///   awf           wf2 whose weights are re-learned from measured rates
///                 across invocations
///
//===----------------------------------------------------------------------===//

#pragma once

#include "selfsched/scheduler.hpp"

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace selfsched {

/// Per-thread positive weights, rescaled on construction so they sum to
/// the thread count. Throws ConfigError on empty or non-positive input.
class WeightVector {
public:
  explicit WeightVector(std::vector<double> raw);

  double operator[](std::size_t t) const { return weights_[t]; }
  std::size_t size() const { return weights_.size(); }
  const std::vector<double> &values() const { return weights_; }

private:
  std::vector<double> weights_;
};

/// Static block scheduling: thread t owns chunks starting at t*chunk,
/// advancing by P*chunk. Without an explicit chunk the whole space is cut
/// into P blocks of ceil(N/P).
class StaticBlock : public SchedulerBase {
public:
  explicit StaticBlock(std::optional<Index> chunk = {});

  void init(const LoopDescriptor &loop, int team_size, LoopRecord &record) override;
  std::optional<Chunk> next(int thread_id) override;
  StrategyInfo info() const override;

private:
  std::optional<Index> chunk_param_;
  Index chunk_ = 1;
  std::vector<Index> next_start_;
};

/// Static cyclic scheduling: iteration i on thread i mod P.
class StaticCyclic : public SchedulerBase {
public:
  void init(const LoopDescriptor &loop, int team_size, LoopRecord &record) override;
  std::optional<Chunk> next(int thread_id) override;
  StrategyInfo info() const override;

private:
  std::vector<Index> cursor_;
};

/// Dynamic block scheduling (fixed-size chunking): consecutive blocks of a
/// fixed size from a shared counter, last block possibly short. Without an
/// explicit chunk the loop's chunk_param applies.
class DynamicChunked : public SchedulerBase {
public:
  explicit DynamicChunked(std::optional<Index> chunk = {});

  void init(const LoopDescriptor &loop, int team_size, LoopRecord &record) override;
  std::optional<Chunk> next(int thread_id) override;
  StrategyInfo info() const override;

private:
  std::optional<Index> chunk_param_;
  Index chunk_ = 1;
  std::mutex mutex_;
  Index cursor_ = 0;
};

/// Pure self-scheduling: one iteration per dequeue from a central counter.
class SelfSched : public SchedulerBase {
public:
  void init(const LoopDescriptor &loop, int team_size, LoopRecord &record) override;
  std::optional<Chunk> next(int thread_id) override;
  StrategyInfo info() const override;

private:
  std::mutex mutex_;
  Index cursor_ = 0;
};

/// Guided self-scheduling: chunk = max(min_chunk, ceil(remaining / P)).
class Guided : public SchedulerBase {
public:
  explicit Guided(std::optional<Index> min_chunk = {});

  void init(const LoopDescriptor &loop, int team_size, LoopRecord &record) override;
  std::optional<Chunk> next(int thread_id) override;
  StrategyInfo info() const override;

private:
  Index min_chunk_ = 1;
  std::mutex mutex_;
  Index remaining_ = 0;
};

/// Trapezoid self-scheduling. Defaults: first = ceil(N/2P), last = 1.
/// The k-th chunk has size round-half-up(first - k*delta) with
/// delta = (first-last)/(C-1) kept as an exact rational,
/// C = ceil(2N/(first+last)); sizes are floored at 1 and the final chunk
/// is clamped so the space is exhausted exactly.
class Trapezoid : public SchedulerBase {
public:
  Trapezoid(std::optional<Index> first = {}, std::optional<Index> last = {});

  void init(const LoopDescriptor &loop, int team_size, LoopRecord &record) override;
  std::optional<Chunk> next(int thread_id) override;
  StrategyInfo info() const override;

  Index planned_chunk_count() const { return planned_chunks_; }

private:
  std::optional<Index> first_param_;
  std::optional<Index> last_param_;
  Index first_ = 1;
  Index last_ = 1;
  Index planned_chunks_ = 0;
  std::mutex mutex_;
  Index dequeues_ = 0;
  Index remaining_ = 0;
};

/// Factoring-2: batches of P equal chunks; at each batch start the chunk
/// size is ceil(remaining / 2P).
class Fac2 : public SchedulerBase {
public:
  void init(const LoopDescriptor &loop, int team_size, LoopRecord &record) override;
  std::optional<Chunk> next(int thread_id) override;
  StrategyInfo info() const override;

private:
  std::mutex mutex_;
  Index remaining_ = 0;
  Index batch_chunk_ = 0;
  int batch_left_ = 0;
};

/// Weighted factoring-2: fac2's batch structure with per-thread shares of
/// round-half-up(w_t * batch_chunk), reserved for their thread when the
/// batch is carved. Each thread consumes its own reserved shares at its
/// own pace. Without explicit weights the vector is uniform.
class Wf2 : public SchedulerBase {
public:
  explicit Wf2(std::optional<std::vector<double>> weights = {});

  void init(const LoopDescriptor &loop, int team_size, LoopRecord &record) override;
  std::optional<Chunk> next(int thread_id) override;
  StrategyInfo info() const override;

protected:
  /// Carves the whole batch plan for `weights` and loads the per-thread
  /// share queues. Shared by wf2 and awf.
  void plan_shares(const std::vector<double> &weights);

  std::string weights_echo() const;

private:
  std::optional<std::vector<double>> weights_param_;
  std::vector<double> active_weights_;
  std::vector<std::vector<Chunk>> shares_; // per thread, batch order, unstamped seq
  std::vector<std::size_t> share_pos_;
};

/// Random self-scheduling: chunk size uniform in [lo, hi] from a seeded
/// generator shared under the dequeue lock. Defaults: lo = 1,
/// hi = ceil(N/2P).
class RandChunk : public SchedulerBase {
public:
  RandChunk(std::optional<Index> lo = {}, std::optional<Index> hi = {},
            std::uint64_t seed = 0);

  void init(const LoopDescriptor &loop, int team_size, LoopRecord &record) override;
  std::optional<Chunk> next(int thread_id) override;
  StrategyInfo info() const override;

private:
  std::optional<Index> lo_param_;
  std::optional<Index> hi_param_;
  std::uint64_t seed_ = 0;
  Index lo_ = 1;
  Index hi_ = 1;
  std::mutex mutex_;
  std::mt19937_64 gen_;
  Index cursor_ = 0;
};

/// Adaptive weighted factoring: executes as wf2 under the weights stored
/// by the previous invocation (uniform on the first), measures per-thread
/// execution rates, and persists re-normalized weights from fini.
class Awf : public Wf2 {
public:
  Awf() : Wf2(std::nullopt) {}

  void init(const LoopDescriptor &loop, int team_size, LoopRecord &record) override;
  void end_chunk(int thread_id, const Chunk &chunk, double elapsed) override;
  void fini(LoopRecord &record) override;
  StrategyInfo info() const override;

private:
  std::vector<double> previous_weights_;
  std::vector<double> busy_;
  std::vector<double> iters_;
};

/// Registry construction knobs the CLI wires through: a fallback chunk for
/// schedule strings that carry none, and the seed for seeded strategies.
struct RegistryOptions {
  std::optional<Index> default_chunk;
  std::uint64_t seed = 0;
};

/// Builds a strategy from a schedule spec: a registry token optionally
/// followed by a comma and colon-separated parameters, e.g. "static",
/// "dynamic,16", "tss,13:1", "wf2,1.5:0.5", "rand,1:8". Throws ConfigError
/// for unknown tokens (the message lists the registry) or bad parameters.
std::unique_ptr<Scheduler> make_scheduler(std::string_view spec,
                                          const RegistryOptions &options = {});

/// The registry tokens, in catalog order.
const std::vector<std::string> &registered_names();

} // namespace selfsched
