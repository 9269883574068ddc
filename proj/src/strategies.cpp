//===-- strategies.cpp - Built-in scheduling strategies ------------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "selfsched/strategies.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace selfsched {

namespace {

// round-half-up of the nonnegative rational num/den.
Index round_half_up(Index num, Index den) {
  return (2 * num + den) / (2 * den);
}

Index round_half_up(double x) {
  return static_cast<Index>(std::floor(x + 0.5));
}

std::string index_or(const std::optional<Index> &v, const char *fallback) {
  return v ? std::to_string(*v) : std::string(fallback);
}

} // namespace

void SchedulerBase::start(const LoopDescriptor &loop, int team_size) {
  if (team_size < 1) {
    throw ConfigError("team_size must be >= 1, got " +
                      std::to_string(team_size));
  }
  loop.validate();
  total_ = loop.iteration_count();
  team_ = team_size;
  seq_.store(0, std::memory_order_relaxed);
}

//===----------------------------------------------------------------------===//
// WeightVector
//===----------------------------------------------------------------------===//

WeightVector::WeightVector(std::vector<double> raw) : weights_(std::move(raw)) {
  if (weights_.empty()) {
    throw ConfigError("weight vector must not be empty");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0)) {
      throw ConfigError("weights must be positive");
    }
    sum += w;
  }
  const double scale = static_cast<double>(weights_.size()) / sum;
  for (double &w : weights_) {
    w *= scale;
  }
}

//===----------------------------------------------------------------------===//
// StaticBlock
//===----------------------------------------------------------------------===//

StaticBlock::StaticBlock(std::optional<Index> chunk) : chunk_param_(chunk) {
  if (chunk_param_ && *chunk_param_ < 1) {
    throw ConfigError("static chunk must be >= 1");
  }
}

void StaticBlock::init(const LoopDescriptor &loop, int team_size,
                       LoopRecord &record) {
  (void)record;
  start(loop, team_size);
  const Index n = total_iterations();
  chunk_ = chunk_param_ ? *chunk_param_
                        : std::max<Index>(1, ceil_div(std::max<Index>(n, 0),
                                                      team_size));
  next_start_.assign(static_cast<std::size_t>(team_size), 0);
  for (int t = 0; t < team_size; ++t) {
    next_start_[static_cast<std::size_t>(t)] = static_cast<Index>(t) * chunk_;
  }
}

std::optional<Chunk> StaticBlock::next(int thread_id) {
  Index &cursor = next_start_[static_cast<std::size_t>(thread_id)];
  if (cursor >= total_iterations()) {
    return std::nullopt;
  }
  const Index first = cursor;
  const Index size = std::min(chunk_, total_iterations() - first);
  cursor += static_cast<Index>(team_size()) * chunk_;
  return take(first, size);
}

StrategyInfo StaticBlock::info() const {
  return {"static", {{"chunk", index_or(chunk_param_, "auto")}}, false};
}

//===----------------------------------------------------------------------===//
// StaticCyclic
//===----------------------------------------------------------------------===//

void StaticCyclic::init(const LoopDescriptor &loop, int team_size,
                        LoopRecord &record) {
  (void)record;
  start(loop, team_size);
  cursor_.assign(static_cast<std::size_t>(team_size), 0);
  for (int t = 0; t < team_size; ++t) {
    cursor_[static_cast<std::size_t>(t)] = t;
  }
}

std::optional<Chunk> StaticCyclic::next(int thread_id) {
  Index &cursor = cursor_[static_cast<std::size_t>(thread_id)];
  if (cursor >= total_iterations()) {
    return std::nullopt;
  }
  const Index first = cursor;
  cursor += team_size();
  return take(first, 1);
}

StrategyInfo StaticCyclic::info() const {
  return {"static-cyclic", {}, true};
}

//===----------------------------------------------------------------------===//
// DynamicChunked
//===----------------------------------------------------------------------===//

DynamicChunked::DynamicChunked(std::optional<Index> chunk)
    : chunk_param_(chunk) {
  if (chunk_param_ && *chunk_param_ < 1) {
    throw ConfigError("dynamic chunk must be >= 1");
  }
}

void DynamicChunked::init(const LoopDescriptor &loop, int team_size,
                          LoopRecord &record) {
  (void)record;
  start(loop, team_size);
  chunk_ = chunk_param_ ? *chunk_param_ : loop.chunk_param;
  cursor_ = 0;
}

std::optional<Chunk> DynamicChunked::next(int thread_id) {
  (void)thread_id;
  std::lock_guard lock(mutex_);
  if (cursor_ >= total_iterations()) {
    return std::nullopt;
  }
  const Index first = cursor_;
  const Index size = std::min(chunk_, total_iterations() - first);
  cursor_ += size;
  return take(first, size);
}

StrategyInfo DynamicChunked::info() const {
  return {"dynamic", {{"chunk", index_or(chunk_param_, "loop")}}, true};
}

//===----------------------------------------------------------------------===//
// SelfSched
//===----------------------------------------------------------------------===//

void SelfSched::init(const LoopDescriptor &loop, int team_size,
                     LoopRecord &record) {
  (void)record;
  start(loop, team_size);
  cursor_ = 0;
}

std::optional<Chunk> SelfSched::next(int thread_id) {
  (void)thread_id;
  std::lock_guard lock(mutex_);
  if (cursor_ >= total_iterations()) {
    return std::nullopt;
  }
  return take(cursor_++, 1);
}

StrategyInfo SelfSched::info() const { return {"ss", {}, true}; }

//===----------------------------------------------------------------------===//
// Guided
//===----------------------------------------------------------------------===//

Guided::Guided(std::optional<Index> min_chunk)
    : min_chunk_(min_chunk.value_or(1)) {
  if (min_chunk_ < 1) {
    throw ConfigError("guided min chunk must be >= 1");
  }
}

void Guided::init(const LoopDescriptor &loop, int team_size,
                  LoopRecord &record) {
  (void)record;
  start(loop, team_size);
  remaining_ = total_iterations();
}

std::optional<Chunk> Guided::next(int thread_id) {
  (void)thread_id;
  std::lock_guard lock(mutex_);
  if (remaining_ <= 0) {
    return std::nullopt;
  }
  Index size = std::max(min_chunk_, ceil_div(remaining_, team_size()));
  size = std::min(size, remaining_);
  const Index first = total_iterations() - remaining_;
  remaining_ -= size;
  return take(first, size);
}

StrategyInfo Guided::info() const {
  return {"guided", {{"min_chunk", std::to_string(min_chunk_)}}, true};
}

//===----------------------------------------------------------------------===//
// Trapezoid
//===----------------------------------------------------------------------===//

Trapezoid::Trapezoid(std::optional<Index> first, std::optional<Index> last)
    : first_param_(first), last_param_(last) {
  if (last_param_ && *last_param_ < 1) {
    throw ConfigError("tss last chunk must be >= 1");
  }
  if (first_param_ && last_param_ && *first_param_ < *last_param_) {
    throw ConfigError("tss first chunk must be >= last chunk");
  }
}

void Trapezoid::init(const LoopDescriptor &loop, int team_size,
                     LoopRecord &record) {
  (void)record;
  start(loop, team_size);
  const Index n = total_iterations();
  last_ = last_param_.value_or(1);
  first_ = first_param_.value_or(
      std::max(last_, ceil_div(std::max<Index>(n, 1), 2 * team_size)));
  if (first_ < last_) {
    throw ConfigError("tss first chunk must be >= last chunk");
  }
  planned_chunks_ = std::max<Index>(1, ceil_div(2 * n, first_ + last_));
  dequeues_ = 0;
  remaining_ = n;
}

std::optional<Chunk> Trapezoid::next(int thread_id) {
  (void)thread_id;
  std::lock_guard lock(mutex_);
  if (remaining_ <= 0) {
    return std::nullopt;
  }
  // size_k = round-half-up(first - k*delta), delta = (first-last)/(C-1)
  // held exactly as the rational (first*(C-1) - k*(first-last)) / (C-1).
  Index planned = first_;
  if (planned_chunks_ > 1) {
    const Index den = planned_chunks_ - 1;
    const Index num = first_ * den - dequeues_ * (first_ - last_);
    planned = num > 0 ? round_half_up(num, den) : 1;
  }
  planned = std::max<Index>(planned, 1);
  const Index size = std::min(planned, remaining_);
  const Index first = total_iterations() - remaining_;
  remaining_ -= size;
  ++dequeues_;
  return take(first, size);
}

StrategyInfo Trapezoid::info() const {
  return {"tss",
          {{"first", index_or(first_param_, "auto")},
           {"last", index_or(last_param_, "auto")}},
          true};
}

//===----------------------------------------------------------------------===//
// Fac2
//===----------------------------------------------------------------------===//

void Fac2::init(const LoopDescriptor &loop, int team_size, LoopRecord &record) {
  (void)record;
  start(loop, team_size);
  remaining_ = total_iterations();
  batch_chunk_ = 0;
  batch_left_ = 0;
}

std::optional<Chunk> Fac2::next(int thread_id) {
  (void)thread_id;
  std::lock_guard lock(mutex_);
  if (remaining_ <= 0) {
    return std::nullopt;
  }
  if (batch_left_ == 0) {
    batch_chunk_ = std::max<Index>(1, ceil_div(remaining_, 2 * team_size()));
    batch_left_ = team_size();
  }
  const Index size = std::min(batch_chunk_, remaining_);
  const Index first = total_iterations() - remaining_;
  remaining_ -= size;
  --batch_left_;
  return take(first, size);
}

StrategyInfo Fac2::info() const { return {"fac2", {}, true}; }

//===----------------------------------------------------------------------===//
// Wf2
//===----------------------------------------------------------------------===//

Wf2::Wf2(std::optional<std::vector<double>> weights)
    : weights_param_(std::move(weights)) {
  if (weights_param_) {
    WeightVector check(*weights_param_); // validates positivity
  }
}

void Wf2::plan_shares(const std::vector<double> &weights) {
  const int team = team_size();
  active_weights_ = WeightVector(weights).values();
  shares_.assign(static_cast<std::size_t>(team), {});
  share_pos_.assign(static_cast<std::size_t>(team), 0);

  Index remaining = total_iterations();
  Index cursor = 0;
  while (remaining > 0) {
    const Index batch_chunk = std::max<Index>(1, ceil_div(remaining, 2 * team));
    for (int t = 0; t < team && remaining > 0; ++t) {
      Index share = std::max<Index>(
          1, round_half_up(active_weights_[static_cast<std::size_t>(t)] *
                           static_cast<double>(batch_chunk)));
      share = std::min(share, remaining);
      shares_[static_cast<std::size_t>(t)].push_back(Chunk{cursor, share, 0});
      cursor += share;
      remaining -= share;
    }
  }
}

void Wf2::init(const LoopDescriptor &loop, int team_size, LoopRecord &record) {
  (void)record;
  start(loop, team_size);
  std::vector<double> weights =
      weights_param_.value_or(std::vector<double>(
          static_cast<std::size_t>(team_size), 1.0));
  if (weights.size() != static_cast<std::size_t>(team_size)) {
    throw ConfigError("wf2 weight count " + std::to_string(weights.size()) +
                      " does not match team size " +
                      std::to_string(team_size));
  }
  plan_shares(weights);
}

std::optional<Chunk> Wf2::next(int thread_id) {
  auto &pos = share_pos_[static_cast<std::size_t>(thread_id)];
  const auto &mine = shares_[static_cast<std::size_t>(thread_id)];
  if (pos >= mine.size()) {
    return std::nullopt;
  }
  const Chunk planned = mine[pos++];
  return take(planned.first, planned.size);
}

std::string Wf2::weights_echo() const {
  if (!weights_param_) {
    return "uniform";
  }
  std::string echo;
  for (std::size_t i = 0; i < weights_param_->size(); ++i) {
    if (i > 0) {
      echo += ':';
    }
    echo += std::to_string((*weights_param_)[i]);
  }
  return echo;
}

StrategyInfo Wf2::info() const {
  return {"wf2", {{"weights", weights_echo()}}, false};
}

//===----------------------------------------------------------------------===//
// RandChunk
//===----------------------------------------------------------------------===//

RandChunk::RandChunk(std::optional<Index> lo, std::optional<Index> hi,
                     std::uint64_t seed)
    : lo_param_(lo), hi_param_(hi), seed_(seed) {
  if (lo_param_ && *lo_param_ < 1) {
    throw ConfigError("rand lower bound must be >= 1");
  }
  if (lo_param_ && hi_param_ && *lo_param_ > *hi_param_) {
    throw ConfigError("rand bounds must satisfy lo <= hi");
  }
}

void RandChunk::init(const LoopDescriptor &loop, int team_size,
                     LoopRecord &record) {
  (void)record;
  start(loop, team_size);
  lo_ = lo_param_.value_or(1);
  hi_ = hi_param_.value_or(std::max(
      lo_, ceil_div(std::max<Index>(total_iterations(), 1), 2 * team_size)));
  if (lo_ > hi_) {
    throw ConfigError("rand bounds must satisfy lo <= hi");
  }
  gen_.seed(seed_);
  cursor_ = 0;
}

std::optional<Chunk> RandChunk::next(int thread_id) {
  (void)thread_id;
  std::lock_guard lock(mutex_);
  if (cursor_ >= total_iterations()) {
    return std::nullopt;
  }
  const auto span = static_cast<std::uint64_t>(hi_ - lo_ + 1);
  Index size = lo_ + static_cast<Index>(gen_() % span);
  size = std::min(size, total_iterations() - cursor_);
  const Index first = cursor_;
  cursor_ += size;
  return take(first, size);
}

StrategyInfo RandChunk::info() const {
  return {"rand",
          {{"lo", index_or(lo_param_, "auto")},
           {"hi", index_or(hi_param_, "auto")},
           {"seed", std::to_string(seed_)}},
          false};
}

//===----------------------------------------------------------------------===//
// Awf
//===----------------------------------------------------------------------===//

void Awf::init(const LoopDescriptor &loop, int team_size, LoopRecord &record) {
  start(loop, team_size);
  previous_weights_ = record.weights_or_uniform(team_size);
  busy_.assign(static_cast<std::size_t>(team_size), 0.0);
  iters_.assign(static_cast<std::size_t>(team_size), 0.0);
  plan_shares(previous_weights_);
}

void Awf::end_chunk(int thread_id, const Chunk &chunk, double elapsed) {
  busy_[static_cast<std::size_t>(thread_id)] += elapsed;
  iters_[static_cast<std::size_t>(thread_id)] +=
      static_cast<double>(chunk.size);
}

void Awf::fini(LoopRecord &record) {
  const std::size_t team = busy_.size();
  double rate_sum = 0.0;
  std::size_t measured = 0;
  std::vector<double> rates(team, 0.0);
  for (std::size_t t = 0; t < team; ++t) {
    if (busy_[t] > 0.0 && iters_[t] > 0.0) {
      rates[t] = iters_[t] / busy_[t];
      rate_sum += rates[t];
      ++measured;
    }
  }
  if (measured == 0 || rate_sum <= 0.0) {
    record.weights = previous_weights_;
    return;
  }
  // Measured threads get P * r_t / sum(r); idle threads keep their previous
  // weight; the final store renormalizes the mix back to sum = P.
  std::vector<double> updated(team, 0.0);
  for (std::size_t t = 0; t < team; ++t) {
    updated[t] = rates[t] > 0.0
                     ? static_cast<double>(team) * rates[t] / rate_sum
                     : previous_weights_[t];
  }
  store_weights_normalized(record, updated);
}

StrategyInfo Awf::info() const { return {"awf", {}, false}; }

//===----------------------------------------------------------------------===//
// Registry
//===----------------------------------------------------------------------===//

namespace {

Index parse_index(std::string_view text, const char *what) {
  Index value = 0;
  const auto *begin = text.data();
  const auto *end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(std::string("expected an integer for ") + what +
                      ", got '" + std::string(text) + "'");
  }
  return value;
}

double parse_real(std::string_view text, const char *what) {
  try {
    std::size_t used = 0;
    const std::string owned(text);
    const double value = std::stod(owned, &used);
    if (used != owned.size()) {
      throw std::invalid_argument(owned);
    }
    return value;
  } catch (const std::exception &) {
    throw ConfigError(std::string("expected a number for ") + what +
                      ", got '" + std::string(text) + "'");
  }
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t pos = text.find(sep, begin);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(begin));
      break;
    }
    parts.push_back(text.substr(begin, pos - begin));
    begin = pos + 1;
  }
  return parts;
}

} // namespace

const std::vector<std::string> &registered_names() {
  static const std::vector<std::string> names = {
      "static", "static-cyclic", "dynamic", "ss",   "guided",
      "tss",    "fac2",          "wf2",     "rand", "awf"};
  return names;
}

std::unique_ptr<Scheduler> make_scheduler(std::string_view spec,
                                          const RegistryOptions &options) {
  const std::size_t comma = spec.find(',');
  const std::string_view token = spec.substr(0, comma);
  const std::string_view params =
      comma == std::string_view::npos ? std::string_view{}
                                      : spec.substr(comma + 1);
  const bool has_params = comma != std::string_view::npos;

  auto one_index = [&](const char *what) -> std::optional<Index> {
    if (!has_params) {
      return options.default_chunk;
    }
    return parse_index(params, what);
  };

  if (token == "static") {
    return std::make_unique<StaticBlock>(one_index("static chunk"));
  }
  if (token == "static-cyclic") {
    return std::make_unique<StaticCyclic>();
  }
  if (token == "dynamic") {
    return std::make_unique<DynamicChunked>(one_index("dynamic chunk"));
  }
  if (token == "ss") {
    return std::make_unique<SelfSched>();
  }
  if (token == "guided") {
    return std::make_unique<Guided>(one_index("guided min chunk"));
  }
  if (token == "tss") {
    if (!has_params) {
      return std::make_unique<Trapezoid>();
    }
    const auto parts = split(params, ':');
    if (parts.size() > 2) {
      throw ConfigError("tss takes at most 'first:last', got '" +
                        std::string(params) + "'");
    }
    std::optional<Index> first = parse_index(parts[0], "tss first chunk");
    std::optional<Index> last =
        parts.size() == 2
            ? std::optional<Index>(parse_index(parts[1], "tss last chunk"))
            : std::nullopt;
    return std::make_unique<Trapezoid>(first, last);
  }
  if (token == "fac2") {
    return std::make_unique<Fac2>();
  }
  if (token == "wf2") {
    if (!has_params) {
      return std::make_unique<Wf2>();
    }
    std::vector<double> weights;
    for (const auto part : split(params, ':')) {
      weights.push_back(parse_real(part, "wf2 weight"));
    }
    return std::make_unique<Wf2>(std::move(weights));
  }
  if (token == "rand") {
    if (!has_params) {
      return std::make_unique<RandChunk>(std::nullopt, std::nullopt,
                                         options.seed);
    }
    const auto parts = split(params, ':');
    if (parts.size() != 2) {
      throw ConfigError("rand takes 'lo:hi', got '" + std::string(params) +
                        "'");
    }
    return std::make_unique<RandChunk>(parse_index(parts[0], "rand lo"),
                                       parse_index(parts[1], "rand hi"),
                                       options.seed);
  }
  if (token == "awf") {
    return std::make_unique<Awf>();
  }

  std::string known;
  for (const auto &name : registered_names()) {
    if (!known.empty()) {
      known += ", ";
    }
    known += name;
  }
  throw ConfigError("unknown schedule '" + std::string(token) +
                    "'; known schedules: " + known);
}

} // namespace selfsched
