//===-- history.cpp - Cross-invocation loop history ---------------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "selfsched/history.hpp"

#include <json.hpp>

#include <limits>
#include <numeric>

namespace selfsched {

namespace {

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return out;
}

} // namespace

void LoopRecord::reset_stats(int team_size) {
  thread_stats.assign(static_cast<std::size_t>(team_size), ThreadStats{});
}

std::vector<double> LoopRecord::weights_or_uniform(int team_size) const {
  if (weights.size() == static_cast<std::size_t>(team_size)) {
    return weights;
  }
  return std::vector<double>(static_cast<std::size_t>(team_size), 1.0);
}

void history_record_chunk(LoopRecord &record, int thread_id,
                          const Chunk &chunk, double elapsed) {
  auto &stats = record.thread_stats.at(static_cast<std::size_t>(thread_id));
  stats.busy += elapsed;
  stats.iters = saturating_add(stats.iters, static_cast<std::uint64_t>(chunk.size));
  stats.chunks = saturating_add(stats.chunks, 1);
}

void store_weights_normalized(LoopRecord &record, std::span<const double> raw) {
  if (raw.empty()) {
    throw ConfigError("weight vector must not be empty");
  }
  double sum = 0.0;
  for (double w : raw) {
    if (!(w > 0.0)) {
      throw ConfigError("weights must be positive");
    }
    sum += w;
  }
  const double scale = static_cast<double>(raw.size()) / sum;
  record.weights.assign(raw.begin(), raw.end());
  for (double &w : record.weights) {
    w *= scale;
  }
}

LoopRecord &HistoryStore::at_site(const std::string &site_id) {
  auto [it, inserted] = records_.try_emplace(site_id);
  if (inserted) {
    it->second.site_id = site_id;
  }
  return it->second;
}

namespace {

nlohmann::json record_json(const LoopRecord &record) {
  nlohmann::json per_thread = nlohmann::json::array();
  for (const ThreadStats &st : record.thread_stats) {
    per_thread.push_back(
        {{"busy", st.busy}, {"iters", st.iters}, {"chunks", st.chunks}});
  }
  return {{"site_id", record.site_id},
          {"invocation_count", record.invocation_count},
          {"weights", record.weights},
          {"per_thread", per_thread}};
}

} // namespace

std::string loop_record_to_json(const LoopRecord &record) {
  return record_json(record).dump();
}

std::string history_to_json(const HistoryStore &store) {
  nlohmann::json all = nlohmann::json::array();
  for (const auto &[site, record] : store.records()) {
    all.push_back(record_json(record));
  }
  return all.dump();
}

} // namespace selfsched
