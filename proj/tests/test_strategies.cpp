//===-- test_strategies.cpp - Strategy law tests ----------------------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "helpers.hpp"

#include <doctest.h>

#include <map>
#include <numeric>
#include <random>
#include <set>

using namespace selfsched;
using namespace testutil;

namespace {

std::vector<Index> sizes_of(const std::vector<oracle::PlannedChunk> &chunks) {
  std::vector<Index> sizes;
  for (const auto &c : chunks) {
    sizes.push_back(c.size);
  }
  return sizes;
}

std::set<Index> thread_iterations(const ExecutionReport &report, int thread) {
  std::set<Index> covered;
  for (const auto &e : report.chunk_log) {
    if (e.thread == thread) {
      for (Index k = e.first; k < e.first + e.size; ++k) {
        covered.insert(k);
      }
    }
  }
  return covered;
}

} // namespace

TEST_CASE("static block: fixed round-robin assignment") {
  SUBCASE("default chunk is ceil(N/P)") {
    StaticBlock strategy;
    const auto report = run_sim(strategy, 100, 4);
    CHECK(thread_iterations(report, 0) == [] {
      std::set<Index> want;
      for (Index i = 0; i < 25; ++i) {
        want.insert(i);
      }
      return want;
    }());
    CHECK(thread_iterations(report, 3) == [] {
      std::set<Index> want;
      for (Index i = 75; i < 100; ++i) {
        want.insert(i);
      }
      return want;
    }());
    CHECK(report.chunk_log.size() == 4);
  }

  SUBCASE("explicit chunk round-robins") {
    StaticBlock strategy(10);
    const auto report = run_sim(strategy, 100, 4);
    std::vector<oracle::PlannedChunk> mine;
    for (const auto &c : issued_by_first(report)) {
      if (c.thread == 0) {
        mine.push_back(c);
      }
    }
    REQUIRE(mine.size() == 3);
    CHECK(mine[0].first == 0);
    CHECK(mine[1].first == 40);
    CHECK(mine[2].first == 80);
    for (const auto &c : mine) {
      CHECK(c.size == 10);
    }
  }

  SUBCASE("more threads than work leaves trailing threads idle") {
    StaticBlock strategy;
    const auto report = run_sim(strategy, 5, 8);
    for (int t = 5; t < 8; ++t) {
      CHECK(thread_iterations(report, t).empty());
    }
    CHECK(report.chunk_log.size() == 5);
  }

  SUBCASE("assignment is a pure function of (N, P, chunk)") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      const Index n = static_cast<Index>(rng() % 2000);
      const int p = 1 + static_cast<int>(rng() % 8);
      const bool chunked = rng() % 2 == 0;
      const std::optional<Index> chunk =
          chunked ? std::optional<Index>(1 + static_cast<Index>(rng() % 40))
                  : std::nullopt;
      StaticBlock a(chunk);
      StaticBlock b(chunk);
      // different speeds change dequeue order but must not change ownership
      const auto r1 = run_sim(a, n, p);
      const auto r2 = run_sim(b, n, p, CostModel::constant(1),
                              [&] {
                                std::vector<double> s(
                                    static_cast<std::size_t>(p), 1.0);
                                s[0] = 0.25;
                                return s;
                              }());
      CHECK(same_positions(issued_by_first(r1), issued_by_first(r2), true));
      CHECK(same_positions(issued_by_first(r1),
                           oracle::static_block(n, p, chunk), true));
    }
  }
}

TEST_CASE("static cyclic: iteration i runs on thread i mod P") {
  SUBCASE("N=6 P=2 splits odd/even") {
    StaticCyclic strategy;
    const auto report = run_sim(strategy, 6, 2);
    CHECK(thread_iterations(report, 0) == std::set<Index>{0, 2, 4});
    CHECK(thread_iterations(report, 1) == std::set<Index>{1, 3, 5});
  }
  SUBCASE("single iteration goes to thread 0") {
    StaticCyclic strategy;
    const auto report = run_sim(strategy, 1, 4);
    CHECK(report.chunk_log.size() == 1);
    CHECK(report.chunk_log[0].thread == 0);
  }
  SUBCASE("empty loop yields nothing") {
    StaticCyclic strategy;
    const auto report = run_sim(strategy, 0, 4);
    CHECK(report.chunk_log.empty());
  }
  SUBCASE("matches the oracle") {
    StaticCyclic strategy;
    const auto report = run_sim(strategy, 137, 5);
    CHECK(same_positions(issued_by_first(report), oracle::static_cyclic(137, 5),
                         true));
  }
}

TEST_CASE("dynamic chunked: shared counter in dequeue order") {
  SUBCASE("N=10 chunk=4 gives sizes 4,4,2") {
    DynamicChunked strategy(4);
    const auto report = run_sim(strategy, 10, 3);
    CHECK(chunk_size_sequence(report) == std::vector<Index>{4, 4, 2});
  }
  SUBCASE("chunk=1 equals self-scheduling stream") {
    DynamicChunked dynamic(1);
    SelfSched ss;
    const auto a = run_sim(dynamic, 23, 3);
    const auto b = run_sim(ss, 23, 3);
    CHECK(same_positions(issued_in_seq_order(a), issued_in_seq_order(b),
                         false));
  }
  SUBCASE("empty loop yields nothing") {
    DynamicChunked strategy(4);
    const auto report = run_sim(strategy, 0, 2);
    CHECK(report.chunk_log.empty());
  }
  SUBCASE("falls back to the loop chunk_param") {
    DynamicChunked strategy;
    HistoryStore history;
    LoopDescriptor loop{0, 9, 1, 4, "chunk-param"};
    const auto report =
        simulate(loop, strategy, CostModel::constant(1), sim_team(2), history);
    CHECK(chunk_size_sequence(report) == std::vector<Index>{4, 4, 1});
  }
}

TEST_CASE("self-scheduling: every chunk has size 1") {
  SelfSched strategy;
  const auto report = run_sim(strategy, 7, 3);
  CHECK(report.chunk_log.size() == 7);
  std::set<Index> all;
  for (const auto &e : report.chunk_log) {
    CHECK(e.size == 1);
    all.insert(e.first);
  }
  CHECK(all.size() == 7);

  SelfSched single;
  const auto one = run_sim(single, 1, 2);
  CHECK(chunk_size_sequence(one) == std::vector<Index>{1});
}

TEST_CASE("guided: chunk = max(min_chunk, ceil(R/P))") {
  SUBCASE("pinned opening sizes for N=100 P=4") {
    Guided strategy;
    const auto report = run_sim(strategy, 100, 4);
    const auto sizes = chunk_size_sequence(report);
    REQUIRE(sizes.size() >= 3);
    CHECK(sizes[0] == 25);
    CHECK(sizes[1] == 19);
    CHECK(sizes[2] == 14);
  }
  SUBCASE("N=P gives all ones") {
    Guided strategy;
    const auto report = run_sim(strategy, 4, 4);
    CHECK(chunk_size_sequence(report) == std::vector<Index>{1, 1, 1, 1});
  }
  SUBCASE("single iteration, single thread") {
    Guided strategy;
    const auto report = run_sim(strategy, 1, 1);
    CHECK(chunk_size_sequence(report) == std::vector<Index>{1});
  }
  SUBCASE("min chunk floors the law") {
    Guided strategy(8);
    const auto report = run_sim(strategy, 50, 4);
    const auto sizes = chunk_size_sequence(report);
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
      CHECK(sizes[i] >= 8);
    }
    CHECK(std::accumulate(sizes.begin(), sizes.end(), Index{0}) == 50);
    CHECK(same_positions(issued_in_seq_order(report),
                         oracle::guided(50, 4, 8), false));
  }
  SUBCASE("rejects min chunk < 1") {
    CHECK_THROWS_AS(Guided(0), ConfigError);
  }
}

TEST_CASE("trapezoid: linearly decreasing sizes") {
  SUBCASE("pinned plan for N=100 P=4") {
    Trapezoid strategy;
    HistoryStore history;
    LoopRecord &record = history.at_site("t");
    record.reset_stats(4);
    strategy.init(unit_loop(100, "t"), 4, record);
    CHECK(strategy.planned_chunk_count() == 15);

    const auto report = run_sim(strategy, 100, 4);
    const auto sizes = chunk_size_sequence(report);
    CHECK(sizes.front() == 13);
    CHECK(std::accumulate(sizes.begin(), sizes.end(), Index{0}) == 100);
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
      CHECK(sizes[i] >= sizes[i + 1]);
    }
  }
  SUBCASE("first == last degenerates to fixed-size chunking") {
    Trapezoid tss(5, 5);
    DynamicChunked dynamic(5);
    const auto a = run_sim(tss, 83, 4);
    const auto b = run_sim(dynamic, 83, 4);
    CHECK(same_positions(issued_in_seq_order(a), issued_in_seq_order(b),
                         false));
  }
  SUBCASE("single iteration gives one unit chunk") {
    Trapezoid strategy;
    const auto report = run_sim(strategy, 1, 4);
    CHECK(chunk_size_sequence(report) == std::vector<Index>{1});
  }
  SUBCASE("rejects first < last") {
    CHECK_THROWS_AS(Trapezoid(2, 5), ConfigError);
    CHECK_THROWS_AS(Trapezoid(std::nullopt, 0), ConfigError);
  }
  SUBCASE("matches the oracle across random instances") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 60; ++trial) {
      const Index n = 1 + static_cast<Index>(rng() % 3000);
      const int p = 1 + static_cast<int>(rng() % 16);
      Trapezoid strategy;
      const auto report = run_sim(strategy, n, p);
      const auto plan = oracle::tss(n, p);
      CHECK(same_positions(issued_in_seq_order(report), plan.chunks, false));
      // half-up rounding never undershoots the trapezoid area, so the
      // planned count C bounds the issued count from above
      CHECK(static_cast<Index>(report.chunk_log.size()) <=
            strategy.planned_chunk_count());
      CHECK(std::accumulate(plan.chunks.begin(), plan.chunks.end(), Index{0},
                            [](Index acc, const oracle::PlannedChunk &c) {
                              return acc + c.size;
                            }) == n);
    }
  }
}

TEST_CASE("fac2: halving batches of P equal chunks") {
  SUBCASE("pinned batch sizes for N=100 P=4") {
    Fac2 strategy;
    const auto report = run_sim(strategy, 100, 4);
    const std::vector<Index> expect = {13, 13, 13, 13, 6, 6, 6, 6, 3, 3,
                                       3,  3,  2,  2,  2, 2, 1, 1, 1, 1};
    CHECK(chunk_size_sequence(report) == expect);
  }
  SUBCASE("N=8 P=4 gives two batches of ones") {
    Fac2 strategy;
    const auto report = run_sim(strategy, 8, 4);
    CHECK(chunk_size_sequence(report) ==
          std::vector<Index>{1, 1, 1, 1, 1, 1, 1, 1});
  }
  SUBCASE("P=1 halves the remainder each dequeue") {
    Fac2 strategy;
    const auto report = run_sim(strategy, 100, 1);
    const auto sizes = chunk_size_sequence(report);
    REQUIRE(sizes.size() >= 3);
    CHECK(sizes[0] == 50);
    CHECK(sizes[1] == 25);
    CHECK(sizes[2] == 13);
  }
  SUBCASE("batch law holds on random instances") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 60; ++trial) {
      const Index n = 1 + static_cast<Index>(rng() % 3000);
      const int p = 1 + static_cast<int>(rng() % 16);
      Fac2 strategy;
      const auto report = run_sim(strategy, n, p);
      CHECK(same_positions(issued_in_seq_order(report), oracle::fac2(n, p),
                           false));
    }
  }
}

TEST_CASE("wf2: weighted shares inside fac2 batches") {
  SUBCASE("uniform weights are size-equivalent to fac2") {
    std::mt19937 rng(37);
    for (int trial = 0; trial < 40; ++trial) {
      const Index n = 1 + static_cast<Index>(rng() % 2500);
      const int p = 1 + static_cast<int>(rng() % 12);
      Wf2 wf2;
      Fac2 fac2;
      const auto a = run_sim(wf2, n, p);
      const auto b = run_sim(fac2, n, p);
      CHECK(same_positions(issued_by_first(a), issued_by_first(b), false));
    }
  }
  SUBCASE("uniform weights match fac2 per (thread, size) in lockstep") {
    Wf2 wf2;
    Fac2 fac2;
    const auto a = run_sim(wf2, 1000, 4);
    const auto b = run_sim(fac2, 1000, 4);
    std::map<std::pair<int, Index>, int> ma;
    std::map<std::pair<int, Index>, int> mb;
    for (const auto &e : a.chunk_log) {
      ++ma[{e.thread, e.size}];
    }
    for (const auto &e : b.chunk_log) {
      ++mb[{e.thread, e.size}];
    }
    CHECK(ma == mb);
  }
  SUBCASE("weighted shares scale the batch chunk") {
    // N=40, P=2: first batch chunk is ceil(40/4) = 10, so weights
    // (1.5, 0.5) reserve 15 and 5.
    Wf2 strategy(std::vector<double>{1.5, 0.5});
    const auto report = run_sim(strategy, 40, 2);
    const auto by_first = issued_by_first(report);
    REQUIRE(by_first.size() >= 2);
    CHECK(by_first[0].size == 15);
    CHECK(by_first[0].thread == 0);
    CHECK(by_first[1].size == 5);
    CHECK(by_first[1].thread == 1);
  }
  SUBCASE("input weights renormalize to sum P") {
    const WeightVector weights(std::vector<double>{3.0, 1.0});
    CHECK(weights[0] == doctest::Approx(1.5));
    CHECK(weights[1] == doctest::Approx(0.5));
  }
  SUBCASE("weight count must match the team") {
    Wf2 strategy(std::vector<double>{1.0, 1.0, 1.0});
    HistoryStore history;
    LoopRecord &record = history.at_site("w");
    record.reset_stats(2);
    CHECK_THROWS_AS(strategy.init(unit_loop(10, "w"), 2, record), ConfigError);
  }
  SUBCASE("matches the oracle under random weights") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> weight(0.2, 3.0);
    for (int trial = 0; trial < 40; ++trial) {
      const Index n = 1 + static_cast<Index>(rng() % 2500);
      const int p = 1 + static_cast<int>(rng() % 8);
      std::vector<double> w(static_cast<std::size_t>(p));
      for (double &x : w) {
        x = weight(rng);
      }
      Wf2 strategy(w);
      const auto report = run_sim(strategy, n, p);
      CHECK(same_positions(issued_by_first(report), oracle::wf2(n, p, w),
                           true));
    }
  }
}

TEST_CASE("rand: seeded uniform chunk sizes") {
  SUBCASE("degenerate bounds equal fixed-size chunking") {
    RandChunk rand(6, 6, 99);
    DynamicChunked dynamic(6);
    const auto a = run_sim(rand, 200, 3);
    const auto b = run_sim(dynamic, 200, 3);
    CHECK(same_positions(issued_in_seq_order(a), issued_in_seq_order(b),
                         false));
  }
  SUBCASE("same seed reproduces the chunk stream") {
    RandChunk a(1, 8, 1234);
    RandChunk b(1, 8, 1234);
    const auto ra = run_sim(a, 500, 4);
    const auto rb = run_sim(b, 500, 4);
    CHECK(ra.chunk_log == rb.chunk_log);
  }
  SUBCASE("sizes stay within bounds") {
    RandChunk strategy(3, 9, 5);
    const auto report = run_sim(strategy, 400, 4);
    const auto sizes = chunk_size_sequence(report);
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
      CHECK(sizes[i] >= 3);
      CHECK(sizes[i] <= 9);
    }
  }
  SUBCASE("empirical mean of draws approaches (lo+hi)/2") {
    // 1e4 draws from U{1..8}: sd of the sample mean is about 0.023,
    // so a 3-sigma box around 4.5 is +/- 0.069.
    RandChunk strategy(1, 8, 7);
    const auto report = run_sim(strategy, 100000, 4);
    const auto sizes = chunk_size_sequence(report);
    REQUIRE(sizes.size() >= 10000);
    double sum = 0.0;
    for (std::size_t i = 0; i < 10000; ++i) {
      sum += static_cast<double>(sizes[i]);
    }
    const double mean = sum / 10000.0;
    CHECK(mean == doctest::Approx(4.5).epsilon(0.07 / 4.5));
  }
  SUBCASE("rejects bad bounds") {
    CHECK_THROWS_AS(RandChunk(0, 5, 1), ConfigError);
    CHECK_THROWS_AS(RandChunk(6, 5, 1), ConfigError);
  }
}

TEST_CASE("awf: weights re-learned from measured rates") {
  SUBCASE("first invocation behaves exactly as fac2") {
    Awf awf;
    Fac2 fac2;
    const auto a = run_sim(awf, 777, 4);
    const auto b = run_sim(fac2, 777, 4);
    CHECK(same_positions(issued_by_first(a), issued_by_first(b), false));
  }
  SUBCASE("a 2x slower thread converges to half the weight") {
    HistoryStore history;
    Awf strategy;
    const LoopDescriptor loop = unit_loop(2000, "awf-conv");
    const TeamConfig team = sim_team(4, {1.0, 0.5, 1.0, 1.0});
    run_invocations(10, loop, strategy, CostModel::constant(1), team, history);
    const auto &weights = history.at_site("awf-conv").weights;
    REQUIRE(weights.size() == 4);
    const double ratio = weights[0] / weights[1];
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.10));
    CHECK(std::accumulate(weights.begin(), weights.end(), 0.0) ==
          doctest::Approx(4.0).epsilon(1e-9));
  }
  SUBCASE("homogeneous teams keep uniform weights") {
    HistoryStore history;
    Awf strategy;
    const LoopDescriptor loop = unit_loop(1000, "awf-flat");
    run_invocations(5, loop, strategy, CostModel::constant(1), sim_team(4),
                    history);
    for (double w : history.at_site("awf-flat").weights) {
      CHECK(w == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
  SUBCASE("zero measured work leaves weights unchanged") {
    HistoryStore history;
    Awf strategy;
    LoopRecord &record = history.at_site("awf-idle");
    record.reset_stats(2);
    store_weights_normalized(record, std::vector<double>{1.4, 0.6});
    strategy.init(unit_loop(0, "awf-idle"), 2, record);
    strategy.fini(record);
    CHECK(record.weights[0] == doctest::Approx(1.4));
    CHECK(record.weights[1] == doctest::Approx(0.6));
  }
}

TEST_CASE("strategies hold the sticky-termination contract") {
  std::mt19937 rng(43);
  for (const auto &name : registered_names()) {
    auto strategy = make_scheduler(name, {std::optional<Index>(3), 11});
    HistoryStore history;
    LoopRecord &record = history.at_site("sticky");
    const int p = 3;
    record.reset_stats(p);
    strategy->init(unit_loop(40, "sticky"), p, record);
    std::vector<bool> finished(p, false);
    int guard = 0;
    while (!std::all_of(finished.begin(), finished.end(),
                        [](bool b) { return b; }) &&
           guard++ < 1000) {
      const int t = static_cast<int>(rng() % p);
      if (finished[static_cast<std::size_t>(t)]) {
        // terminal state must be sticky for this thread
        CHECK_FALSE(strategy->next(t).has_value());
      } else if (!strategy->next(t)) {
        finished[static_cast<std::size_t>(t)] = true;
      }
    }
    strategy->fini(record);
  }
}

TEST_CASE("registry: exact tokens and parameter grammar") {
  CHECK(registered_names() ==
        std::vector<std::string>{"static", "static-cyclic", "dynamic", "ss",
                                 "guided", "tss", "fac2", "wf2", "rand",
                                 "awf"});

  CHECK(make_scheduler("dynamic,16")->info().parameters.at("chunk") == "16");
  CHECK(make_scheduler("tss,13:1")->info().parameters.at("first") == "13");
  CHECK(make_scheduler("rand,1:8")->info().parameters.at("hi") == "8");
  CHECK(make_scheduler("wf2,1.5:0.5")->info().name == "wf2");

  // a --chunk style default feeds chunked schedules that carry no suffix
  const RegistryOptions options{std::optional<Index>(7), 0};
  CHECK(make_scheduler("dynamic", options)->info().parameters.at("chunk") ==
        "7");

  CHECK_THROWS_AS(make_scheduler("fancy"), ConfigError);
  try {
    make_scheduler("fancy");
  } catch (const ConfigError &e) {
    const std::string message = e.what();
    for (const auto &name : registered_names()) {
      CHECK(message.find(name) != std::string::npos);
    }
  }
  CHECK_THROWS_AS(make_scheduler("dynamic,zero"), ConfigError);
  CHECK_THROWS_AS(make_scheduler("rand,5"), ConfigError);
  CHECK_THROWS_AS(make_scheduler("tss,1:2:3"), ConfigError);
}

TEST_CASE("monotone laws: guided, tss, fac2 sizes never increase") {
  std::mt19937 rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 4000);
    const int p = 1 + static_cast<int>(rng() % 16);
    for (const char *name : {"guided", "tss", "fac2"}) {
      auto strategy = make_scheduler(name);
      CHECK(strategy->info().monotonic_chunks);
      const auto report = run_sim(*strategy, n, p);
      const auto sizes = chunk_size_sequence(report);
      for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        REQUIRE(sizes[i] >= sizes[i + 1]);
      }
    }
  }
}
