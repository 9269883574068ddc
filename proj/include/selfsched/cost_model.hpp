//===-- cost_model.hpp - Synthetic iteration cost models -----------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// Deterministic per-iteration cost generators. The simulator charges
/// cost(i) virtual ticks per iteration; real-mode benchmarks can spin for
/// the same profile. Stochastic variants hash (seed, i) into the draw, so
/// cost(i) never depends on evaluation order or thread assignment.
///
//===----------------------------------------------------------------------===//

#pragma once

#include "selfsched/loop.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace selfsched {

/// Iteration body: performs the work of one source index on a thread.
using BodyCallback = std::function<void(int thread_id, Index source_index)>;

/// A per-iteration cost function in virtual ticks, floored at 1 tick.
///
/// Variants and their CLI grammar:
///   constant(c)            "constant:5"
///   linear(a, b)           "linear:1:2"        cost = a + b*i
///   uniform(lo, hi)        "uniform:1:10:7"    uniform in [lo, hi), seed 7
///   gaussian(mean, sd)     "gaussian:10:3:7"
///   exponential(mean)      "exponential:10:7"
class CostModel {
public:
  static CostModel constant(double c);
  static CostModel linear(double a, double b);
  static CostModel uniform(double lo, double hi, std::uint64_t seed);
  static CostModel gaussian(double mean, double stddev, std::uint64_t seed);
  static CostModel exponential(double mean, std::uint64_t seed);

  /// Parses the CLI grammar. Stochastic variants may omit the trailing
  /// seed, in which case `default_seed` applies. Throws ConfigError with
  /// the expected grammar on malformed specs.
  static CostModel parse(std::string_view spec, std::uint64_t default_seed = 0);

  /// Cost of iteration i in ticks; pure in (parameters, seed, i) and >= 1.
  double cost(Index i) const;

  /// Canonical spec string, e.g. "uniform:1:10:7".
  std::string spec() const;

private:
  enum class Kind { Constant, Linear, Uniform, Gaussian, Exponential };

  CostModel(Kind kind, double p0, double p1, std::uint64_t seed)
      : kind_(kind), p0_(p0), p1_(p1), seed_(seed) {}

  Kind kind_;
  double p0_;
  double p1_;
  std::uint64_t seed_;
};

/// Builds a real-mode body that busy-waits roughly cost(i) calibrated
/// ticks for the loop's iteration i. The tick length in nanoseconds is
/// configurable; spin calibration runs once per process.
BodyCallback as_spin_body(const CostModel &model, const LoopDescriptor &loop,
                          double ns_per_tick = 100.0);

} // namespace selfsched
