//===-- cost_model.cpp - Synthetic iteration cost models -----------*- C++ -*-===//
//
// Part of the selfsched project, under the Apache License v2.0 with LLVM
// Exceptions. See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "selfsched/cost_model.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

namespace selfsched {

namespace {

constexpr double kCostFloor = 1.0;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Two order-independent uniform draws in [0, 1) for iteration i.
std::pair<double, double> hashed_uniforms(std::uint64_t seed, Index i) {
  const std::uint64_t base = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(i)));
  const std::uint64_t a = splitmix64(base);
  const std::uint64_t b = splitmix64(base + 1);
  constexpr double scale = 0x1.0p-53;
  return {static_cast<double>(a >> 11) * scale,
          static_cast<double>(b >> 11) * scale};
}

double parse_number(std::string_view text, const char *grammar) {
  try {
    std::size_t used = 0;
    const std::string owned(text);
    const double value = std::stod(owned, &used);
    if (used != owned.size()) {
      throw std::invalid_argument(owned);
    }
    return value;
  } catch (const std::exception &) {
    throw ConfigError(std::string("bad workload parameter '") +
                      std::string(text) + "'; expected " + grammar);
  }
}

std::uint64_t parse_seed(std::string_view text, const char *grammar) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(std::string("bad workload seed '") + std::string(text) +
                      "'; expected " + grammar);
  }
  return value;
}

std::string trim_number(double v) {
  std::string s = std::to_string(v);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') {
      s.pop_back();
    }
    if (s.back() == '.') {
      s.pop_back();
    }
  }
  return s;
}

} // namespace

CostModel CostModel::constant(double c) {
  return CostModel(Kind::Constant, c, 0.0, 0);
}

CostModel CostModel::linear(double a, double b) {
  return CostModel(Kind::Linear, a, b, 0);
}

CostModel CostModel::uniform(double lo, double hi, std::uint64_t seed) {
  if (lo > hi) {
    throw ConfigError("uniform workload requires lo <= hi");
  }
  return CostModel(Kind::Uniform, lo, hi, seed);
}

CostModel CostModel::gaussian(double mean, double stddev, std::uint64_t seed) {
  if (mean <= 0.0) {
    throw ConfigError("gaussian workload requires mean > 0");
  }
  if (stddev < 0.0) {
    throw ConfigError("gaussian workload requires stddev >= 0");
  }
  return CostModel(Kind::Gaussian, mean, stddev, seed);
}

CostModel CostModel::exponential(double mean, std::uint64_t seed) {
  if (mean <= 0.0) {
    throw ConfigError("exponential workload requires mean > 0");
  }
  return CostModel(Kind::Exponential, mean, 0.0, seed);
}

double CostModel::cost(Index i) const {
  double value = kCostFloor;
  switch (kind_) {
  case Kind::Constant:
    value = p0_;
    break;
  case Kind::Linear:
    value = p0_ + p1_ * static_cast<double>(i);
    break;
  case Kind::Uniform: {
    const auto [u, _] = hashed_uniforms(seed_, i);
    value = p0_ + u * (p1_ - p0_);
    break;
  }
  case Kind::Gaussian: {
    const auto [u1, u2] = hashed_uniforms(seed_, i);
    const double z = std::sqrt(-2.0 * std::log1p(-u1)) *
                     std::cos(2.0 * std::numbers::pi * u2);
    value = p0_ + p1_ * z;
    break;
  }
  case Kind::Exponential: {
    const auto [u, _] = hashed_uniforms(seed_, i);
    value = -p0_ * std::log1p(-u);
    break;
  }
  }
  return std::max(value, kCostFloor);
}

CostModel CostModel::parse(std::string_view spec, std::uint64_t default_seed) {
  static constexpr const char *kGrammar =
      "constant:<c> | linear:<a>:<b> | uniform:<lo>:<hi>[:<seed>] | "
      "gaussian:<mean>:<stddev>[:<seed>] | exponential:<mean>[:<seed>]";

  std::vector<std::string_view> parts;
  std::size_t begin = 0;
  while (begin <= spec.size()) {
    const std::size_t pos = spec.find(':', begin);
    if (pos == std::string_view::npos) {
      parts.push_back(spec.substr(begin));
      break;
    }
    parts.push_back(spec.substr(begin, pos - begin));
    begin = pos + 1;
  }

  const std::string_view name = parts[0];
  const std::size_t argc = parts.size() - 1;
  auto arg = [&](std::size_t idx) { return parse_number(parts[idx + 1], kGrammar); };
  auto seed_arg = [&](std::size_t idx) {
    return idx < argc ? parse_seed(parts[idx + 1], kGrammar) : default_seed;
  };

  if (name == "constant" && argc == 1) {
    return constant(arg(0));
  }
  if (name == "linear" && argc == 2) {
    return linear(arg(0), arg(1));
  }
  if (name == "uniform" && (argc == 2 || argc == 3)) {
    return uniform(arg(0), arg(1), seed_arg(2));
  }
  if (name == "gaussian" && (argc == 2 || argc == 3)) {
    return gaussian(arg(0), arg(1), seed_arg(2));
  }
  if (name == "exponential" && (argc == 1 || argc == 2)) {
    return exponential(arg(0), seed_arg(1));
  }
  throw ConfigError("bad workload spec '" + std::string(spec) +
                    "'; expected " + kGrammar);
}

std::string CostModel::spec() const {
  switch (kind_) {
  case Kind::Constant:
    return "constant:" + trim_number(p0_);
  case Kind::Linear:
    return "linear:" + trim_number(p0_) + ":" + trim_number(p1_);
  case Kind::Uniform:
    return "uniform:" + trim_number(p0_) + ":" + trim_number(p1_) + ":" +
           std::to_string(seed_);
  case Kind::Gaussian:
    return "gaussian:" + trim_number(p0_) + ":" + trim_number(p1_) + ":" +
           std::to_string(seed_);
  case Kind::Exponential:
    return "exponential:" + trim_number(p0_) + ":" + std::to_string(seed_);
  }
  return {};
}

namespace {

// Iterations of the dummy spin loop per nanosecond, measured once.
double spin_rate_per_ns() {
  static std::once_flag flag;
  static double rate = 1.0;
  std::call_once(flag, [] {
    using clock = std::chrono::steady_clock;
    volatile std::uint64_t sink = 0;
    const auto begin = clock::now();
    std::uint64_t iters = 0;
    while (std::chrono::duration_cast<std::chrono::microseconds>(clock::now() -
                                                                 begin)
               .count() < 2000) {
      for (int i = 0; i < 1024; ++i) {
        sink = sink + 1;
      }
      iters += 1024;
    }
    const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                        clock::now() - begin)
                        .count();
    rate = std::max(1e-3, static_cast<double>(iters) / static_cast<double>(ns));
  });
  return rate;
}

} // namespace

BodyCallback as_spin_body(const CostModel &model, const LoopDescriptor &loop,
                          double ns_per_tick) {
  const CanonicalLoop canon = canonicalize(loop.lower, loop.upper, loop.stride);
  const double rate = spin_rate_per_ns();
  return [model, canon, ns_per_tick, rate](int, Index source_index) {
    const Index k = (source_index - canon.origin) / canon.stride;
    const double ticks = model.cost(k);
    const auto spins =
        static_cast<std::uint64_t>(ticks * ns_per_tick * rate);
    volatile std::uint64_t sink = 0;
    for (std::uint64_t s = 0; s < spins; ++s) {
      sink = sink + 1;
    }
  };
}

} // namespace selfsched
