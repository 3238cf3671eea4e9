#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rprobe/errors.hpp"
#include "rprobe/graphs.hpp"

namespace rprobe {

// Physical parameters of the probe-coupled system (hbar = 1).
struct ModelParams {
  int n = 0;
  int x = 0;
  int y = 0;
  double omega = 1.0;      // probe frequency
  double epsilon0 = -1.0;  // reference-state eigenvalue
  double coupling = 0.02;  // c, must satisfy c << omega

  int pairs() const { return pair_count(n); }
  std::uint64_t register_size() const { return std::uint64_t{1} << pairs(); }

  // Throws on invalid values; returns soft warnings.
  std::vector<std::string> validate() const {
    if (!(coupling >= 0.0)) throw ArgumentError("coupling c must be non-negative");
    if (!(omega > 0.0)) throw ArgumentError("probe frequency omega must be positive");
    std::vector<std::string> warnings;
    if (coupling > omega / 10.0)
      warnings.push_back("coupling c=" + std::to_string(coupling) + " exceeds omega/10; reduced models lose accuracy");
    return warnings;
  }
};

struct ShotSampling {
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
};

// Probe survival probability P(t) sampled on a time grid.
struct DynamicsTrace {
  std::vector<double> times;
  std::vector<double> probs;
  ModelParams params;
  std::uint64_t register_size = 0;  // N
  std::string backend;
  std::uint64_t spectrum_digest = 0;
  std::optional<ShotSampling> sampling;
};

inline std::vector<double> uniform_grid(double t_max, std::size_t points) {
  if (points < 2) throw ArgumentError("time grid needs at least 2 points");
  if (!(t_max > 0.0)) throw ArgumentError("t_max must be positive");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) grid[i] = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

inline void check_grid(const std::vector<double>& grid) {
  if (grid.empty() || grid.front() != 0.0) throw ArgumentError("time grid must start at t=0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] >= grid[i - 1])) throw ArgumentError("time grid must be ascending");
}

// Replaces each P(t) by the mean of `shots` Bernoulli measurements.
inline void apply_shot_noise(DynamicsTrace& trace, ShotSampling sampling) {
  if (sampling.shots == 0) throw ArgumentError("shot count must be positive");
  std::mt19937_64 rng(sampling.seed);
  for (auto& p : trace.probs) {
    std::binomial_distribution<std::uint64_t> draw(sampling.shots, std::clamp(p, 0.0, 1.0));
    p = static_cast<double>(draw(rng)) / static_cast<double>(sampling.shots);
  }
  trace.sampling = sampling;
}

inline std::uint64_t trace_digest(const DynamicsTrace& trace) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](double v) {
    const auto* b = reinterpret_cast<const unsigned char*>(&v);
    for (std::size_t i = 0; i < sizeof(double); ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    mix(trace.times[i]);
    mix(trace.probs[i]);
  }
  return h;
}

}  // namespace rprobe
