#pragma once

// Diagonal of the problem Hamiltonian over all N = 2^L graph codes, its level
// structure, and the classical brute-force Ramsey oracle.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rprobe/errors.hpp"
#include "rprobe/graphs.hpp"

namespace rprobe {

inline constexpr int kDefaultMaxPairs = 21;

// Pair cap for table builds: RPROBE_MAX_L overrides the default of 21.
inline int default_max_pairs() {
  if (const char* env = std::getenv("RPROBE_MAX_L")) {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
      throw ArgumentError(std::string("RPROBE_MAX_L is not an integer: ") + env);
    }
  }
  return kDefaultMaxPairs;
}

struct DiagonalTable {
  int n = 0;
  int x = 0;
  int y = 0;
  std::vector<std::uint16_t> values;

  int pairs() const { return pair_count(n); }
  std::uint64_t size() const { return values.size(); }
  std::uint16_t operator[](std::uint64_t k) const { return values[k]; }

  friend bool operator==(const DiagonalTable&, const DiagonalTable&) = default;
};

struct Level {
  std::uint32_t energy = 0;
  std::uint64_t multiplicity = 0;

  friend bool operator==(const Level&, const Level&) = default;
};

struct Spectrum {
  std::vector<Level> levels;  // strictly ascending in energy
  std::uint64_t total = 0;    // N = sum of multiplicities

  std::size_t r() const { return levels.size(); }
  std::uint32_t E1() const { return levels.front().energy; }
  std::uint64_t m1() const { return levels.front().multiplicity; }

  // Synthetic spectra for the reduced models. Levels need not be sorted.
  static Spectrum from_levels(std::vector<Level> levels) {
    if (levels.empty()) throw ArgumentError("spectrum needs at least one level");
    std::sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) { return a.energy < b.energy; });
    Spectrum s;
    for (const auto& l : levels) {
      if (l.multiplicity == 0) throw ArgumentError("level multiplicity must be positive");
      if (!s.levels.empty() && s.levels.back().energy == l.energy)
        throw ArgumentError("duplicate level energy " + std::to_string(l.energy));
      s.levels.push_back(l);
      s.total += l.multiplicity;
    }
    return s;
  }

  friend bool operator==(const Spectrum&, const Spectrum&) = default;
};

namespace detail {

inline void check_problem(int n, int x, int y) {
  if (n < 2) throw ArgumentError("n must be >= 2, got " + std::to_string(n));
  if (x < 2 || y < 2)
    throw ArgumentError("x and y must be >= 2, got x=" + std::to_string(x) + " y=" + std::to_string(y));
}

}  // namespace detail

// Entry k is h(code k). Evaluated in contiguous chunks, one per worker, and
// written in place, so the result does not depend on the worker count.
inline DiagonalTable build_diagonal(int n, int x, int y, int max_pairs = default_max_pairs(),
                                    unsigned workers = std::thread::hardware_concurrency()) {
  detail::check_problem(n, x, y);
  const int L = pair_count(n);
  if (L > max_pairs || n > kMaxVertices)
    throw ResourceError("n=" + std::to_string(n) + " needs L=" + std::to_string(L) +
                        " pairs, above the cap of " + std::to_string(max_pairs) +
                        " (raise with --max-l or RPROBE_MAX_L)");
  const EnergyCounter h(n, x, y);
  const std::uint64_t N = std::uint64_t{1} << L;

  DiagonalTable table{n, x, y, std::vector<std::uint16_t>(N)};
  auto fill = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t k = begin; k < end; ++k) table.values[k] = static_cast<std::uint16_t>(h(k));
  };

  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::uint64_t>(1, N >> 12))));
  if (workers == 1) {
    fill(0, N);
    return table;
  }
  {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (N + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = std::min(N, w * chunk), end = std::min(N, begin + chunk);
      pool.emplace_back(fill, begin, end);
    }
  }
  return table;
}

inline Spectrum extract_levels(const DiagonalTable& table) {
  std::map<std::uint32_t, std::uint64_t> counts;
  for (auto v : table.values) ++counts[v];
  Spectrum s;
  for (const auto& [e, m] : counts) s.levels.push_back({e, m});
  s.total = table.size();
  return s;
}

// Codes whose energy equals `energy`, ascending. Second pass over the table.
inline std::vector<Code> level_members(const DiagonalTable& table, std::uint32_t energy) {
  std::vector<Code> codes;
  for (std::uint64_t k = 0; k < table.size(); ++k)
    if (table.values[k] == energy) codes.push_back(k);
  return codes;
}

inline std::vector<Code> minimizers(const DiagonalTable& table, const Spectrum& spectrum) {
  return level_members(table, spectrum.E1());
}

struct ClassicalDecision {
  std::uint32_t E1 = 0;
  std::uint64_t m1 = 0;
  bool below = false;  // n < R(x, y)
};

inline ClassicalDecision classical_decide(int n, int x, int y, int max_pairs = default_max_pairs()) {
  const auto spectrum = extract_levels(build_diagonal(n, x, y, max_pairs));
  return {spectrum.E1(), spectrum.m1(), spectrum.E1() == 0};
}

// Conservative starting n for the incremental search: R(x,y) - 1 for the
// small known cases, max(x, y) otherwise, never below 2.
inline int lower_bound_start(int x, int y) {
  if (x < 2 || y < 2) throw ArgumentError("x and y must be >= 2");
  if (x > y) std::swap(x, y);
  if (x == 2) return std::max(2, y - 1);  // R(2,k) = k
  static const std::map<std::pair<int, int>, int> known = {
      {{3, 3}, 6},  {{3, 4}, 9},  {{3, 5}, 14}, {{3, 6}, 18}, {{3, 7}, 23},
      {{3, 8}, 28}, {{3, 9}, 36}, {{4, 4}, 18}, {{4, 5}, 25},
  };
  if (auto it = known.find({x, y}); it != known.end()) return it->second - 1;
  return std::max(x, y);
}

}  // namespace rprobe
