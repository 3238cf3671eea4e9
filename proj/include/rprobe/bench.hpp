#pragma once

#include <chrono>
#include <cmath>
#include <vector>

#include "rprobe/decision.hpp"
#include "rprobe/dynamics.hpp"

namespace rprobe {

struct ApplyTiming {
  int pairs = 0;
  int n = 0;
  std::uint64_t dimension = 0;
  int repeats = 0;
  double seconds_per_apply = 0;
};

struct DipTiming {
  std::uint64_t N = 0;
  double first_dip_time = 0;
};

struct BenchReport {
  std::vector<ApplyTiming> apply;
  std::vector<DipTiming> dips;
  double exponent = 0;  // fitted alpha in T ~ N^alpha
};

// Vertex count with n(n-1)/2 == pairs; throws for non-triangular pair counts.
inline int vertices_for_pairs(int pairs) {
  for (int n = 2; n <= kMaxVertices; ++n)
    if (pair_count(n) == pairs) return n;
  throw ArgumentError("L=" + std::to_string(pairs) + " is not n(n-1)/2 for any supported n");
}

inline ApplyTiming time_apply(int pairs, int repeats, int max_pairs = default_max_pairs()) {
  const int n = vertices_for_pairs(pairs);
  const auto table = build_diagonal(n, 3, 3, max_pairs);
  const ModelParams params{n, 3, 3};
  const ProbeHamiltonian H(params, table);
  StateVector in = StateVector::initial(params), out(params.pairs());
  for (std::size_t i = 0; i < in.size(); ++i) in.amplitudes()[i] = Complex(1.0 / std::sqrt(double(in.size())), 0.0);
  H.apply(in.amplitudes(), out.amplitudes());  // warm-up
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) H.apply(in.amplitudes(), out.amplitudes());
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  return {pairs, n, H.dimension(), repeats, elapsed.count() / repeats};
}

inline BenchReport run_bench(const std::vector<int>& pair_sizes, int repeats, const std::vector<int>& dip_log_sizes,
                             double c = 0.02, double threshold = 0.5, int max_pairs = default_max_pairs()) {
  if (repeats < 1) throw ArgumentError("repeats must be >= 1");
  BenchReport report;
  for (int L : pair_sizes) report.apply.push_back(time_apply(L, repeats, max_pairs));
  std::vector<double> sizes, times;
  ModelParams params;
  params.coupling = c;
  for (int k : dip_log_sizes) {
    const std::uint64_t N = std::uint64_t{1} << k;
    const double t = first_dip_time(synthetic_two_level(N, 1), params, threshold);
    report.dips.push_back({N, t});
    sizes.push_back(static_cast<double>(N));
    times.push_back(t);
  }
  if (sizes.size() >= 2) report.exponent = fit_power_law(sizes, times);
  return report;
}

}  // namespace rprobe
