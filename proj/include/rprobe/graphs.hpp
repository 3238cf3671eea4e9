#pragma once

// Bit-vector encoding of n-vertex graphs and exact x-clique / y-independent
// set counting.
//
// Edge bit k corresponds to the k-th vertex pair in the order
// (1,2),(1,3),...,(1,n),(2,3),...,(n-1,n); bit 0 (LSB) is pair (1,2).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <regex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rprobe/errors.hpp"

namespace rprobe {

using Code = std::uint64_t;

// Largest vertex count whose edge vector fits in a 64-bit code.
inline constexpr int kMaxVertices = 11;

constexpr int pair_count(int n) { return n * (n - 1) / 2; }

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

struct GraphCode {
  Code bits = 0;
  int n = 0;

  // Validating constructor; throws ArgumentError on out-of-range input.
  static GraphCode make(Code bits, int n) {
    if (n < 2 || n > kMaxVertices)
      throw ArgumentError("vertex count " + std::to_string(n) + " outside [2, " +
                          std::to_string(kMaxVertices) + "]");
    const int L = pair_count(n);
    if (L < 64 && (bits >> L) != 0)
      throw ArgumentError("code " + std::to_string(bits) + " has bits beyond L=" + std::to_string(L));
    return GraphCode{bits, n};
  }

  int pairs() const { return pair_count(n); }
  Code full_mask() const { return pairs() == 64 ? ~Code{0} : (Code{1} << pairs()) - 1; }
  bool has_edge(int v, int v2) const;

  friend bool operator==(const GraphCode&, const GraphCode&) = default;
};

struct CountTriple {
  std::uint64_t cliques = 0;
  std::uint64_t independents = 0;
  std::uint64_t energy = 0;

  friend bool operator==(const CountTriple&, const CountTriple&) = default;
};

// Position of pair (v, v2), 1-based vertices with v < v2.
inline int edge_index(int v, int v2, int n) {
  if (v < 1 || v2 > n || v >= v2)
    throw ArgumentError("invalid vertex pair (" + std::to_string(v) + "," + std::to_string(v2) +
                        ") for n=" + std::to_string(n));
  // Pairs before row v: sum_{u<v} (n-u).
  const int before = (v - 1) * n - (v - 1) * v / 2;
  return before + (v2 - v - 1);
}

inline bool GraphCode::has_edge(int v, int v2) const {
  if (v > v2) std::swap(v, v2);
  return (bits >> edge_index(v, v2, n)) & 1U;
}

inline GraphCode complement(const GraphCode& code) {
  return GraphCode{~code.bits & code.full_mask(), code.n};
}

// Per-vertex neighbour bitmasks (bit u-1 set in entry v-1 when u~v).
inline std::vector<std::uint32_t> adjacency_masks(const GraphCode& code) {
  std::vector<std::uint32_t> adj(static_cast<std::size_t>(code.n), 0);
  int k = 0;
  for (int v = 0; v < code.n; ++v) {
    for (int u = v + 1; u < code.n; ++u, ++k) {
      if ((code.bits >> k) & 1U) {
        adj[v] |= 1U << u;
        adj[u] |= 1U << v;
      }
    }
  }
  return adj;
}

namespace detail {

// Calls fn(mask) for every k-subset of {0..n-1}, as an n-bit mask.
template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  if (k > n) return;
  std::uint32_t s = (k == 32) ? ~0U : ((1U << k) - 1);
  const std::uint32_t limit = 1U << n;
  while (s < limit) {
    fn(s);
    // Gosper's hack: next subset with the same popcount.
    const std::uint32_t c = s & (~s + 1);
    const std::uint32_t r = s + c;
    s = (((r ^ s) >> 2) / c) | r;
  }
}

inline void check_subset_size(int k, const char* what) {
  if (k < 2) throw ArgumentError(std::string(what) + " size must be >= 2, got " + std::to_string(k));
}

}  // namespace detail

inline std::uint64_t count_cliques(const GraphCode& code, int x) {
  detail::check_subset_size(x, "clique");
  const auto adj = adjacency_masks(code);
  std::uint64_t count = 0;
  detail::for_each_subset(code.n, x, [&](std::uint32_t s) {
    for (std::uint32_t rest = s; rest != 0; rest &= rest - 1) {
      const int v = std::countr_zero(rest);
      if (((adj[v] | (1U << v)) & s) != s) return;
    }
    ++count;
  });
  return count;
}

inline std::uint64_t count_independent(const GraphCode& code, int y) {
  detail::check_subset_size(y, "independent set");
  return count_cliques(complement(code), y);
}

inline CountTriple energy_h(const GraphCode& code, int x, int y) {
  CountTriple t;
  t.cliques = count_cliques(code, x);
  t.independents = count_independent(code, y);
  t.energy = t.cliques + t.independents;
  return t;
}

inline std::uint64_t bound_v(int n, int x, int y) { return std::max(binomial(n, x), binomial(n, y)); }

// Fast evaluator for h over many codes with fixed (n, x, y): each x-subset
// is precomputed as the mask of its internal pairs, so a subset is a clique
// iff all its pair bits are set and independent iff none are.
class EnergyCounter {
 public:
  EnergyCounter(int n, int x, int y) : n_(n) {
    detail::check_subset_size(x, "clique");
    detail::check_subset_size(y, "independent set");
    if (n < 2 || n > kMaxVertices) throw ArgumentError("vertex count out of range: " + std::to_string(n));
    clique_masks_ = subset_pair_masks(x);
    independent_masks_ = subset_pair_masks(y);
  }

  std::uint32_t operator()(Code bits) const {
    std::uint32_t h = 0;
    for (Code m : clique_masks_) h += (bits & m) == m;
    for (Code m : independent_masks_) h += (bits & m) == 0;
    return h;
  }

  int n() const { return n_; }

 private:
  std::vector<Code> subset_pair_masks(int k) const {
    std::vector<Code> masks;
    detail::for_each_subset(n_, k, [&](std::uint32_t s) {
      Code m = 0;
      for (int v = 0; v < n_; ++v) {
        if (!((s >> v) & 1U)) continue;
        for (int u = v + 1; u < n_; ++u)
          if ((s >> u) & 1U) m |= Code{1} << edge_index(v + 1, u + 1, n_);
      }
      masks.push_back(m);
    });
    return masks;
  }

  int n_;
  std::vector<Code> clique_masks_;
  std::vector<Code> independent_masks_;
};

// Text forms: "n=5 code=1057" (round-trippable) and "1-2,2-3" (output only).
inline std::string to_string(const GraphCode& code) {
  return "n=" + std::to_string(code.n) + " code=" + std::to_string(code.bits);
}

inline GraphCode parse_graph_code(const std::string& text) {
  static const std::regex pattern(R"(^\s*n\s*=\s*(\d+)\s+code\s*=\s*(\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) throw ArgumentError("malformed graph code: '" + text + "'");
  return GraphCode::make(std::stoull(m[2].str()), std::stoi(m[1].str()));
}

inline std::string edge_list(const GraphCode& code) {
  std::ostringstream os;
  bool first = true;
  for (int v = 1; v <= code.n; ++v)
    for (int u = v + 1; u <= code.n; ++u)
      if (code.has_edge(v, u)) {
        if (!first) os << ',';
        os << v << '-' << u;
        first = false;
      }
  return os.str();
}

// Relabels vertices: vertex v+1 becomes perm[v]+1.
inline GraphCode permute_vertices(const GraphCode& code, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != code.n) throw ArgumentError("permutation size mismatch");
  Code out = 0;
  for (int v = 1; v <= code.n; ++v)
    for (int u = v + 1; u <= code.n; ++u)
      if (code.has_edge(v, u)) {
        int a = perm[v - 1] + 1, b = perm[u - 1] + 1;
        if (a > b) std::swap(a, b);
        out |= Code{1} << edge_index(a, b, code.n);
      }
  return GraphCode{out, code.n};
}

}  // namespace rprobe
