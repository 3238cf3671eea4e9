#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracle/brute_graphs.hpp"
#include "rprobe/errors.hpp"
#include "rprobe/graphs.hpp"

using namespace rprobe;

namespace {

GraphCode complete(int n) {
  const auto g = GraphCode{0, n};
  return GraphCode{g.full_mask(), n};
}

GraphCode five_cycle() { return GraphCode{oracle::cycle_code({1, 2, 3, 4, 5}, 5), 5}; }

}  // namespace

TEST(EdgeIndex, FixedOrdering) {
  EXPECT_EQ(edge_index(1, 2, 4), 0);
  EXPECT_EQ(edge_index(3, 4, 4), 5);
  EXPECT_EQ(edge_index(2, 5, 5), 6);
}

TEST(EdgeIndex, MatchesEnumeratedOrderAndIsBijective) {
  for (int n = 2; n <= 8; ++n) {
    std::vector<int> seen;
    for (const auto& [pair, k] : oracle::pair_order(n)) {
      EXPECT_EQ(edge_index(pair.first, pair.second, n), k);
      seen.push_back(k);
    }
    std::sort(seen.begin(), seen.end());
    std::vector<int> expected(static_cast<std::size_t>(pair_count(n)));
    std::iota(expected.begin(), expected.end(), 0);
    EXPECT_EQ(seen, expected);
  }
}

TEST(EdgeIndex, RejectsBadPairs) {
  EXPECT_THROW(edge_index(2, 2, 4), ArgumentError);
  EXPECT_THROW(edge_index(3, 2, 4), ArgumentError);
  EXPECT_THROW(edge_index(0, 2, 4), ArgumentError);
  EXPECT_THROW(edge_index(1, 5, 4), ArgumentError);
}

TEST(GraphCodeMake, Validates) {
  EXPECT_NO_THROW(GraphCode::make(63, 4));
  EXPECT_THROW(GraphCode::make(64, 4), ArgumentError);
  EXPECT_THROW(GraphCode::make(0, 1), ArgumentError);
  EXPECT_THROW(GraphCode::make(0, kMaxVertices + 1), ArgumentError);
}

TEST(Complement, Examples) {
  EXPECT_EQ(complement(GraphCode{0, 4}).bits, 63u);
  EXPECT_EQ(complement(GraphCode{63, 4}).bits, 0u);
  EXPECT_EQ(complement(GraphCode{0b101, 3}).bits, 0b010u);
}

TEST(Complement, Involution) {
  for (Code bits = 0; bits < 1024; ++bits) {
    const GraphCode g{bits, 5};
    EXPECT_EQ(complement(complement(g)), g);
  }
}

TEST(CountCliques, Examples) {
  EXPECT_EQ(count_cliques(complete(4), 3), 4u);
  EXPECT_EQ(count_cliques(GraphCode{0, 5}, 3), 0u);
  EXPECT_EQ(count_cliques(five_cycle(), 3), 0u);
}

TEST(CountCliques, SizeEdgeCases) {
  EXPECT_EQ(count_cliques(complete(4), 5), 0u);
  EXPECT_EQ(count_cliques(complete(4), 4), 1u);
  EXPECT_THROW(count_cliques(complete(4), 1), ArgumentError);
}

TEST(CountIndependent, Examples) {
  EXPECT_EQ(count_independent(GraphCode{0, 4}, 2), 6u);
  EXPECT_EQ(count_independent(complete(6), 3), 0u);
  EXPECT_EQ(count_independent(five_cycle(), 3), 0u);
  EXPECT_THROW(count_independent(GraphCode{0, 4}, 0), ArgumentError);
}

TEST(EnergyH, Examples) {
  EXPECT_EQ(energy_h(five_cycle(), 3, 3).energy, 0u);
  EXPECT_EQ(energy_h(complete(6), 3, 3), (CountTriple{20, 0, 20}));
  const GraphCode path{(Code{1} << edge_index(1, 2, 3)) | (Code{1} << edge_index(2, 3, 3)), 3};
  EXPECT_EQ(energy_h(path, 3, 3).energy, 0u);
}

TEST(BoundV, Examples) {
  EXPECT_EQ(bound_v(6, 3, 3), 20u);
  EXPECT_EQ(bound_v(5, 2, 4), 10u);
  EXPECT_EQ(bound_v(4, 3, 3), 4u);
}

TEST(Counting, MatchesBruteForceExhaustively) {
  for (int n = 2; n <= 5; ++n)
    for (int x = 2; x <= n; ++x)
      for (int y = 2; y <= n; ++y) {
        const EnergyCounter counter(n, x, y);
        for (Code bits = 0; bits < (Code{1} << pair_count(n)); ++bits) {
          const GraphCode g{bits, n};
          const auto t = energy_h(g, x, y);
          ASSERT_EQ(t.cliques, oracle::cliques(bits, n, x)) << "n=" << n << " bits=" << bits;
          ASSERT_EQ(t.independents, oracle::independents(bits, n, y));
          ASSERT_EQ(t.energy, t.cliques + t.independents);
          ASSERT_EQ(counter(bits), t.energy);
        }
      }
}

TEST(Counting, DualityExhaustive) {
  for (int n = 2; n <= 5; ++n)
    for (int k = 2; k <= n; ++k)
      for (Code bits = 0; bits < (Code{1} << pair_count(n)); ++bits) {
        const GraphCode g{bits, n};
        ASSERT_EQ(count_independent(g, k), count_cliques(complement(g), k));
      }
}

TEST(Counting, SymmetryExhaustive) {
  for (int n = 2; n <= 5; ++n)
    for (int x = 2; x <= n; ++x)
      for (int y = 2; y <= n; ++y)
        for (Code bits = 0; bits < (Code{1} << pair_count(n)); ++bits) {
          const GraphCode g{bits, n};
          ASSERT_EQ(energy_h(g, x, y).energy, energy_h(complement(g), y, x).energy);
        }
}

TEST(Counting, RelabelingInvarianceExhaustiveUpToFive) {
  for (int n = 2; n <= 5; ++n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      for (Code bits = 0; bits < (Code{1} << pair_count(n)); ++bits) {
        const GraphCode g{bits, n};
        ASSERT_EQ(energy_h(permute_vertices(g, perm), 3 <= n ? 3 : 2, 2), energy_h(g, 3 <= n ? 3 : 2, 2));
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST(Counting, RelabelingInvarianceRandomSix) {
  std::mt19937_64 rng(7);
  std::vector<int> perm(6);
  std::iota(perm.begin(), perm.end(), 0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::shuffle(perm.begin(), perm.end(), rng);
    const GraphCode g{rng() & ((Code{1} << 15) - 1), 6};
    EXPECT_EQ(energy_h(permute_vertices(g, perm), 3, 3), energy_h(g, 3, 3));
    EXPECT_EQ(energy_h(permute_vertices(g, perm), 4, 2), energy_h(g, 4, 2));
  }
}

TEST(Counting, Bounds) {
  for (Code bits = 0; bits < 1024; ++bits) {
    const auto t = energy_h(GraphCode{bits, 5}, 3, 4);
    EXPECT_LE(t.cliques, binomial(5, 3));
    EXPECT_LE(t.independents, binomial(5, 4));
    EXPECT_LE(t.energy, binomial(5, 3) + binomial(5, 4));
  }
}

TEST(TextForm, RoundTripsAndRendersEdges) {
  const GraphCode g{5, 3};
  EXPECT_EQ(to_string(g), "n=3 code=5");
  EXPECT_EQ(parse_graph_code("n=3 code=5"), g);
  EXPECT_EQ(edge_list(GraphCode{(Code{1} << edge_index(1, 2, 3)) | (Code{1} << edge_index(2, 3, 3)), 3}), "1-2,2-3");
  EXPECT_THROW(parse_graph_code("n=3 code=64"), ArgumentError);
  EXPECT_THROW(parse_graph_code("garbage"), ArgumentError);
}
