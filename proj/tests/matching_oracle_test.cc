// Copyright 2026 The pmwpm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "pmwpm/matching_oracle.h"
#include "pmwpm/shortest_paths.h"

namespace pmwpm {
namespace {

constexpr int64_t kInf = std::numeric_limits<int64_t>::max() / 4;

// Subset DP: best[S] = min weight perfect matching of vertex set S, pairing
// the lowest vertex of S first.
int64_t subset_dp(const WeightedGraph& g) {
    const uint32_t n = g.num_vertices;
    std::vector<int64_t> w(n * n, kInf);
    for (const auto& e : g.edges) w[e.u * n + e.v] = w[e.v * n + e.u] = e.weight;
    std::vector<int64_t> best(size_t{1} << n, kInf);
    best[0] = 0;
    for (uint32_t s = 1; s < (1u << n); ++s) {
        if (__builtin_popcount(s) % 2) continue;
        const uint32_t i = __builtin_ctz(s);
        for (uint32_t j = i + 1; j < n; ++j) {
            if (!(s >> j & 1) || w[i * n + j] == kInf) continue;
            const int64_t rest = best[s & ~(1u << i) & ~(1u << j)];
            if (rest != kInf) best[s] = std::min(best[s], rest + w[i * n + j]);
        }
    }
    return best[(1u << n) - 1];
}

uint64_t double_factorial(uint32_t n) {
    uint64_t r = 1;
    for (uint32_t k = n; k > 1; k -= 2) r *= k;
    return r;
}

TEST(Oracle, SingleEdge) {
    WeightedGraph g{2, {{0, 1, 5}}};
    OracleResult r = brute_force_mwpm(g);
    EXPECT_EQ(r.weight, 5);
    EXPECT_EQ(r.count_of_minima, 1u);
    EXPECT_EQ(r.one_matching.pairs, (std::vector<VertexPair>{{0, 1}}));
}

TEST(Oracle, AgreesWithSubsetDp) {
    std::mt19937_64 rng(1);
    for (int it = 0; it < 300; ++it) {
        const uint32_t k = 1 + rng() % 7;
        std::vector<int64_t> pair(k * k), boundary(k);
        for (uint32_t a = 0; a < k; ++a) {
            boundary[a] = static_cast<int64_t>(rng() % 20);
            for (uint32_t b = a + 1; b < k; ++b) pair[a * k + b] = pair[b * k + a] = static_cast<int64_t>(rng() % 20);
        }
        PathGraph pg = make_path_graph(pair, boundary);
        OracleResult r = brute_force_mwpm(pg.graph);
        EXPECT_EQ(r.weight, subset_dp(pg.graph));
        EXPECT_TRUE(is_perfect_matching(pg.graph, r.one_matching.pairs));
        EXPECT_EQ(matching_weight(pg.graph, r.one_matching.pairs), r.weight);
        EXPECT_GE(r.count_of_minima, 1u);
    }
}

TEST(Oracle, HeavyActivePairsForceMirrors) {
    // Three events with active-active weights far above the boundary weights.
    std::vector<int64_t> pair = {0, 1000, 1000, 1000, 0, 1000, 1000, 1000, 0};
    std::vector<int64_t> boundary = {3, 4, 5};
    PathGraph pg = make_path_graph(pair, boundary);
    OracleResult r = brute_force_mwpm(pg.graph);
    EXPECT_EQ(r.one_matching.pairs, (std::vector<VertexPair>{{0, 3}, {1, 4}, {2, 5}}));
    EXPECT_EQ(r.weight, 12);
}

TEST(Oracle, CountsDegenerateMinima) {
    // K4 with unit weights: all three perfect matchings tie.
    WeightedGraph g{4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {1, 2, 1}, {1, 3, 1}, {2, 3, 1}}};
    OracleResult r = brute_force_mwpm(g);
    EXPECT_EQ(r.count_of_minima, 3u);
    EXPECT_EQ(r.one_matching.pairs, (std::vector<VertexPair>{{0, 1}, {2, 3}}));
}

TEST(Oracle, RefusesLargeOrUnmatchable) {
    WeightedGraph big{16, {}};
    EXPECT_THROW(brute_force_mwpm(big), std::invalid_argument);
    WeightedGraph none{4, {{0, 1, 1}}};
    EXPECT_THROW(brute_force_mwpm(none), std::runtime_error);
}

TEST(Enumeration, CompleteGraphsHaveDoubleFactorialMatchings) {
    for (uint32_t n = 2; n <= 10; n += 2) {
        WeightedGraph g{n, {}};
        for (uint32_t u = 0; u < n; ++u)
            for (uint32_t v = u + 1; v < n; ++v) g.edges.push_back({u, v, 1});
        auto all = all_perfect_matchings(g);
        EXPECT_EQ(all.size(), double_factorial(n - 1));
        for (size_t i = 1; i < all.size(); ++i) EXPECT_LT(all[i - 1].pairs, all[i].pairs);
    }
}

TEST(Enumeration, OracleIsMinimumOfEnumeration) {
    std::mt19937_64 rng(2);
    for (int it = 0; it < 100; ++it) {
        const uint32_t k = 1 + rng() % 5;
        std::vector<int64_t> pair(k * k), boundary(k);
        for (uint32_t a = 0; a < k; ++a) {
            boundary[a] = static_cast<int64_t>(rng() % 6);
            for (uint32_t b = a + 1; b < k; ++b) pair[a * k + b] = pair[b * k + a] = static_cast<int64_t>(rng() % 6);
        }
        PathGraph pg = make_path_graph(pair, boundary);
        int64_t best = kInf;
        uint64_t count = 0;
        enumerate_perfect_matchings(pg.graph, [&](const Matching& m) {
            EXPECT_EQ(m.total_base_weight, matching_weight(pg.graph, m.pairs));
            if (m.total_base_weight < best) {
                best = m.total_base_weight;
                count = 0;
            }
            count += m.total_base_weight == best;
        });
        OracleResult r = brute_force_mwpm(pg.graph);
        EXPECT_EQ(r.weight, best);
        EXPECT_EQ(r.count_of_minima, count);
    }
}

TEST(Enumeration, SizeLimit) {
    WeightedGraph g{14, {}};
    EXPECT_THROW(all_perfect_matchings(g), std::invalid_argument);
}

}  // namespace
}  // namespace pmwpm
