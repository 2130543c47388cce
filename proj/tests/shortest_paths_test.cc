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
#include <sstream>

#include "pmwpm/detector_model.h"
#include "pmwpm/hashing.h"
#include "pmwpm/matching_graph.h"
#include "pmwpm/shortest_paths.h"

namespace pmwpm {
namespace {

constexpr int64_t kInf = std::numeric_limits<int64_t>::max() / 4;

// Bellman-Ford over arcs that never leave a boundary vertex (other than the source).
std::vector<int64_t> bellman_ford(const DetectorGraph& g, VertexId source) {
    std::vector<int64_t> dist(g.num_vertices(), kInf);
    dist[source] = 0;
    for (size_t iter = 0; iter < g.num_vertices(); ++iter) {
        bool changed = false;
        for (const DetectorEdge& e : g.edges()) {
            for (auto [x, y] : {std::pair(e.u, e.v), std::pair(e.v, e.u)}) {
                if (dist[x] == kInf || (x != source && x >= g.num_detectors())) continue;
                if (dist[x] + e.weight < dist[y]) {
                    dist[y] = dist[x] + e.weight;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
    return dist;
}

// Checks that `path` walks from `from` to `to` without visiting a boundary in between.
int64_t walk(const DetectorGraph& g, std::span<const EdgeId> path, VertexId from, VertexId to) {
    VertexId cur = from;
    int64_t total = 0;
    for (size_t i = 0; i < path.size(); ++i) {
        const DetectorEdge& e = g.edge(path[i]);
        EXPECT_TRUE(e.u == cur || e.v == cur);
        cur = e.u == cur ? e.v : e.u;
        if (i + 1 < path.size()) EXPECT_LT(cur, g.num_detectors());
        total += e.weight;
    }
    EXPECT_EQ(cur, to);
    return total;
}

DetectorGraph random_graph(uint64_t seed) {
    std::mt19937_64 rng(seed);
    const uint32_t nd = 3 + rng() % 8;
    std::vector<VertexKind> v;
    for (uint32_t i = 0; i < nd; ++i) v.emplace_back(Detector{0, i});
    v.emplace_back(SpaceBoundary{});
    v.emplace_back(SpaceBoundary{});
    std::vector<Mechanism> m;
    for (uint32_t i = 0; i < nd; ++i) {
        m.push_back({i, nd + static_cast<uint32_t>(rng() % 2), 1e-4 * (1 + rng() % 50), false});
        m.push_back({i, (i + 1) % nd, 1e-3 * (1 + rng() % 50), false});
        m.push_back({i, static_cast<uint32_t>(rng() % nd), 1e-3 * (1 + rng() % 50), false});
    }
    std::erase_if(m, [](const Mechanism& x) { return x.u == x.v; });
    return DetectorGraph::from_mechanisms(v, m, 10, {});
}

TEST(Tables, DistancesMatchBellmanFord) {
    for (uint64_t seed = 0; seed < 40; ++seed) {
        DetectorGraph g = random_graph(seed);
        DistanceTable t = precompute_tables(g);
        for (VertexId a = 0; a < g.num_detectors(); ++a) {
            auto ref = bellman_ford(g, a);
            for (VertexId b = 0; b < g.num_detectors(); ++b) {
                EXPECT_EQ(t.distance(a, b), ref[b]);
                if (a != b) EXPECT_EQ(walk(g, t.path(a, b), std::min(a, b), std::max(a, b)), ref[b]);
            }
            int64_t best = kInf;
            VertexId arg = 0;
            for (VertexId b = static_cast<VertexId>(g.num_detectors()); b < g.num_vertices(); ++b) {
                if (ref[b] < best) best = ref[b], arg = b;
            }
            EXPECT_EQ(t.nearest_boundary(a).distance, best);
            EXPECT_EQ(t.nearest_boundary(a).boundary, arg);
            EXPECT_EQ(walk(g, t.boundary_path(a), a, arg), best);
        }
    }
}

TEST(Tables, MemoryGraphAgainstBellmanFord) {
    DetectorGraph g = build_rotated_memory_graph(5, 3, 1e-3, 10);
    DistanceTable t = precompute_tables(g);
    for (VertexId a = 0; a < g.num_detectors(); a += 7) {
        auto ref = bellman_ford(g, a);
        for (VertexId b = 0; b < g.num_detectors(); ++b) EXPECT_EQ(t.distance(a, b), ref[b]);
    }
}

TEST(Tables, BoundaryIsNotTransit) {
    // 0 -1- B -1- 1 would be short through the boundary; the direct edge costs more.
    std::vector<VertexKind> v = {Detector{0, 0}, Detector{0, 1}, SpaceBoundary{}};
    const double pd = 1e-6, pb = 0.3;
    std::vector<DetectorEdge> e = {{0, 1, pd, integer_weight(pd, 10), false},
                                   {0, 2, pb, integer_weight(pb, 10), false},
                                   {1, 2, pb, integer_weight(pb, 10), false}};
    DetectorGraph g(v, e, 10, {});
    DistanceTable t = precompute_tables(g);
    EXPECT_EQ(t.distance(0, 1), integer_weight(pd, 10));
}

TEST(Tables, ThreadCountDoesNotMatter) {
    DetectorGraph g = build_rotated_memory_graph(5, 5, 1e-3, 10);
    EXPECT_EQ(precompute_tables(g, 1), precompute_tables(g, 3));
}

TEST(Tables, BinaryRoundTrip) {
    DetectorGraph g = build_rotated_memory_graph(3, 3, 1e-3, 10);
    DistanceTable t = precompute_tables(g);
    std::stringstream buf;
    t.write_binary(buf);
    DistanceTable u = DistanceTable::read_binary(buf);
    EXPECT_EQ(t, u);
    EXPECT_EQ(u.graph_hash(), g.hash());

    std::string bytes;
    {
        std::stringstream again;
        t.write_binary(again);
        bytes = again.str();
    }
    std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
    EXPECT_THROW(DistanceTable::read_binary(truncated), TableMismatch);
    std::string bad = bytes;
    bad[0] = 'X';
    std::stringstream bad_magic(bad);
    EXPECT_THROW(DistanceTable::read_binary(bad_magic), TableMismatch);
}

TEST(PathGraphs, StructureAndEdgeOrder) {
    // Three events: |V| = 6, |E| = 3 + 3 + 3 = 9.
    std::vector<int64_t> pair = {0, 5, 7, 5, 0, 9, 7, 9, 0};
    std::vector<int64_t> boundary = {2, 3, 4};
    PathGraph pg = make_path_graph(pair, boundary);
    EXPECT_EQ(pg.size(), 6u);
    ASSERT_EQ(pg.graph.edges.size(), 9u);
    std::vector<WeightedEdge> expect = {{0, 1, 5}, {0, 2, 7}, {1, 2, 9}, {0, 3, 2}, {1, 4, 3},
                                        {2, 5, 4}, {3, 4, 0}, {3, 5, 0}, {4, 5, 0}};
    EXPECT_EQ(pg.graph.edges, expect);
    EXPECT_NO_THROW(pg.graph.validate());
}

TEST(PathGraphs, BuiltFromTables) {
    DetectorGraph g = build_rotated_memory_graph(3, 3, 1e-3, 10);
    DistanceTable t = precompute_tables(g);
    std::vector<VertexId> events = {9, 2, 5};
    PathGraph pg = build_path_graph(t, events, g);
    EXPECT_EQ(pg.actives, (std::vector<VertexId>{2, 5, 9}));
    EXPECT_EQ(pg.graph.edges[0].weight, t.distance(2, 5));
    EXPECT_EQ(pg.graph.edges[3].weight, t.nearest_boundary(2).distance);
    EXPECT_TRUE(build_path_graph(t, std::vector<VertexId>{}, g).empty());

    std::vector<VertexId> dup = {2, 2};
    EXPECT_THROW(build_path_graph(t, dup, g), std::invalid_argument);
    std::vector<VertexId> boundary = {static_cast<VertexId>(g.num_detectors())};
    EXPECT_THROW(build_path_graph(t, boundary, g), std::invalid_argument);
    DetectorGraph other = build_rotated_memory_graph(3, 3, 2e-3, 10);
    EXPECT_THROW(build_path_graph(t, events, other), TableMismatch);
}

TEST(Recovery, SyndromeOfCorrectionEqualsEvents) {
    DetectorGraph g = build_rotated_memory_graph(5, 5, 5e-3, 10);
    DistanceTable t = precompute_tables(g);
    for (uint64_t s = 0; s < 200; ++s) {
        ErrorSample sample = sample_errors(g, mix_seed({11, s}));
        PathGraph pg = build_path_graph(t, sample.detection_events, g);
        // Any perfect matching works here: pair every active with its mirror.
        const uint32_t k = static_cast<uint32_t>(pg.actives.size());
        std::vector<VertexPair> pairs;
        for (uint32_t i = 0; i < k; ++i) pairs.emplace_back(i, k + i);
        Recovery r = matching_to_recovery(pairs, pg, t, g);
        EXPECT_EQ(detection_events_of(g, r.corrected_edges), sample.detection_events);
        EXPECT_EQ(r.logical_flip_correction, logical_parity_of(g, r.corrected_edges));
    }
}

TEST(Recovery, RejectsNonMatching) {
    DetectorGraph g = build_rotated_memory_graph(3, 3, 1e-3, 10);
    DistanceTable t = precompute_tables(g);
    std::vector<VertexId> events = {1, 4};
    PathGraph pg = build_path_graph(t, events, g);
    std::vector<VertexPair> partial = {{0, 1}};
    EXPECT_THROW(matching_to_recovery(partial, pg, t, g), std::invalid_argument);
}

TEST(Tables, JsonDump) {
    DetectorGraph g = build_rotated_memory_graph(3, 1, 1e-3, 10);
    std::string j = precompute_tables(g).to_json(true);
    EXPECT_NE(j.find("pair_paths"), std::string::npos);
}

}  // namespace
}  // namespace pmwpm
