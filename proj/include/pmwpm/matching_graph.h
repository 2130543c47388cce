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

#ifndef PMWPM_MATCHING_GRAPH_H_
#define PMWPM_MATCHING_GRAPH_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace pmwpm {

struct WeightedEdge {
    uint32_t u = 0;  // u < v
    uint32_t v = 0;
    int64_t weight = 0;
    bool operator==(const WeightedEdge&) const = default;
};

/// Simple undirected graph with integer edge weights. Edge order is
/// significant: the perturbation schemes index edges e_1..e_m by position.
struct WeightedGraph {
    uint32_t num_vertices = 0;
    std::vector<WeightedEdge> edges;

    /// Throws std::invalid_argument on self-loops, parallel edges or
    /// out-of-range endpoints.
    void validate() const;
    /// Dense (num_vertices^2) edge index table, -1 for non-edges.
    std::vector<int32_t> edge_index_matrix() const;
};

using VertexPair = std::pair<uint32_t, uint32_t>;

struct Matching {
    std::vector<VertexPair> pairs;  // each (u, v) with u < v, sorted
    int64_t total_base_weight = 0;
    bool operator==(const Matching&) const = default;
};

/// True iff `pairs` are edges of `graph` covering every vertex exactly once.
bool is_perfect_matching(const WeightedGraph& graph, std::span<const VertexPair> pairs);

/// Sum of base weights; throws std::invalid_argument if a pair is not an edge.
int64_t matching_weight(const WeightedGraph& graph, std::span<const VertexPair> pairs);

/// Canonical form: each pair ordered (min, max), list sorted.
std::vector<VertexPair> canonical_pairs(std::vector<VertexPair> pairs);

}  // namespace pmwpm

#endif  // PMWPM_MATCHING_GRAPH_H_
