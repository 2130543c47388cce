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

#include "pmwpm/matching_graph.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace pmwpm {

void WeightedGraph::validate() const {
    std::vector<int32_t> index(static_cast<size_t>(num_vertices) * num_vertices, -1);
    for (size_t i = 0; i < edges.size(); ++i) {
        const WeightedEdge& e = edges[i];
        if (e.u >= e.v || e.v >= num_vertices) {
            throw std::invalid_argument("edge " + std::to_string(i) + " must satisfy u < v < num_vertices");
        }
        int32_t& slot = index[static_cast<size_t>(e.u) * num_vertices + e.v];
        if (slot >= 0) {
            throw std::invalid_argument("parallel edge at index " + std::to_string(i));
        }
        slot = static_cast<int32_t>(i);
    }
}

std::vector<int32_t> WeightedGraph::edge_index_matrix() const {
    std::vector<int32_t> index(static_cast<size_t>(num_vertices) * num_vertices, -1);
    for (size_t i = 0; i < edges.size(); ++i) {
        index[static_cast<size_t>(edges[i].u) * num_vertices + edges[i].v] = static_cast<int32_t>(i);
        index[static_cast<size_t>(edges[i].v) * num_vertices + edges[i].u] = static_cast<int32_t>(i);
    }
    return index;
}

bool is_perfect_matching(const WeightedGraph& graph, std::span<const VertexPair> pairs) {
    if (pairs.size() * 2 != graph.num_vertices) {
        return false;
    }
    std::vector<uint8_t> seen(graph.num_vertices, 0);
    auto index = graph.edge_index_matrix();
    for (auto [u, v] : pairs) {
        if (u >= graph.num_vertices || v >= graph.num_vertices || u == v) return false;
        if (seen[u] || seen[v]) return false;
        if (index[static_cast<size_t>(u) * graph.num_vertices + v] < 0) return false;
        seen[u] = seen[v] = 1;
    }
    return true;
}

int64_t matching_weight(const WeightedGraph& graph, std::span<const VertexPair> pairs) {
    auto index = graph.edge_index_matrix();
    int64_t total = 0;
    for (auto [u, v] : pairs) {
        if (u >= graph.num_vertices || v >= graph.num_vertices) {
            throw std::invalid_argument("matched vertex out of range");
        }
        int32_t e = index[static_cast<size_t>(u) * graph.num_vertices + v];
        if (e < 0) {
            throw std::invalid_argument("pair (" + std::to_string(u) + ", " + std::to_string(v) + ") is not an edge");
        }
        total += graph.edges[e].weight;
    }
    return total;
}

std::vector<VertexPair> canonical_pairs(std::vector<VertexPair> pairs) {
    for (auto& [u, v] : pairs) {
        if (u > v) std::swap(u, v);
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

}  // namespace pmwpm
