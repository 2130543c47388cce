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

#include "pmwpm/matching_oracle.h"

#include <limits>
#include <stdexcept>
#include <string>

namespace pmwpm {

namespace {

// Matches the lowest unmatched vertex against each admissible partner in
// increasing order, so complete matchings appear in lexicographic order.
class Enumerator {
   public:
    Enumerator(const WeightedGraph& graph, const std::function<void(const Matching&)>& visit)
        : graph_(graph), index_(graph.edge_index_matrix()), matched_(graph.num_vertices, 0), visit_(visit) {}

    void run() {
        if (graph_.num_vertices % 2 != 0) return;
        recurse();
    }

   private:
    void recurse() {
        uint32_t first = 0;
        while (first < graph_.num_vertices && matched_[first]) ++first;
        if (first == graph_.num_vertices) {
            visit_(current_);
            return;
        }
        matched_[first] = 1;
        for (uint32_t partner = first + 1; partner < graph_.num_vertices; ++partner) {
            if (matched_[partner]) continue;
            int32_t e = index_[static_cast<size_t>(first) * graph_.num_vertices + partner];
            if (e < 0) continue;
            matched_[partner] = 1;
            current_.pairs.emplace_back(first, partner);
            current_.total_base_weight += graph_.edges[e].weight;
            recurse();
            current_.total_base_weight -= graph_.edges[e].weight;
            current_.pairs.pop_back();
            matched_[partner] = 0;
        }
        matched_[first] = 0;
    }

    const WeightedGraph& graph_;
    std::vector<int32_t> index_;
    std::vector<uint8_t> matched_;
    Matching current_;
    const std::function<void(const Matching&)>& visit_;
};

}  // namespace

void enumerate_perfect_matchings(const WeightedGraph& graph, const std::function<void(const Matching&)>& visit) {
    if (graph.num_vertices > kEnumerateMaxVertices) {
        throw std::invalid_argument("enumerate_perfect_matchings refuses more than " +
                                    std::to_string(kEnumerateMaxVertices) + " vertices");
    }
    graph.validate();
    Enumerator(graph, visit).run();
}

std::vector<Matching> all_perfect_matchings(const WeightedGraph& graph) {
    std::vector<Matching> out;
    enumerate_perfect_matchings(graph, [&](const Matching& m) { out.push_back(m); });
    return out;
}

OracleResult brute_force_mwpm(const WeightedGraph& graph) {
    if (graph.num_vertices > kOracleMaxVertices) {
        throw std::invalid_argument("brute_force_mwpm refuses more than " + std::to_string(kOracleMaxVertices) +
                                    " vertices");
    }
    graph.validate();
    OracleResult result;
    result.weight = std::numeric_limits<int64_t>::max();
    std::function<void(const Matching&)> visit = [&](const Matching& m) {
        if (m.total_base_weight < result.weight) {
            result.weight = m.total_base_weight;
            result.one_matching = m;
            result.count_of_minima = 1;
        } else if (m.total_base_weight == result.weight) {
            ++result.count_of_minima;
        }
    };
    Enumerator(graph, visit).run();
    if (result.count_of_minima == 0) {
        throw std::runtime_error("graph has no perfect matching");
    }
    return result;
}

}  // namespace pmwpm
