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

#ifndef PMWPM_MATCHING_ORACLE_H_
#define PMWPM_MATCHING_ORACLE_H_

#include <cstdint>
#include <functional>

#include "pmwpm/matching_graph.h"

namespace pmwpm {

/// Exhaustive minimum-weight perfect matching, the ground truth for every
/// soundness check.
struct OracleResult {
    int64_t weight = 0;
    Matching one_matching;        // lexicographically smallest minimizer
    uint64_t count_of_minima = 0;  // number of distinct minimum-weight matchings
};

inline constexpr uint32_t kOracleMaxVertices = 14;
inline constexpr uint32_t kEnumerateMaxVertices = 12;

/// Refuses graphs above kOracleMaxVertices; throws std::runtime_error when no
/// perfect matching exists.
OracleResult brute_force_mwpm(const WeightedGraph& graph);

/// Calls `visit` once per perfect matching in lexicographic order of the
/// sorted pair list. Refuses graphs above kEnumerateMaxVertices.
void enumerate_perfect_matchings(const WeightedGraph& graph, const std::function<void(const Matching&)>& visit);

/// Collects enumerate_perfect_matchings into a vector.
std::vector<Matching> all_perfect_matchings(const WeightedGraph& graph);

}  // namespace pmwpm

#endif  // PMWPM_MATCHING_ORACLE_H_
