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

#ifndef PMWPM_SHORTEST_PATHS_H_
#define PMWPM_SHORTEST_PATHS_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pmwpm/detector_model.h"
#include "pmwpm/matching_graph.h"

namespace pmwpm {

/// Raised when a table does not belong to the graph or events at hand.
class TableMismatch : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct BoundaryRecord {
    VertexId boundary = 0;
    int64_t distance = 0;
    bool operator==(const BoundaryRecord&) const = default;
};

/// Precomputed lookup tables: all-pairs detector distances, nearest boundary
/// per detector, and the recovery path (detector-graph edge ids) of each.
///
/// Shortest paths never pass through a boundary vertex. Paths are the
/// lexicographically smallest edge-id sequence among equal-weight shortest
/// paths, walked from the lower detector id; nearest-boundary ties go to the
/// smallest boundary id.
class DistanceTable {
   public:
    DistanceTable() = default;

    size_t num_detectors() const { return num_detectors_; }
    uint64_t graph_hash() const { return graph_hash_; }

    int64_t distance(VertexId a, VertexId b) const { return pair_dist_[index(a, b)]; }
    std::span<const EdgeId> path(VertexId a, VertexId b) const;
    const BoundaryRecord& nearest_boundary(VertexId a) const { return boundary_.at(a); }
    std::span<const EdgeId> boundary_path(VertexId a) const;

    void write_binary(std::ostream& out) const;
    static DistanceTable read_binary(std::istream& in);
    /// Human-readable dump used by `table inspect`.
    std::string to_json(bool include_paths) const;

    bool operator==(const DistanceTable&) const = default;

   private:
    friend DistanceTable precompute_tables(const DetectorGraph& graph, unsigned threads);

    size_t index(VertexId a, VertexId b) const {
        if (a >= num_detectors_ || b >= num_detectors_) throw std::out_of_range("detector id out of range");
        return static_cast<size_t>(a) * num_detectors_ + b;
    }
    size_t pair_slot(VertexId a, VertexId b) const;

    uint64_t graph_hash_ = 0;
    uint32_t num_vertices_ = 0;
    uint32_t num_detectors_ = 0;
    std::vector<int64_t> pair_dist_;       // row-major num_detectors^2
    std::vector<BoundaryRecord> boundary_;  // per detector
    std::vector<uint64_t> boundary_offset_;  // num_detectors + 1
    std::vector<uint64_t> pair_offset_;      // strict upper triangle, + 1 sentinel
    std::vector<EdgeId> path_pool_;
};

/// Runs Dijkstra from every vertex and fills the tables. `threads` workers
/// share the per-source runs; the result does not depend on it. Throws
/// ModelError naming the first detector that cannot reach any boundary.
DistanceTable precompute_tables(const DetectorGraph& graph, unsigned threads = 1);

/// Matching instance built from detection events.
///
/// Vertices 0..k-1 are the active detectors (sorted ids), k..2k-1 their
/// mirror boundary vertices. Edge order is frozen: all active pairs in
/// lexicographic order, then active i -- mirror i, then all mirror pairs in
/// lexicographic order (weight 0).
struct PathGraph {
    std::vector<VertexId> actives;
    std::vector<VertexId> mirrors;
    WeightedGraph graph;

    size_t size() const { return graph.num_vertices; }
    bool empty() const { return actives.empty(); }
};

PathGraph build_path_graph(const DistanceTable& table, std::span<const VertexId> events, uint64_t graph_hash);
inline PathGraph build_path_graph(const DistanceTable& table, std::span<const VertexId> events,
                                  const DetectorGraph& graph) {
    return build_path_graph(table, events, graph.hash());
}

/// Path graph on arbitrary active/mirror weights (tests and tooling).
/// `pair_weight[i*k+j]` for active pairs, `boundary_weight[i]` for active--mirror.
PathGraph make_path_graph(std::span<const int64_t> pair_weight, std::span<const int64_t> boundary_weight);

struct Recovery {
    std::vector<EdgeId> corrected_edges;  // sorted, duplicates cancelled mod 2
    bool logical_flip_correction = false;
};

/// Maps a perfect matching of `pg` to detector-graph edges via the tables.
Recovery matching_to_recovery(std::span<const VertexPair> matching, const PathGraph& pg, const DistanceTable& table,
                              const DetectorGraph& graph);

}  // namespace pmwpm

#endif  // PMWPM_SHORTEST_PATHS_H_
