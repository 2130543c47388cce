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

#ifndef PMWPM_DETECTOR_MODEL_H_
#define PMWPM_DETECTOR_MODEL_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace pmwpm {

using VertexId = uint32_t;
using EdgeId = uint32_t;

/// A detector: parity of two consecutive measurement layers of one stabilizer.
struct Detector {
    uint32_t round = 0;
    uint32_t stabilizer = 0;
    bool operator==(const Detector&) const = default;
};
struct SpaceBoundary {
    bool operator==(const SpaceBoundary&) const = default;
};
struct TimeBoundary {
    bool operator==(const TimeBoundary&) const = default;
};

using VertexKind = std::variant<Detector, SpaceBoundary, TimeBoundary>;

inline bool is_detector(const VertexKind& k) { return std::holds_alternative<Detector>(k); }

/// Raised when a noise model or graph violates a structural invariant.
class ModelError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// One fault mechanism: flips the detectors `u` and `v` (one may be a boundary).
struct Mechanism {
    VertexId u = 0;
    VertexId v = 0;
    double prob = 0.0;
    bool flips_logical = false;
};

struct DetectorEdge {
    VertexId u = 0;  // u < v
    VertexId v = 0;
    double prob = 0.0;
    int64_t weight = 0;
    bool flips_logical = false;
    bool operator==(const DetectorEdge&) const = default;
};

struct MergedEdge {
    VertexId u = 0;  // u < v
    VertexId v = 0;
    double prob = 0.0;
    bool flips_logical = false;
    bool clamped = false;
};

/// Upper clamp applied to union-bound probability sums.
inline constexpr double kMaxEdgeProbability = 1.0 - 1e-12;

/// Merges mechanisms sharing an unordered endpoint pair by summing their
/// probabilities (clamped to kMaxEdgeProbability). The result is sorted by
/// (u, v) and independent of the input order. Throws ModelError when merged
/// mechanisms disagree on the logical flag or a probability is outside (0,1).
std::vector<MergedEdge> merge_parallel_mechanisms(std::span<const Mechanism> mechanisms);

/// ceil(-C * ln(prob)).
int64_t integer_weight(double prob, int64_t scale_c);

/// Free-form provenance carried in the serialized header.
struct GraphInfo {
    uint32_t distance = 0;
    uint32_t rounds = 0;
    bool operator==(const GraphInfo&) const = default;
};

/// Weighted simple graph of detectors and boundary vertices.
///
/// Detectors always occupy vertex ids [0, num_detectors()); boundary vertices
/// follow. Edges are stored sorted by (u, v) with u < v. Immutable once built.
class DetectorGraph {
   public:
    DetectorGraph() = default;

    /// Validates every invariant; throws ModelError on violation.
    DetectorGraph(std::vector<VertexKind> vertices, std::vector<DetectorEdge> edges, int64_t scale_c,
                  GraphInfo info);

    /// Merges `mechanisms`, weights them with `scale_c` and builds the graph.
    /// `clamped` (if non-null) receives the number of edges whose probability
    /// sum had to be clamped.
    static DetectorGraph from_mechanisms(std::vector<VertexKind> vertices,
                                         std::span<const Mechanism> mechanisms, int64_t scale_c,
                                         GraphInfo info, size_t* clamped = nullptr);

    const std::vector<VertexKind>& vertices() const { return vertices_; }
    const std::vector<DetectorEdge>& edges() const { return edges_; }
    const DetectorEdge& edge(EdgeId e) const { return edges_.at(e); }
    const VertexKind& vertex(VertexId v) const { return vertices_.at(v); }
    size_t num_vertices() const { return vertices_.size(); }
    size_t num_edges() const { return edges_.size(); }
    size_t num_detectors() const { return num_detectors_; }
    int64_t scale_c() const { return scale_c_; }
    const GraphInfo& info() const { return info_; }

    /// (neighbor, edge id) pairs, sorted by edge id.
    const std::vector<std::pair<VertexId, EdgeId>>& neighbors(VertexId v) const { return adjacency_.at(v); }
    size_t max_degree() const;

    /// Edge id joining u and v, or -1.
    int64_t find_edge(VertexId u, VertexId v) const;

    /// Deterministic text serialization; see serialize_graph.
    std::string serialize() const;
    /// FNV-1a of serialize().
    uint64_t hash() const { return hash_; }

   private:
    std::vector<VertexKind> vertices_;
    std::vector<DetectorEdge> edges_;
    std::vector<std::vector<std::pair<VertexId, EdgeId>>> adjacency_;
    size_t num_detectors_ = 0;
    int64_t scale_c_ = 1;
    GraphInfo info_;
    uint64_t hash_ = 0;
};

/// Parses the text produced by DetectorGraph::serialize(). Throws ModelError.
DetectorGraph parse_graph(std::string_view text);

/// Detector graph of a distance-`distance` rotated surface code memory
/// experiment with `rounds` detector layers. The last layer is formed from the
/// destructive data-qubit readout, so it has no time-like edges to a later
/// layer. Space-like, time-like and space-time diagonal mechanisms all get
/// probability `p`. The logical observable is the Z-string on data column 0.
DetectorGraph build_rotated_memory_graph(uint32_t distance, uint32_t rounds, double p, int64_t scale_c);

/// Number of Z stabilizers (detectors per layer) of the distance-d rotated code.
constexpr uint32_t stabilizers_per_round(uint32_t distance) { return (distance * distance - 1) / 2; }

struct ErrorSample {
    std::vector<EdgeId> flipped_edges;       // sorted
    std::vector<VertexId> detection_events;  // sorted detector ids
    bool logical_flip = false;
    bool operator==(const ErrorSample&) const = default;
};

/// Detectors touched by an odd number of the given edges (sorted).
std::vector<VertexId> detection_events_of(const DetectorGraph& graph, std::span<const EdgeId> flipped);
/// Parity of flips_logical over the given edges.
bool logical_parity_of(const DetectorGraph& graph, std::span<const EdgeId> flipped);

/// Flips each edge independently with its probability. Deterministic in `seed`.
ErrorSample sample_errors(const DetectorGraph& graph, uint64_t seed);

}  // namespace pmwpm

#endif  // PMWPM_DETECTOR_MODEL_H_
