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

#include "pmwpm/detector_model.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "pmwpm/hashing.h"

namespace pmwpm {

namespace {

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

}  // namespace

int64_t integer_weight(double prob, int64_t scale_c) {
    if (!(prob > 0.0 && prob < 1.0)) {
        throw ModelError("edge probability must lie in (0,1), got " + format_double(prob));
    }
    if (scale_c <= 0) {
        throw ModelError("scale constant C must be positive");
    }
    double w = std::ceil(-static_cast<double>(scale_c) * std::log(prob));
    return std::max<int64_t>(0, static_cast<int64_t>(w));
}

std::vector<MergedEdge> merge_parallel_mechanisms(std::span<const Mechanism> mechanisms) {
    struct Key {
        VertexId u, v;
        double prob;
        bool flag;
        auto operator<=>(const Key&) const = default;
    };
    std::vector<Key> keys;
    keys.reserve(mechanisms.size());
    for (const Mechanism& m : mechanisms) {
        if (!(m.prob > 0.0 && m.prob < 1.0)) {
            throw ModelError("mechanism probability must lie in (0,1), got " + format_double(m.prob));
        }
        if (m.u == m.v) {
            throw ModelError("mechanism forms a self-loop on vertex " + std::to_string(m.u));
        }
        keys.push_back({std::min(m.u, m.v), std::max(m.u, m.v), m.prob, m.flips_logical});
    }
    // Sorting first makes the floating-point sums independent of input order.
    std::sort(keys.begin(), keys.end());

    std::vector<MergedEdge> out;
    for (size_t i = 0; i < keys.size();) {
        size_t j = i;
        double total = 0.0;
        while (j < keys.size() && keys[j].u == keys[i].u && keys[j].v == keys[i].v) {
            if (keys[j].flag != keys[i].flag) {
                throw ModelError("mechanisms on edge (" + std::to_string(keys[i].u) + ", " +
                                 std::to_string(keys[i].v) + ") disagree on the logical flag");
            }
            total += keys[j].prob;
            ++j;
        }
        MergedEdge e{keys[i].u, keys[i].v, total, keys[i].flag, false};
        if (e.prob > kMaxEdgeProbability) {
            e.prob = kMaxEdgeProbability;
            e.clamped = true;
        }
        out.push_back(e);
        i = j;
    }
    return out;
}

DetectorGraph::DetectorGraph(std::vector<VertexKind> vertices, std::vector<DetectorEdge> edges, int64_t scale_c,
                             GraphInfo info)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), scale_c_(scale_c), info_(info) {
    if (scale_c_ <= 0) {
        throw ModelError("scale constant C must be positive");
    }
    num_detectors_ = 0;
    while (num_detectors_ < vertices_.size() && is_detector(vertices_[num_detectors_])) {
        ++num_detectors_;
    }
    for (size_t v = num_detectors_; v < vertices_.size(); ++v) {
        if (is_detector(vertices_[v])) {
            throw ModelError("detector vertices must precede boundary vertices (vertex " + std::to_string(v) + ")");
        }
    }
    adjacency_.assign(vertices_.size(), {});
    for (size_t i = 0; i < edges_.size(); ++i) {
        const DetectorEdge& e = edges_[i];
        if (e.u >= e.v) {
            throw ModelError("edge " + std::to_string(i) + " must satisfy u < v (self-loops are not allowed)");
        }
        if (e.v >= vertices_.size()) {
            throw ModelError("edge " + std::to_string(i) + " references a missing vertex");
        }
        if (i > 0 && std::pair(edges_[i - 1].u, edges_[i - 1].v) >= std::pair(e.u, e.v)) {
            throw ModelError("edges must be sorted by (u, v) without parallel edges (edge " + std::to_string(i) + ")");
        }
        if (!is_detector(vertices_[e.u]) && !is_detector(vertices_[e.v])) {
            throw ModelError("edge " + std::to_string(i) + " joins two boundary vertices");
        }
        if (e.weight != integer_weight(e.prob, scale_c_)) {
            throw ModelError("edge " + std::to_string(i) + " weight does not match ceil(-C log p)");
        }
        adjacency_[e.u].emplace_back(e.v, static_cast<EdgeId>(i));
        adjacency_[e.v].emplace_back(e.u, static_cast<EdgeId>(i));
    }
    hash_ = fnv1a64(serialize());
}

DetectorGraph DetectorGraph::from_mechanisms(std::vector<VertexKind> vertices, std::span<const Mechanism> mechanisms,
                                             int64_t scale_c, GraphInfo info, size_t* clamped) {
    std::vector<MergedEdge> merged = merge_parallel_mechanisms(mechanisms);
    std::vector<DetectorEdge> edges;
    edges.reserve(merged.size());
    size_t n_clamped = 0;
    for (const MergedEdge& m : merged) {
        n_clamped += m.clamped ? 1 : 0;
        edges.push_back({m.u, m.v, m.prob, integer_weight(m.prob, scale_c), m.flips_logical});
    }
    if (clamped != nullptr) {
        *clamped = n_clamped;
    }
    return DetectorGraph(std::move(vertices), std::move(edges), scale_c, info);
}

size_t DetectorGraph::max_degree() const {
    size_t best = 0;
    for (const auto& adj : adjacency_) {
        best = std::max(best, adj.size());
    }
    return best;
}

int64_t DetectorGraph::find_edge(VertexId u, VertexId v) const {
    if (u >= adjacency_.size()) {
        return -1;
    }
    for (const auto& [w, e] : adjacency_[u]) {
        if (w == v) {
            return e;
        }
    }
    return -1;
}

// Format (version 1):
//   pmwpm-graph 1 d=<d> rounds=<r> C=<C> vertices=<n> edges=<m>
//   v <id> D <round> <stabilizer> | v <id> S | v <id> T
//   e <u> <v> <prob> <weight> <flips_logical 0|1>
std::string DetectorGraph::serialize() const {
    std::ostringstream out;
    out << "pmwpm-graph 1 d=" << info_.distance << " rounds=" << info_.rounds << " C=" << scale_c_
        << " vertices=" << vertices_.size() << " edges=" << edges_.size() << "\n";
    for (size_t v = 0; v < vertices_.size(); ++v) {
        out << "v " << v;
        if (const auto* d = std::get_if<Detector>(&vertices_[v])) {
            out << " D " << d->round << " " << d->stabilizer;
        } else if (std::holds_alternative<SpaceBoundary>(vertices_[v])) {
            out << " S";
        } else {
            out << " T";
        }
        out << "\n";
    }
    for (const DetectorEdge& e : edges_) {
        out << "e " << e.u << " " << e.v << " " << format_double(e.prob) << " " << e.weight << " "
            << (e.flips_logical ? 1 : 0) << "\n";
    }
    return out.str();
}

namespace {

template <typename T>
T parse_number(std::string_view tok, std::string_view what) {
    T value{};
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        throw ModelError("graph parse error: bad " + std::string(what) + " '" + std::string(tok) + "'");
    }
    return value;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string_view expect_field(std::string_view tok, std::string_view key) {
    if (tok.size() <= key.size() || tok.substr(0, key.size()) != key || tok[key.size()] != '=') {
        throw ModelError("graph parse error: expected '" + std::string(key) + "=...'");
    }
    return tok.substr(key.size() + 1);
}

}  // namespace

DetectorGraph parse_graph(std::string_view text) {
    std::vector<std::string_view> lines;
    for (size_t pos = 0; pos < text.size();) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        if (nl > pos) lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    if (lines.empty()) {
        throw ModelError("graph parse error: empty input");
    }
    auto head = split_ws(lines[0]);
    if (head.size() != 7 || head[0] != "pmwpm-graph") {
        throw ModelError("graph parse error: bad header");
    }
    if (head[1] != "1") {
        throw ModelError("graph parse error: unsupported version " + std::string(head[1]));
    }
    GraphInfo info;
    info.distance = parse_number<uint32_t>(expect_field(head[2], "d"), "distance");
    info.rounds = parse_number<uint32_t>(expect_field(head[3], "rounds"), "rounds");
    auto scale_c = parse_number<int64_t>(expect_field(head[4], "C"), "C");
    auto nv = parse_number<size_t>(expect_field(head[5], "vertices"), "vertex count");
    auto ne = parse_number<size_t>(expect_field(head[6], "edges"), "edge count");
    if (lines.size() != 1 + nv + ne) {
        throw ModelError("graph parse error: line count does not match header");
    }
    std::vector<VertexKind> vertices;
    vertices.reserve(nv);
    for (size_t i = 0; i < nv; ++i) {
        auto tok = split_ws(lines[1 + i]);
        if (tok.size() < 3 || tok[0] != "v" || parse_number<size_t>(tok[1], "vertex id") != i) {
            throw ModelError("graph parse error: bad vertex line " + std::to_string(i));
        }
        if (tok[2] == "D" && tok.size() == 5) {
            vertices.emplace_back(Detector{parse_number<uint32_t>(tok[3], "round"),
                                           parse_number<uint32_t>(tok[4], "stabilizer")});
        } else if (tok[2] == "S" && tok.size() == 3) {
            vertices.emplace_back(SpaceBoundary{});
        } else if (tok[2] == "T" && tok.size() == 3) {
            vertices.emplace_back(TimeBoundary{});
        } else {
            throw ModelError("graph parse error: bad vertex line " + std::to_string(i));
        }
    }
    std::vector<DetectorEdge> edges;
    edges.reserve(ne);
    for (size_t i = 0; i < ne; ++i) {
        auto tok = split_ws(lines[1 + nv + i]);
        if (tok.size() != 6 || tok[0] != "e") {
            throw ModelError("graph parse error: bad edge line " + std::to_string(i));
        }
        DetectorEdge e;
        e.u = parse_number<VertexId>(tok[1], "edge endpoint");
        e.v = parse_number<VertexId>(tok[2], "edge endpoint");
        e.prob = parse_number<double>(tok[3], "probability");
        e.weight = parse_number<int64_t>(tok[4], "weight");
        auto flag = parse_number<int>(tok[5], "logical flag");
        if (flag != 0 && flag != 1) {
            throw ModelError("graph parse error: logical flag must be 0 or 1");
        }
        e.flips_logical = flag == 1;
        edges.push_back(e);
    }
    return DetectorGraph(std::move(vertices), std::move(edges), scale_c, info);
}

DetectorGraph build_rotated_memory_graph(uint32_t distance, uint32_t rounds, double p, int64_t scale_c) {
    if (distance < 3 || distance % 2 == 0) {
        throw std::invalid_argument("distance must be odd and at least 3");
    }
    if (rounds < 1) {
        throw std::invalid_argument("rounds must be at least 1");
    }
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("physical error rate must lie in (0,1)");
    }
    const uint32_t d = distance;

    // Z plaquettes sit at corner coordinates (i, j) in [0, d]^2 with i + j even:
    // the (d-1)^2 bulk corners plus weight-two plaquettes on the top and bottom rows.
    std::map<std::pair<uint32_t, uint32_t>, uint32_t> plaquette_index;
    for (uint32_t i = 0; i <= d; ++i) {
        for (uint32_t j = 1; j + 1 <= d; ++j) {
            if ((i + j) % 2 != 0) continue;
            plaquette_index.emplace(std::pair(i, j), 0);
        }
    }
    uint32_t next = 0;
    for (auto& [coord, idx] : plaquette_index) idx = next++;
    const uint32_t per_round = stabilizers_per_round(d);
    if (next != per_round) {
        throw ModelError("internal error: wrong stabilizer count");
    }

    std::vector<VertexKind> vertices;
    for (uint32_t r = 0; r < rounds; ++r) {
        for (uint32_t s = 0; s < per_round; ++s) vertices.emplace_back(Detector{r, s});
    }
    const VertexId left = static_cast<VertexId>(vertices.size());
    vertices.emplace_back(SpaceBoundary{});
    const VertexId right = static_cast<VertexId>(vertices.size());
    vertices.emplace_back(SpaceBoundary{});
    auto det = [&](uint32_t r, uint32_t s) { return static_cast<VertexId>(r * per_round + s); };

    struct Qubit {
        std::vector<uint32_t> stabs;  // sorted
        bool on_left;
        bool flips_logical;
    };
    std::vector<Qubit> qubits;
    for (uint32_t r = 0; r < d; ++r) {
        for (uint32_t c = 0; c < d; ++c) {
            Qubit q{{}, c == 0, c == 0};
            for (auto [di, dj] : {std::pair(0u, 0u), std::pair(0u, 1u), std::pair(1u, 0u), std::pair(1u, 1u)}) {
                auto it = plaquette_index.find({r + di, c + dj});
                if (it != plaquette_index.end()) q.stabs.push_back(it->second);
            }
            std::sort(q.stabs.begin(), q.stabs.end());
            if (q.stabs.empty() || q.stabs.size() > 2 || (q.stabs.size() == 1 && c != 0 && c != d - 1)) {
                throw ModelError("internal error: unexpected qubit-stabilizer incidence");
            }
            qubits.push_back(std::move(q));
        }
    }

    std::vector<Mechanism> mechanisms;
    for (uint32_t t = 0; t < rounds; ++t) {
        for (const Qubit& q : qubits) {
            VertexId a = det(t, q.stabs[0]);
            VertexId b = q.stabs.size() == 2 ? det(t, q.stabs[1]) : (q.on_left ? left : right);
            mechanisms.push_back({a, b, p, q.flips_logical});
        }
        if (t + 1 < rounds) {
            for (uint32_t s = 0; s < per_round; ++s) {
                mechanisms.push_back({det(t, s), det(t + 1, s), p, false});
            }
            // A data fault between the two checks of a qubit is seen by the
            // later-scheduled stabilizer this round and the other one next round.
            for (const Qubit& q : qubits) {
                if (q.stabs.size() == 2) {
                    mechanisms.push_back({det(t, q.stabs[1]), det(t + 1, q.stabs[0]), p, q.flips_logical});
                }
            }
        }
    }
    return DetectorGraph::from_mechanisms(std::move(vertices), mechanisms, scale_c, GraphInfo{distance, rounds});
}

std::vector<VertexId> detection_events_of(const DetectorGraph& graph, std::span<const EdgeId> flipped) {
    std::vector<uint8_t> parity(graph.num_detectors(), 0);
    for (EdgeId e : flipped) {
        const DetectorEdge& edge = graph.edge(e);
        if (edge.u < graph.num_detectors()) parity[edge.u] ^= 1;
        if (edge.v < graph.num_detectors()) parity[edge.v] ^= 1;
    }
    std::vector<VertexId> events;
    for (size_t v = 0; v < parity.size(); ++v) {
        if (parity[v]) events.push_back(static_cast<VertexId>(v));
    }
    return events;
}

bool logical_parity_of(const DetectorGraph& graph, std::span<const EdgeId> flipped) {
    bool parity = false;
    for (EdgeId e : flipped) parity ^= graph.edge(e).flips_logical;
    return parity;
}

ErrorSample sample_errors(const DetectorGraph& graph, uint64_t seed) {
    std::mt19937_64 rng(seed);
    ErrorSample sample;
    for (size_t e = 0; e < graph.num_edges(); ++e) {
        if (unit_interval(rng()) < graph.edge(static_cast<EdgeId>(e)).prob) {
            sample.flipped_edges.push_back(static_cast<EdgeId>(e));
        }
    }
    sample.detection_events = detection_events_of(graph, sample.flipped_edges);
    sample.logical_flip = logical_parity_of(graph, sample.flipped_edges);
    return sample;
}

}  // namespace pmwpm
