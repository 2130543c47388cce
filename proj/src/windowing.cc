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

#include "pmwpm/windowing.h"

#include <algorithm>
#include <cmath>

namespace pmwpm {

bool throughput_ok(const TimingModel& tm, const WindowConfig& cfg) {
    return tm.t_w < tm.tau_sg * static_cast<double>(cfg.n_com);
}

namespace {

void check_timing(const TimingModel& tm, uint32_t d) {
    if (d == 0 || !(tm.tau_sg > 0.0)) throw std::domain_error("need d >= 1 and tau_sg > 0");
    if (!(tm.tau_l >= 0.0)) throw std::domain_error("tau_l must be non-negative");
}

}  // namespace

double reaction_time(const TimingModel& tm, uint32_t d) {
    check_timing(tm, d);
    const double window = d * tm.tau_sg;
    if (!(tm.t_w > 0.0 && tm.t_w < window)) throw std::domain_error("reaction time needs 0 < T_w < d tau_sg");
    return 2.0 * window + window * std::ceil((tm.tau_l + tm.t_w) / window - 1.0);
}

double reaction_time_case_form(const TimingModel& tm, uint32_t d) {
    check_timing(tm, d);
    const double window = d * tm.tau_sg;
    if (!(tm.t_w > 0.0 && tm.t_w < window)) throw std::domain_error("reaction time needs 0 < T_w < d tau_sg");
    const double lag = std::ceil(tm.tau_l / window - 1.0);
    const double delta = window * (1.0 + lag) - tm.tau_l;
    if (tm.t_w <= delta) return 2.0 * window + window * lag;
    return 2.0 * window + window * std::ceil(tm.tau_l / window);
}

double reaction_time_parallel(const TimingModel& tm, uint32_t d) {
    check_timing(tm, d);
    if (!(tm.t_w > 0.0)) throw std::domain_error("T_w must be positive");
    const double window = d * tm.tau_sg;
    return 2.0 * window + window * std::ceil((tm.tau_l + 2.0 * tm.t_w) / window - 1.0);
}

std::vector<WindowSpan> plan_windows(uint32_t layers, const WindowConfig& cfg) {
    if (cfg.n_com < 1) throw std::invalid_argument("n_com must be at least 1");
    if (layers < 1) throw std::invalid_argument("need at least one layer");
    std::vector<WindowSpan> out;
    for (uint32_t k = 0;; ++k) {
        WindowSpan w;
        w.index = k;
        w.first = k * cfg.n_com;
        const uint64_t end = static_cast<uint64_t>(w.first) + cfg.n_com + cfg.n_buf;
        w.final = end >= layers;
        w.end = w.final ? layers : static_cast<uint32_t>(end);
        w.commit_end = w.final ? layers : w.first + cfg.n_com;
        out.push_back(w);
        if (w.final) break;
    }
    if (out.size() > 1 && cfg.n_buf == 0) {
        throw std::invalid_argument("n_buf = 0 leaves no buffer between windows");
    }
    return out;
}

namespace {

struct Layout {
    uint32_t layers = 0;
    uint32_t per_layer = 0;
};

Layout layout_of(const DetectorGraph& graph) {
    const size_t nd = graph.num_detectors();
    if (nd == 0) throw ModelError("graph has no detectors");
    uint32_t layers = 0;
    for (size_t v = 0; v < nd; ++v) layers = std::max(layers, std::get<Detector>(graph.vertex(v)).round + 1);
    if (nd % layers != 0) throw ModelError("detectors are not evenly split across layers");
    Layout l{layers, static_cast<uint32_t>(nd / layers)};
    for (size_t v = 0; v < nd; ++v) {
        const auto& det = std::get<Detector>(graph.vertex(v));
        if (det.round * l.per_layer + det.stabilizer != v) throw ModelError("detector ids are not layer-major");
    }
    return l;
}

}  // namespace

WindowSlice slice_window(const DetectorGraph& graph, uint32_t per_layer, uint32_t first, uint32_t end) {
    const size_t nd = graph.num_detectors();
    const uint32_t layers = static_cast<uint32_t>(nd / per_layer);
    if (first >= end || end > layers) throw std::invalid_argument("bad window bounds");
    const uint32_t local_nd = (end - first) * per_layer;

    std::vector<VertexKind> vertices;
    for (uint32_t l = first; l < end; ++l) {
        for (uint32_t s = 0; s < per_layer; ++s) vertices.emplace_back(Detector{l - first, s});
    }
    for (size_t v = nd; v < graph.num_vertices(); ++v) vertices.push_back(graph.vertex(v));
    const bool open_end = end < layers;
    const VertexId time_boundary = static_cast<VertexId>(vertices.size());
    if (open_end) vertices.emplace_back(TimeBoundary{});

    // -1: dropped, -2: beyond the window.
    auto local = [&](VertexId v) -> int64_t {
        if (v >= nd) return static_cast<int64_t>(v - nd + local_nd);
        const uint32_t layer = v / per_layer;
        if (layer < first) return -1;
        if (layer >= end) return -2;
        return static_cast<int64_t>(v - first * per_layer);
    };

    struct Entry {
        DetectorEdge edge;
        int64_t original;
    };
    std::vector<Entry> entries;
    std::map<VertexId, std::vector<double>> to_future;
    for (EdgeId e = 0; e < graph.num_edges(); ++e) {
        const DetectorEdge& edge = graph.edge(e);
        const int64_t a = local(edge.u);
        const int64_t b = local(edge.v);
        if (a == -1 || b == -1) continue;
        if (a == -2 && b == -2) continue;
        if (a == -2 || b == -2) {
            const int64_t inside = a == -2 ? b : a;
            if (inside >= local_nd) continue;  // boundary to a later detector
            to_future[static_cast<VertexId>(inside)].push_back(edge.prob);
            continue;
        }
        DetectorEdge copy = edge;
        copy.u = static_cast<VertexId>(std::min(a, b));
        copy.v = static_cast<VertexId>(std::max(a, b));
        entries.push_back({copy, e});
    }
    for (auto& [v, probs] : to_future) {
        std::sort(probs.begin(), probs.end());
        double sum = 0.0;
        for (double p : probs) sum += p;
        sum = std::min(sum, kMaxEdgeProbability);
        entries.push_back({DetectorEdge{v, time_boundary, sum, integer_weight(sum, graph.scale_c()), false}, -1});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
        return std::pair(x.edge.u, x.edge.v) < std::pair(y.edge.u, y.edge.v);
    });
    WindowSlice slice;
    std::vector<DetectorEdge> edges;
    for (const Entry& entry : entries) {
        edges.push_back(entry.edge);
        slice.original_edge.push_back(entry.original);
    }
    slice.graph = DetectorGraph(std::move(vertices), std::move(edges), graph.scale_c(),
                                GraphInfo{graph.info().distance, end - first});
    return slice;
}

nlohmann::json window_record_to_json(const WindowRecord& r) {
    return {{"window", r.index},
            {"first_round", r.first},
            {"commit_end", r.commit_end},
            {"end_round", r.end},
            {"events", r.events},
            {"artificial_events", r.artificial_events},
            {"path_graph_size", r.path_graph_size},
            {"attempts_used", r.attempts_used},
            {"w_max_used", r.w_max_used},
            {"committed_edges", r.committed_edges},
            {"logical_flip_parity", r.logical_flip_parity}};
}

SlidingWindowDecoder::SlidingWindowDecoder(const DetectorGraph& graph, WindowConfig cfg, PerturbationScheme scheme,
                                           DecodeOptions options)
    : graph_(&graph), cfg_(cfg), scheme_(std::move(scheme)), options_(options) {
    Layout l = layout_of(graph);
    layers_ = l.layers;
    per_layer_ = l.per_layer;
    plan_ = plan_windows(layers_, cfg_);
    reset();
}

void SlidingWindowDecoder::reset() {
    pending_.assign(graph_->num_detectors(), 0);
    artificial_.assign(graph_->num_detectors(), 0);
    correction_.assign(graph_->num_edges(), 0);
    next_round_ = 0;
    next_window_ = 0;
    records_.clear();
}

std::vector<WindowRecord> SlidingWindowDecoder::push_round(uint32_t round, std::span<const VertexId> events) {
    if (round != next_round_) {
        throw std::invalid_argument("expected round " + std::to_string(next_round_) + ", got " + std::to_string(round));
    }
    for (VertexId v : events) {
        if (v >= graph_->num_detectors() || v / per_layer_ != round) {
            throw std::invalid_argument("detector " + std::to_string(v) + " is not in round " + std::to_string(round));
        }
        if (pending_[v] & 2) throw std::invalid_argument("duplicate detector " + std::to_string(v));
        pending_[v] ^= 3;  // bit 1 marks "seen this round"
    }
    for (VertexId v : events) pending_[v] &= 1;
    ++next_round_;
    std::vector<WindowRecord> done;
    while (next_window_ < plan_.size() && plan_[next_window_].end <= next_round_) {
        done.push_back(decode_window(plan_[next_window_]));
        records_.push_back(done.back());
        ++next_window_;
    }
    return done;
}

WindowRecord SlidingWindowDecoder::decode_window(const WindowSpan& span) {
    auto& slice = slices_[{span.first, span.end}];
    if (!slice) slice = std::make_shared<WindowSlice>(slice_window(*graph_, per_layer_, span.first, span.end));
    auto& table = tables_[slice->graph.hash()];
    if (!table) table = std::make_shared<DistanceTable>(precompute_tables(slice->graph, options_.threads));

    WindowRecord record;
    record.index = span.index;
    record.first = span.first;
    record.commit_end = span.commit_end;
    record.end = span.end;
    const VertexId offset = span.first * per_layer_;
    std::vector<VertexId> local_events;
    for (VertexId v = offset; v < span.end * per_layer_; ++v) {
        if (pending_[v]) local_events.push_back(v - offset);
        if (artificial_[v]) ++record.artificial_events;
    }
    record.events = local_events.size();

    const PathGraph pg = build_path_graph(*table, local_events, slice->graph);
    record.path_graph_size = pg.size();
    DecodeResult decoded;
    try {
        decoded = decode(pg.graph, scheme_, options_);
    } catch (const std::exception& e) {
        throw WindowDecodeFailure(span.index, e.what());
    }
    record.attempts_used = decoded.attempts_used;
    record.w_max_used = decoded.w_max_used;
    const Recovery recovery = matching_to_recovery(decoded.matching.pairs, pg, *table, slice->graph);

    for (EdgeId local_edge : recovery.corrected_edges) {
        const int64_t orig = slice->original_edge[local_edge];
        if (orig < 0) {
            // Time-boundary edges only touch the last layer, which is never committed.
            continue;
        }
        const DetectorEdge& edge = graph_->edge(static_cast<EdgeId>(orig));
        uint32_t earliest = layers_;
        for (VertexId v : {edge.u, edge.v}) {
            if (v < graph_->num_detectors()) earliest = std::min(earliest, v / per_layer_);
        }
        if (!span.final && earliest >= span.commit_end) continue;
        correction_[orig] ^= 1;
        record.committed_edges.push_back(static_cast<EdgeId>(orig));
        record.logical_flip_parity ^= edge.flips_logical;
        for (VertexId v : {edge.u, edge.v}) {
            if (v < graph_->num_detectors() && v / per_layer_ >= span.commit_end) {
                pending_[v] ^= 1;
                artificial_[v] ^= 1;
            }
        }
    }
    std::sort(record.committed_edges.begin(), record.committed_edges.end());
    // Committed layers are settled; artificial toggles there have been consumed.
    for (VertexId v = offset; v < span.commit_end * per_layer_; ++v) artificial_[v] = 0;
    return record;
}

WindowRunResult SlidingWindowDecoder::finish() {
    if (next_round_ != layers_) {
        throw std::logic_error("finish() before all " + std::to_string(layers_) + " rounds were pushed");
    }
    WindowRunResult result;
    result.windows = records_;
    for (EdgeId e = 0; e < correction_.size(); ++e) {
        if (correction_[e]) {
            result.committed_edges.push_back(e);
            result.logical_flip_correction ^= graph_->edge(e).flips_logical;
        }
    }
    reset();
    return result;
}

WindowRunResult SlidingWindowDecoder::run(std::span<const VertexId> events) {
    reset();
    std::vector<std::vector<VertexId>> by_layer(layers_);
    for (VertexId v : events) {
        if (v >= graph_->num_detectors()) throw std::invalid_argument("event is not a detector");
        by_layer[v / per_layer_].push_back(v);
    }
    for (uint32_t r = 0; r < layers_; ++r) push_round(r, by_layer[r]);
    return finish();
}

}  // namespace pmwpm
