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

#include "pmwpm/shortest_paths.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <thread>

#include <nlohmann/json.hpp>

namespace pmwpm {

namespace {

constexpr int64_t kUnreachable = std::numeric_limits<int64_t>::max() / 4;
constexpr std::array<char, 8> kTableMagic = {'P', 'M', 'W', 'P', 'M', 'T', 'B', 'L'};
constexpr uint32_t kTableVersion = 1;

// Single-source distances; boundary vertices other than the source are sinks.
std::vector<int64_t> dijkstra(const DetectorGraph& graph, VertexId source) {
    std::vector<int64_t> dist(graph.num_vertices(), kUnreachable);
    using Item = std::pair<int64_t, VertexId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[source] = 0;
    queue.emplace(0, source);
    while (!queue.empty()) {
        auto [d, x] = queue.top();
        queue.pop();
        if (d != dist[x]) continue;
        if (x != source && x >= graph.num_detectors()) continue;
        for (const auto& [y, e] : graph.neighbors(x)) {
            int64_t nd = d + graph.edge(e).weight;
            if (nd < dist[y]) {
                dist[y] = nd;
                queue.emplace(nd, y);
            }
        }
    }
    return dist;
}

// Lexicographically smallest edge-id sequence of a shortest path from
// `from` to `target`; `to_target` holds distances rooted at `target`.
void append_shortest_path(const DetectorGraph& graph, VertexId from, VertexId target,
                          const std::vector<int64_t>& to_target, std::vector<EdgeId>& out) {
    VertexId cur = from;
    while (cur != target) {
        bool advanced = false;
        for (const auto& [y, e] : graph.neighbors(cur)) {
            if (y != target && y >= graph.num_detectors()) continue;
            if (to_target[y] == kUnreachable) continue;
            if (graph.edge(e).weight + to_target[y] == to_target[cur]) {
                out.push_back(e);
                cur = y;
                advanced = true;
                break;
            }
        }
        if (!advanced) {
            throw ModelError("internal error: shortest path reconstruction failed");
        }
    }
}

void put_bytes(std::ostream& out, uint64_t value, int width) {
    for (int i = 0; i < width; ++i) out.put(static_cast<char>((value >> (8 * i)) & 0xFF));
}

uint64_t get_bytes(std::istream& in, int width) {
    uint64_t value = 0;
    for (int i = 0; i < width; ++i) {
        int c = in.get();
        if (c == std::char_traits<char>::eof()) throw TableMismatch("table file truncated");
        value |= static_cast<uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return value;
}

}  // namespace

size_t DistanceTable::pair_slot(VertexId a, VertexId b) const {
    if (a > b) std::swap(a, b);
    // Row a of the strict upper triangle starts after sum_{r<a} (n-1-r) slots.
    size_t n = num_detectors_;
    return static_cast<size_t>(a) * (2 * n - a - 1) / 2 + (b - a - 1);
}

std::span<const EdgeId> DistanceTable::path(VertexId a, VertexId b) const {
    if (a >= num_detectors_ || b >= num_detectors_) throw std::out_of_range("detector id out of range");
    if (a == b) return {};
    size_t slot = pair_slot(a, b);
    return std::span<const EdgeId>(path_pool_).subspan(pair_offset_[slot], pair_offset_[slot + 1] - pair_offset_[slot]);
}

std::span<const EdgeId> DistanceTable::boundary_path(VertexId a) const {
    if (a >= num_detectors_) throw std::out_of_range("detector id out of range");
    return std::span<const EdgeId>(path_pool_).subspan(boundary_offset_[a], boundary_offset_[a + 1] - boundary_offset_[a]);
}

DistanceTable precompute_tables(const DetectorGraph& graph, unsigned threads) {
    const size_t n = graph.num_vertices();
    const size_t nd = graph.num_detectors();
    std::vector<std::vector<int64_t>> dist(n);

    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t s = next++; s < n; s = next++) dist[s] = dijkstra(graph, static_cast<VertexId>(s));
    };
    threads = std::max(1u, threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    DistanceTable table;
    table.graph_hash_ = graph.hash();
    table.num_vertices_ = static_cast<uint32_t>(n);
    table.num_detectors_ = static_cast<uint32_t>(nd);
    table.pair_dist_.assign(nd * nd, 0);
    for (size_t a = 0; a < nd; ++a) {
        for (size_t b = 0; b < nd; ++b) table.pair_dist_[a * nd + b] = dist[a][b];
    }

    table.boundary_.resize(nd);
    table.boundary_offset_.push_back(0);
    for (size_t a = 0; a < nd; ++a) {
        BoundaryRecord best{0, kUnreachable};
        for (size_t b = nd; b < n; ++b) {
            if (dist[a][b] < best.distance) best = {static_cast<VertexId>(b), dist[a][b]};
        }
        if (best.distance == kUnreachable) {
            throw ModelError("detector " + std::to_string(a) + " cannot reach any boundary vertex");
        }
        table.boundary_[a] = best;
        append_shortest_path(graph, static_cast<VertexId>(a), best.boundary, dist[best.boundary], table.path_pool_);
        table.boundary_offset_.push_back(table.path_pool_.size());
    }

    table.pair_offset_.push_back(table.path_pool_.size());
    for (size_t a = 0; a < nd; ++a) {
        for (size_t b = a + 1; b < nd; ++b) {
            if (dist[a][b] != kUnreachable) {
                append_shortest_path(graph, static_cast<VertexId>(a), static_cast<VertexId>(b), dist[b],
                                     table.path_pool_);
            }
            table.pair_offset_.push_back(table.path_pool_.size());
        }
    }
    return table;
}

// Binary layout (little-endian):
//   magic[8] version:u32 graph_hash:u64 num_vertices:u32 num_detectors:u32 pool_size:u64
//   pair_dist:i64[nd*nd] (row-major)
//   nearest boundary: {boundary:u32 distance:i64}[nd]
//   boundary path offsets:u64[nd+1]  pair path offsets:u64[nd(nd-1)/2+1]
//   path pool:u32[pool_size]
void DistanceTable::write_binary(std::ostream& out) const {
    out.write(kTableMagic.data(), kTableMagic.size());
    put_bytes(out, kTableVersion, 4);
    put_bytes(out, graph_hash_, 8);
    put_bytes(out, num_vertices_, 4);
    put_bytes(out, num_detectors_, 4);
    put_bytes(out, path_pool_.size(), 8);
    for (int64_t d : pair_dist_) put_bytes(out, static_cast<uint64_t>(d), 8);
    for (const BoundaryRecord& r : boundary_) {
        put_bytes(out, r.boundary, 4);
        put_bytes(out, static_cast<uint64_t>(r.distance), 8);
    }
    for (uint64_t o : boundary_offset_) put_bytes(out, o, 8);
    for (uint64_t o : pair_offset_) put_bytes(out, o, 8);
    for (EdgeId e : path_pool_) put_bytes(out, e, 4);
}

DistanceTable DistanceTable::read_binary(std::istream& in) {
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kTableMagic) throw TableMismatch("not a pmwpm table file");
    if (get_bytes(in, 4) != kTableVersion) throw TableMismatch("unsupported table version");
    DistanceTable t;
    t.graph_hash_ = get_bytes(in, 8);
    t.num_vertices_ = static_cast<uint32_t>(get_bytes(in, 4));
    t.num_detectors_ = static_cast<uint32_t>(get_bytes(in, 4));
    uint64_t pool = get_bytes(in, 8);
    const size_t nd = t.num_detectors_;
    t.pair_dist_.resize(nd * nd);
    for (auto& d : t.pair_dist_) d = static_cast<int64_t>(get_bytes(in, 8));
    t.boundary_.resize(nd);
    for (auto& r : t.boundary_) {
        r.boundary = static_cast<VertexId>(get_bytes(in, 4));
        r.distance = static_cast<int64_t>(get_bytes(in, 8));
    }
    t.boundary_offset_.resize(nd + 1);
    for (auto& o : t.boundary_offset_) o = get_bytes(in, 8);
    t.pair_offset_.resize(nd * (nd > 0 ? nd - 1 : 0) / 2 + 1);
    for (auto& o : t.pair_offset_) o = get_bytes(in, 8);
    t.path_pool_.resize(pool);
    for (auto& e : t.path_pool_) e = static_cast<EdgeId>(get_bytes(in, 4));
    for (uint64_t o : t.boundary_offset_)
        if (o > pool) throw TableMismatch("corrupt table offsets");
    for (uint64_t o : t.pair_offset_)
        if (o > pool) throw TableMismatch("corrupt table offsets");
    return t;
}

std::string DistanceTable::to_json(bool include_paths) const {
    nlohmann::json j;
    char hash[17];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(graph_hash_));
    j["format"] = "pmwpm-table";
    j["version"] = kTableVersion;
    j["graph_hash"] = hash;
    j["num_vertices"] = num_vertices_;
    j["num_detectors"] = num_detectors_;
    auto dist = nlohmann::json::array();
    for (size_t a = 0; a < num_detectors_; ++a) {
        auto row = nlohmann::json::array();
        for (size_t b = 0; b < num_detectors_; ++b) {
            int64_t d = pair_dist_[a * num_detectors_ + b];
            row.push_back(d == kUnreachable ? nlohmann::json(nullptr) : nlohmann::json(d));
        }
        dist.push_back(std::move(row));
    }
    j["pair_dist"] = std::move(dist);
    auto nb = nlohmann::json::array();
    for (size_t a = 0; a < num_detectors_; ++a) {
        nlohmann::json r = {{"detector", a}, {"boundary", boundary_[a].boundary}, {"distance", boundary_[a].distance}};
        if (include_paths) {
            auto p = boundary_path(static_cast<VertexId>(a));
            r["path"] = std::vector<EdgeId>(p.begin(), p.end());
        }
        nb.push_back(std::move(r));
    }
    j["nearest_boundary"] = std::move(nb);
    if (include_paths) {
        auto paths = nlohmann::json::array();
        for (size_t a = 0; a < num_detectors_; ++a) {
            for (size_t b = a + 1; b < num_detectors_; ++b) {
                auto p = path(static_cast<VertexId>(a), static_cast<VertexId>(b));
                paths.push_back({{"a", a}, {"b", b}, {"path", std::vector<EdgeId>(p.begin(), p.end())}});
            }
        }
        j["pair_paths"] = std::move(paths);
    }
    return j.dump(2);
}

PathGraph make_path_graph(std::span<const int64_t> pair_weight, std::span<const int64_t> boundary_weight) {
    const uint32_t k = static_cast<uint32_t>(boundary_weight.size());
    if (pair_weight.size() != static_cast<size_t>(k) * k) {
        throw std::invalid_argument("pair weight matrix must be k x k");
    }
    PathGraph pg;
    pg.graph.num_vertices = 2 * k;
    for (uint32_t i = 0; i < k; ++i) {
        for (uint32_t j = i + 1; j < k; ++j) {
            int64_t w = pair_weight[static_cast<size_t>(i) * k + j];
            if (w == kUnreachable) continue;
            pg.graph.edges.push_back({i, j, w});
        }
    }
    for (uint32_t i = 0; i < k; ++i) pg.graph.edges.push_back({i, k + i, boundary_weight[i]});
    for (uint32_t i = 0; i < k; ++i) {
        for (uint32_t j = i + 1; j < k; ++j) pg.graph.edges.push_back({k + i, k + j, 0});
    }
    return pg;
}

PathGraph build_path_graph(const DistanceTable& table, std::span<const VertexId> events, uint64_t graph_hash) {
    if (graph_hash != table.graph_hash()) {
        throw TableMismatch("lookup table was built for a different detector graph");
    }
    std::vector<VertexId> actives(events.begin(), events.end());
    std::sort(actives.begin(), actives.end());
    for (size_t i = 0; i < actives.size(); ++i) {
        if (actives[i] >= table.num_detectors()) {
            throw std::invalid_argument("event " + std::to_string(actives[i]) + " is not a detector");
        }
        if (i > 0 && actives[i] == actives[i - 1]) {
            throw std::invalid_argument("duplicate detection event " + std::to_string(actives[i]));
        }
    }
    const size_t k = actives.size();
    std::vector<int64_t> pair(k * k, 0);
    std::vector<int64_t> boundary(k, 0);
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = 0; j < k; ++j) pair[i * k + j] = table.distance(actives[i], actives[j]);
        boundary[i] = table.nearest_boundary(actives[i]).distance;
    }
    PathGraph pg = make_path_graph(pair, boundary);
    pg.actives = std::move(actives);
    for (VertexId a : pg.actives) pg.mirrors.push_back(table.nearest_boundary(a).boundary);
    return pg;
}

Recovery matching_to_recovery(std::span<const VertexPair> matching, const PathGraph& pg, const DistanceTable& table,
                              const DetectorGraph& graph) {
    if (table.graph_hash() != graph.hash()) {
        throw TableMismatch("lookup table was built for a different detector graph");
    }
    if (pg.actives.size() != pg.mirrors.size() || pg.graph.num_vertices != 2 * pg.actives.size()) {
        throw std::invalid_argument("path graph is missing its detector mapping");
    }
    if (!is_perfect_matching(pg.graph, matching)) {
        throw std::invalid_argument("matching is not a perfect matching of the path graph");
    }
    const uint32_t k = static_cast<uint32_t>(pg.actives.size());
    std::vector<uint8_t> parity(graph.num_edges(), 0);
    for (auto [u, v] : matching) {
        if (u > v) std::swap(u, v);
        if (v < k) {
            for (EdgeId e : table.path(pg.actives[u], pg.actives[v])) parity[e] ^= 1;
        } else if (u < k) {
            for (EdgeId e : table.boundary_path(pg.actives[u])) parity[e] ^= 1;
        }
    }
    Recovery r;
    for (size_t e = 0; e < parity.size(); ++e) {
        if (parity[e]) {
            r.corrected_edges.push_back(static_cast<EdgeId>(e));
            r.logical_flip_correction ^= graph.edge(static_cast<EdgeId>(e)).flips_logical;
        }
    }
    return r;
}

}  // namespace pmwpm
