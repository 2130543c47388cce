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

#include "pmwpm/isolation.h"

#include <algorithm>
#include <atomic>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>
#include <type_traits>

#include "pmwpm/hashing.h"

namespace pmwpm {

int64_t isolation_scale(uint32_t num_vertices, int64_t w_max) {
    if (w_max < 1) throw std::invalid_argument("w_max must be at least 1");
    __int128 scale = static_cast<__int128>(num_vertices / 2) * (w_max - 1) + 1;
    if (scale > std::numeric_limits<int64_t>::max()) throw std::overflow_error("isolation scale overflows int64");
    return static_cast<int64_t>(scale);
}

PerturbedWeights PerturbedWeights::make(const WeightedGraph& graph, std::vector<int64_t> perturbation, int64_t w_max) {
    if (perturbation.size() != graph.edges.size()) {
        throw std::invalid_argument("one perturbation per edge is required");
    }
    PerturbedWeights pw;
    pw.w_max = w_max;
    pw.scale = isolation_scale(graph.num_vertices, w_max);
    pw.perturbation = std::move(perturbation);
    pw.base.reserve(graph.edges.size());
    pw.modified.reserve(graph.edges.size());
    for (size_t i = 0; i < graph.edges.size(); ++i) {
        int64_t w = graph.edges[i].weight;
        int64_t p = pw.perturbation[i];
        if (w < 0) throw std::invalid_argument("base weights must be non-negative");
        if (p < 1 || p > w_max) throw std::invalid_argument("perturbation outside [1, w_max]");
        __int128 m = static_cast<__int128>(pw.scale) * w + p;
        if (m > std::numeric_limits<int64_t>::max()) throw std::overflow_error("modified weight overflows int64");
        pw.base.push_back(w);
        pw.modified.push_back(static_cast<int64_t>(m));
    }
    return pw;
}

BigMatrix build_b_matrix(const WeightedGraph& graph, const PerturbedWeights& weights) {
    BigMatrix b(graph.num_vertices);
    for (size_t i = 0; i < graph.edges.size(); ++i) {
        const WeightedEdge& e = graph.edges[i];
        BigInt x;
        mpz_ui_pow_ui(x.get_mpz_t(), 2, static_cast<unsigned long>(weights.modified[i]));
        b.at(e.u, e.v) = x;
        b.at(e.v, e.u) = -x;
    }
    return b;
}

const char* to_string(ExtractStatus status) {
    switch (status) {
        case ExtractStatus::kFound:
            return "found";
        case ExtractStatus::kSingular:
            return "singular";
        case ExtractStatus::kNotPerfect:
            return "not-perfect";
        case ExtractStatus::kWeightMismatch:
            return "weight-mismatch";
    }
    return "unknown";
}

namespace {

// Accepts the candidate edge set if it is a perfect matching whose weight
// (in the same units as w_star) equals w_star.
ExtractResult finish(const WeightedGraph& graph, const std::vector<size_t>& candidate,
                     const std::vector<int64_t>& weight_units, int64_t w_star, int64_t reported_w_star) {
    ExtractResult result;
    result.w_star = reported_w_star;
    std::vector<VertexPair> pairs;
    pairs.reserve(candidate.size());
    int64_t total = 0;
    int64_t base = 0;
    for (size_t e : candidate) {
        pairs.emplace_back(graph.edges[e].u, graph.edges[e].v);
        total += weight_units[e];
        base += graph.edges[e].weight;
    }
    if (!is_perfect_matching(graph, pairs)) {
        result.status = ExtractStatus::kNotPerfect;
        return result;
    }
    if (total != w_star) {
        result.status = ExtractStatus::kWeightMismatch;
        return result;
    }
    result.status = ExtractStatus::kFound;
    result.matching = Matching{canonical_pairs(std::move(pairs)), base};
    return result;
}

ExtractResult extract_exact(const WeightedGraph& graph, const PerturbedWeights& weights) {
    BigMatrix b = build_b_matrix(graph, weights);
    BigInt det = det_berkowitz(b);
    if (det == 0) return ExtractResult{};
    const auto w_star = static_cast<int64_t>(two_adic_valuation(det) / 2);
    std::vector<size_t> candidate;
    for (size_t i = 0; i < graph.edges.size(); ++i) {
        const WeightedEdge& e = graph.edges[i];
        BigInt m = det_berkowitz(minor(b, e.u, e.v));
        if (m == 0) continue;
        // 2^{w~} det(B_sub) / 2^{2 w*} is an odd integer.
        if (weights.modified[i] + static_cast<int64_t>(two_adic_valuation(m)) == 2 * w_star) candidate.push_back(i);
    }
    return finish(graph, candidate, weights.modified, w_star, w_star);
}

uint64_t valuation(uint64_t x) { return static_cast<uint64_t>(__builtin_ctzll(x)); }
uint64_t valuation(unsigned __int128 x) {
    auto lo = static_cast<uint64_t>(x);
    return lo != 0 ? valuation(lo) : 64 + valuation(static_cast<uint64_t>(x >> 64));
}
uint64_t valuation(const BigInt& x) { return two_adic_valuation(x); }

template <class Ring>
typename Ring::Value power_of_two(const Ring& ring, int64_t exponent, uint64_t bits) {
    using Value = typename Ring::Value;
    if (exponent >= static_cast<int64_t>(bits)) return ring.zero();
    if constexpr (std::is_same_v<Value, BigInt>) {
        BigInt x;
        mpz_ui_pow_ui(x.get_mpz_t(), 2, static_cast<unsigned long>(exponent));
        return x;
    } else {
        return Value(1) << exponent;
    }
}

// det(D B D) with D = diag(2^{-y}) scales every Pfaffian term by the same
// power of two, so w* and the minor parities are unchanged when each edge
// weight is replaced by its reduced weight w~(uv) - y_u - y_v >= 0.
// Returns nullopt when det(B) vanishes modulo 2^bits. Otherwise val(det) and
// every needed minor valuation (at most val(det)) are below `bits`, so the
// result matches exact arithmetic.
template <class Ring>
std::optional<ExtractResult> extract_truncated(const Ring& ring, uint64_t bits, const WeightedGraph& graph,
                                const std::vector<int64_t>& reduced, int64_t potential_sum) {
    using Value = typename Ring::Value;
    const size_t n = graph.num_vertices;
    std::vector<Value> b(n * n, ring.zero());
    for (size_t i = 0; i < graph.edges.size(); ++i) {
        const WeightedEdge& e = graph.edges[i];
        Value x = power_of_two(ring, reduced[i], bits);
        b[e.u * n + e.v] = x;
        b[e.v * n + e.u] = ring.neg(x);
    }
    std::vector<Value> coeffs = berkowitz_coefficients(ring, n, std::span<const Value>(b));
    const Value& det = coeffs.back();
    if (det == 0) return std::nullopt;
    const auto w_star = static_cast<int64_t>(valuation(det) / 2);
    std::vector<Value> adj =
        adjugate_from_coefficients(ring, n, std::span<const Value>(b), std::span<const Value>(coeffs));
    std::vector<size_t> candidate;
    for (size_t i = 0; i < graph.edges.size(); ++i) {
        const WeightedEdge& e = graph.edges[i];
        // det(B_sub^{(u,v)}) = +-adj(B)[v][u]; only its valuation matters.
        const Value& m = adj[e.v * n + e.u];
        if (m == 0) continue;
        if (reduced[i] + static_cast<int64_t>(valuation(m)) == 2 * w_star) candidate.push_back(i);
    }
    return finish(graph, candidate, reduced, w_star, w_star + potential_sum);
}

ExtractResult extract_fast(const WeightedGraph& graph, const PerturbedWeights& weights) {
    const size_t n = graph.num_vertices;
    // Greedy maximal vertex potential with y_u + y_v <= w~(uv).
    std::vector<std::vector<size_t>> incident(n);
    for (size_t i = 0; i < graph.edges.size(); ++i) {
        incident[graph.edges[i].u].push_back(i);
        incident[graph.edges[i].v].push_back(i);
    }
    std::vector<int64_t> y(n, 0);
    for (size_t v = 0; v < n; ++v) {
        if (incident[v].empty()) continue;
        int64_t slack = std::numeric_limits<int64_t>::max();
        for (size_t i : incident[v]) {
            slack = std::min(slack, weights.modified[i] - y[graph.edges[i].u] - y[graph.edges[i].v]);
        }
        y[v] += slack;
    }
    std::vector<int64_t> reduced(graph.edges.size());
    for (size_t i = 0; i < graph.edges.size(); ++i) {
        reduced[i] = weights.modified[i] - y[graph.edges[i].u] - y[graph.edges[i].v];
    }
    const int64_t potential_sum = std::accumulate(y.begin(), y.end(), int64_t{0});

    // Reduced weight of some perfect matching bounds w* from above unless the
    // lightest Pfaffian terms cancel, in which case isolation failed anyway.
    std::vector<size_t> order(graph.edges.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return reduced[a] < reduced[b]; });
    std::vector<uint8_t> used(n, 0);
    int64_t greedy = 0;
    size_t matched = 0;
    for (size_t i : order) {
        const WeightedEdge& e = graph.edges[i];
        if (used[e.u] || used[e.v]) continue;
        used[e.u] = used[e.v] = 1;
        greedy += reduced[i];
        matched += 2;
    }
    int64_t bound = greedy;
    if (matched != n) {
        bound = 0;
        for (size_t k = 0; k < n / 2 && k < order.size(); ++k) bound += reduced[order[order.size() - 1 - k]];
    }
    // An isolated instance has val(det) = 2 w*_r <= 2 bound, so vanishing
    // modulo 2^(2 bound + 2) means the lightest Pfaffian terms cancelled.
    const auto bits = static_cast<uint64_t>(2 * bound + 2);
    if (auto r = extract_truncated(Wrap64Ring{}, 64, graph, reduced, potential_sum)) return *r;
    if (bits > 64) {
        if (auto r = extract_truncated(Wrap128Ring{}, 128, graph, reduced, potential_sum)) return *r;
    }
    if (bits > 128) {
        if (auto r = extract_truncated(PowerOfTwoRing{bits}, bits, graph, reduced, potential_sum)) return *r;
    }
    return ExtractResult{};
}

}  // namespace

ExtractResult try_extract_mwpm(const WeightedGraph& graph, const PerturbedWeights& weights, Arithmetic arithmetic) {
    if (graph.num_vertices % 2 != 0) throw std::invalid_argument("graph must have an even number of vertices");
    if (weights.modified.size() != graph.edges.size()) throw std::invalid_argument("weights do not match graph");
    if (graph.num_vertices == 0) {
        return ExtractResult{ExtractStatus::kFound, Matching{}, 0};
    }
    return arithmetic == Arithmetic::kExact ? extract_exact(graph, weights) : extract_fast(graph, weights);
}

// ---------------------------------------------------------------------------
// Perturbation schemes.

std::vector<int64_t> modular_weight_function(uint32_t num_vertices, size_t num_edges, uint64_t k) {
    if (k < 1) throw std::invalid_argument("modulus must be positive");
    const unsigned __int128 base = (4 * static_cast<unsigned __int128>(num_vertices) * num_vertices + 1) % k;
    std::vector<int64_t> out(num_edges);
    unsigned __int128 power = 1 % k;
    for (size_t j = 1; j <= num_edges; ++j) {
        power = (power * base) % k;
        out[j - 1] = static_cast<int64_t>(power);
    }
    return out;
}

DerandomizedFamily::DerandomizedFamily(uint32_t num_vertices, size_t num_edges, uint32_t s, uint64_t t)
    : num_vertices_(num_vertices), num_edges_(num_edges), s_(s), t_(t) {
    if (t < 7) throw std::invalid_argument("derandomized family requires t >= 7");
    if (s < 1) throw std::invalid_argument("derandomized family requires s >= 1");
    unsigned __int128 size = 1;
    unsigned __int128 bound = 1;
    const unsigned __int128 step = static_cast<unsigned __int128>(num_vertices) * t;
    bool bound_ok = true;
    for (uint32_t i = 0; i < s; ++i) {
        size = std::min<unsigned __int128>(size * (t - 1), std::numeric_limits<uint64_t>::max());
        bound *= step;
        if (bound > static_cast<unsigned __int128>(std::numeric_limits<int64_t>::max())) {
            bound_ok = false;
            bound = std::numeric_limits<int64_t>::max();
        }
    }
    size_ = static_cast<uint64_t>(size);
    bound_ = bound_ok ? static_cast<int64_t>(bound) : -1;
}

std::vector<uint64_t> DerandomizedFamily::ks(uint64_t index) const {
    if (index >= size_) throw std::out_of_range("family index out of range");
    std::vector<uint64_t> out(s_);
    for (uint32_t i = s_; i-- > 0;) {
        out[i] = 2 + index % (t_ - 1);
        index /= (t_ - 1);
    }
    return out;
}

int64_t DerandomizedFamily::w_max_bound() const {
    if (bound_ < 0) throw std::overflow_error("(|V| t)^s does not fit in int64");
    return bound_;
}

std::vector<int64_t> DerandomizedFamily::function(uint64_t index) const {
    if (bound_ < 0) throw std::overflow_error("(|V| t)^s does not fit in int64");
    std::vector<uint64_t> k = ks(index);
    std::vector<int64_t> acc = modular_weight_function(num_vertices_, num_edges_, k[0]);
    const auto step = static_cast<int64_t>(num_vertices_) * static_cast<int64_t>(t_);
    for (uint32_t i = 1; i < s_; ++i) {
        std::vector<int64_t> next = modular_weight_function(num_vertices_, num_edges_, k[i]);
        for (size_t j = 0; j < num_edges_; ++j) acc[j] = step * acc[j] + next[j];
    }
    return acc;
}

DerandomizedFamily generate_derandomized_family(const WeightedGraph& graph, uint32_t s, uint64_t t) {
    return DerandomizedFamily(graph.num_vertices, graph.edges.size(), s, t);
}

uint32_t perturbation_seed(uint32_t num_vertices, size_t j, uint64_t k, uint64_t master_seed) {
    return static_cast<uint32_t>(mix_seed({master_seed, num_vertices, j, k}) >> 32);
}

std::vector<int64_t> seeded_prng_perturbation(uint32_t num_vertices, size_t num_edges, uint64_t k, int64_t w_max,
                                              uint64_t master_seed) {
    if (w_max < 1) throw std::invalid_argument("w_max must be at least 1");
    std::vector<int64_t> out(num_edges);
    for (size_t j = 1; j <= num_edges; ++j) {
        std::mt19937 engine(perturbation_seed(num_vertices, j, k, master_seed));
        const uint64_t draw = engine();
        out[j - 1] = 1 + static_cast<int64_t>((draw * static_cast<uint64_t>(w_max)) >> 32);
    }
    return out;
}

nlohmann::json scheme_to_json(const PerturbationScheme& scheme) {
    return std::visit(
        [](const auto& s) -> nlohmann::json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RandomizedScheme>) {
                return {{"kind", "randomized"}, {"w_max", s.w_max}, {"attempts", s.attempts}, {"seed", s.seed},
                        {"generator", "mt19937_64"}};
            } else if constexpr (std::is_same_v<T, DerandomizedScheme>) {
                return {{"kind", "derandomized"}, {"s", s.s}, {"t", s.t}};
            } else {
                return {{"kind", "seeded-prng"},
                        {"master_seed", s.master_seed},
                        {"initial_w_max", s.initial_w_max},
                        {"max_w_max", s.max_w_max},
                        {"generator", kPerturbationGenerator}};
            }
        },
        scheme);
}

std::string describe(const PerturbationScheme& scheme) { return scheme_to_json(scheme).dump(); }

namespace {

struct Trial {
    std::vector<int64_t> perturbation;
    int64_t w_max = 1;
};

// Evaluates trials in index order (possibly in parallel batches) and returns
// the lowest-index success. `make_trial` returns nullopt once the scheme is
// exhausted.
template <class MakeTrial>
std::optional<DecodeResult> first_success(const WeightedGraph& graph, const DecodeOptions& options,
                                          MakeTrial&& make_trial, uint64_t& tried) {
    const unsigned batch = std::max(1u, options.threads);
    for (uint64_t start = 0;; start += batch) {
        std::vector<Trial> trials;
        for (uint64_t i = start; i < start + batch; ++i) {
            std::optional<Trial> t = make_trial(i);
            if (!t) break;
            trials.push_back(std::move(*t));
        }
        if (trials.empty()) return std::nullopt;
        std::vector<std::optional<Matching>> found(trials.size());
        auto run = [&](size_t i) {
            PerturbedWeights pw = PerturbedWeights::make(graph, trials[i].perturbation, trials[i].w_max);
            ExtractResult r = try_extract_mwpm(graph, pw, options.arithmetic);
            if (r.status == ExtractStatus::kFound) found[i] = std::move(r.matching);
        };
        if (trials.size() == 1) {
            run(0);
        } else {
            std::vector<std::jthread> pool;
            for (size_t i = 0; i < trials.size(); ++i) pool.emplace_back(run, i);
        }
        for (size_t i = 0; i < trials.size(); ++i) {
            if (found[i]) {
                tried = start + i + 1;
                return DecodeResult{std::move(*found[i]), start + i + 1, trials[i].w_max};
            }
        }
        tried = start + trials.size();
    }
}

std::string instance_name(const WeightedGraph& graph) {
    return "path graph with " + std::to_string(graph.num_vertices) + " vertices and " +
           std::to_string(graph.edges.size()) + " edges";
}

}  // namespace

DecodeResult decode(const WeightedGraph& graph, const PerturbationScheme& scheme, const DecodeOptions& options) {
    graph.validate();
    if (graph.num_vertices % 2 != 0) throw std::invalid_argument("graph must have an even number of vertices");
    if (graph.num_vertices == 0) return DecodeResult{};
    const uint32_t nv = graph.num_vertices;
    const size_t ne = graph.edges.size();
    uint64_t tried = 0;

    if (const auto* r = std::get_if<RandomizedScheme>(&scheme)) {
        if (r->w_max < 1) throw std::invalid_argument("w_max must be at least 1");
        auto make = [&](uint64_t i) -> std::optional<Trial> {
            if (i >= r->attempts) return std::nullopt;
            std::mt19937_64 rng(mix_seed({r->seed, nv, i}));
            Trial t{std::vector<int64_t>(ne), r->w_max};
            for (auto& w : t.perturbation) {
                w = 1 + static_cast<int64_t>((static_cast<unsigned __int128>(rng()) * static_cast<uint64_t>(r->w_max)) >> 64);
            }
            return t;
        };
        if (auto res = first_success(graph, options, make, tried)) return *res;
        throw DecodeFailure("randomized isolation failed on " + instance_name(graph) + " after " +
                            std::to_string(tried) + " attempts");
    }

    if (const auto* d = std::get_if<DerandomizedScheme>(&scheme)) {
        DerandomizedFamily family(nv, ne, d->s, d->t);
        const int64_t bound = family.w_max_bound();
        if (bound == std::numeric_limits<int64_t>::max()) throw std::overflow_error("W_max bound overflows");
        auto make = [&](uint64_t i) -> std::optional<Trial> {
            if (i >= family.size()) return std::nullopt;
            // Family values lie in [0, bound]; shifting by one keeps matching
            // differences and meets the W >= 1 convention.
            Trial t{family.function(i), bound + 1};
            for (auto& w : t.perturbation) w += 1;
            return t;
        };
        if (auto res = first_success(graph, options, make, tried)) return *res;
        throw DecodeFailure("derandomized family exhausted on " + instance_name(graph));
    }

    const auto& p = std::get<SeededPrngScheme>(scheme);
    if (p.initial_w_max < 1 || p.max_w_max < p.initial_w_max) throw std::invalid_argument("bad W_max schedule");
    auto make = [&](uint64_t i) -> std::optional<Trial> {
        // Trial index i maps to (W_max, k) with W_max seed sequences per level.
        int64_t w = p.initial_w_max;
        while (i >= static_cast<uint64_t>(w)) {
            i -= static_cast<uint64_t>(w);
            ++w;
            if (w > p.max_w_max) return std::nullopt;
        }
        return Trial{seeded_prng_perturbation(nv, ne, i, w, p.master_seed), w};
    };
    if (auto res = first_success(graph, options, make, tried)) return *res;
    throw DecodeFailure("seeded perturbations up to W_max = " + std::to_string(p.max_w_max) + " failed on " +
                        instance_name(graph));
}

nlohmann::json decode_result_to_json(const DecodeResult& result, const PerturbationScheme& scheme) {
    auto pairs = nlohmann::json::array();
    for (auto [u, v] : result.matching.pairs) pairs.push_back({u, v});
    return {{"matching", pairs},
            {"base_weight", result.matching.total_base_weight},
            {"attempts_used", result.attempts_used},
            {"w_max_used", result.w_max_used},
            {"scheme", scheme_to_json(scheme)}};
}

}  // namespace pmwpm
