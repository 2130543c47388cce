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

#include <gtest/gtest.h>

#include <random>

#include "pmwpm/isolation.h"
#include "pmwpm/matching_oracle.h"
#include "pmwpm/shortest_paths.h"

namespace pmwpm {
namespace {

WeightedGraph square_with_cancelling_terms() {
    // The two perfect matchings {01,23} and {02,13} enter the Pfaffian with
    // opposite signs, so equal weights make det(B) vanish.
    return WeightedGraph{4, {{0, 1, 1}, {0, 2, 1}, {1, 3, 1}, {2, 3, 1}}};
}

PathGraph random_path_graph(std::mt19937_64& rng, uint32_t max_k, int64_t max_w) {
    const uint32_t k = 1 + rng() % max_k;
    std::vector<int64_t> pair(k * k), boundary(k);
    for (uint32_t a = 0; a < k; ++a) {
        boundary[a] = static_cast<int64_t>(rng() % (max_w + 1));
        for (uint32_t b = a + 1; b < k; ++b)
            pair[a * k + b] = pair[b * k + a] = static_cast<int64_t>(rng() % (max_w + 1));
    }
    return make_path_graph(pair, boundary);
}

std::vector<int64_t> random_perturbation(std::mt19937_64& rng, size_t m, int64_t w_max) {
    std::vector<int64_t> out(m);
    for (auto& x : out) x = 1 + static_cast<int64_t>(rng() % w_max);
    return out;
}

TEST(Scale, Formula) {
    EXPECT_EQ(isolation_scale(2, 5), 5);
    EXPECT_EQ(isolation_scale(6, 10), 28);
    EXPECT_EQ(isolation_scale(8, 1), 1);
    EXPECT_THROW(isolation_scale(4, 0), std::invalid_argument);
}

TEST(PerturbedWeights, Validation) {
    WeightedGraph g{2, {{0, 1, 4}}};
    PerturbedWeights pw = PerturbedWeights::make(g, {2}, 3);
    EXPECT_EQ(pw.scale, 3);
    EXPECT_EQ(pw.modified, (std::vector<int64_t>{14}));
    EXPECT_THROW(PerturbedWeights::make(g, {4}, 3), std::invalid_argument);
    EXPECT_THROW(PerturbedWeights::make(g, {0}, 3), std::invalid_argument);
    EXPECT_THROW(PerturbedWeights::make(g, {1, 1}, 3), std::invalid_argument);
    WeightedGraph neg{2, {{0, 1, -1}}};
    EXPECT_THROW(PerturbedWeights::make(neg, {1}, 3), std::invalid_argument);
}

TEST(BMatrix, TwoVertexExample) {
    // Base weight 1, W_max 2, perturbation 1: modified weight 3, det = 2^6.
    WeightedGraph g{2, {{0, 1, 1}}};
    PerturbedWeights pw = PerturbedWeights::make(g, {1}, 2);
    ASSERT_EQ(pw.modified[0], 3);
    BigMatrix b = build_b_matrix(g, pw);
    EXPECT_EQ(b.at(0, 1), 8);
    EXPECT_EQ(b.at(1, 0), -8);
    EXPECT_EQ(det_berkowitz(b), 64);
    for (Arithmetic a : {Arithmetic::kExact, Arithmetic::kTruncated}) {
        ExtractResult r = try_extract_mwpm(g, pw, a);
        ASSERT_EQ(r.status, ExtractStatus::kFound);
        EXPECT_EQ(*r.w_star, 3);
        EXPECT_EQ(r.matching->pairs, (std::vector<VertexPair>{{0, 1}}));
        EXPECT_EQ(r.matching->total_base_weight, 1);
    }
}

TEST(BMatrix, ThreeEventPathGraphHasOneEntryPerEdge) {
    PathGraph pg = make_path_graph(std::vector<int64_t>{0, 2, 3, 2, 0, 4, 3, 4, 0}, std::vector<int64_t>{1, 1, 1});
    ASSERT_EQ(pg.graph.edges.size(), 9u);
    PerturbedWeights pw = PerturbedWeights::make(pg.graph, std::vector<int64_t>(9, 1), 1);
    BigMatrix b = build_b_matrix(pg.graph, pw);
    int nonzero_upper = 0;
    for (size_t i = 0; i < b.size(); ++i) {
        EXPECT_EQ(b.at(i, i), 0);
        for (size_t j = i + 1; j < b.size(); ++j) {
            EXPECT_EQ(b.at(i, j), -b.at(j, i));
            nonzero_upper += b.at(i, j) != 0;
        }
    }
    EXPECT_EQ(nonzero_upper, 9);
}

TEST(Extract, CancellingTermsAreReportedSingular) {
    WeightedGraph g = square_with_cancelling_terms();
    PerturbedWeights pw = PerturbedWeights::make(g, {1, 1, 1, 1}, 1);
    EXPECT_EQ(det_berkowitz(build_b_matrix(g, pw)), 0);
    for (Arithmetic a : {Arithmetic::kExact, Arithmetic::kTruncated}) {
        ExtractResult r = try_extract_mwpm(g, pw, a);
        EXPECT_EQ(r.status, ExtractStatus::kSingular);
        EXPECT_FALSE(r.matching.has_value());
        EXPECT_FALSE(r.w_star.has_value());
    }
}

TEST(Extract, EmptyGraphIsTriviallyFound) {
    WeightedGraph g{0, {}};
    PerturbedWeights pw = PerturbedWeights::make(g, {}, 1);
    ExtractResult r = try_extract_mwpm(g, pw);
    EXPECT_EQ(r.status, ExtractStatus::kFound);
    EXPECT_TRUE(r.matching->pairs.empty());
}

TEST(Extract, TruncatedAgreesWithExact) {
    std::mt19937_64 rng(11);
    int found = 0;
    for (int it = 0; it < 200; ++it) {
        PathGraph pg = random_path_graph(rng, 4, 40);
        const int64_t w_max = it % 2 ? 2 : 2 * static_cast<int64_t>(pg.graph.edges.size());
        PerturbedWeights pw =
            PerturbedWeights::make(pg.graph, random_perturbation(rng, pg.graph.edges.size(), w_max), w_max);
        ExtractResult exact = try_extract_mwpm(pg.graph, pw, Arithmetic::kExact);
        ExtractResult fast = try_extract_mwpm(pg.graph, pw, Arithmetic::kTruncated);
        if (exact.status == ExtractStatus::kFound) {
            ++found;
            ASSERT_EQ(fast.status, ExtractStatus::kFound);
            EXPECT_EQ(*fast.matching, *exact.matching);
            EXPECT_EQ(*fast.w_star, *exact.w_star);
        } else {
            EXPECT_NE(fast.status, ExtractStatus::kFound);
        }
    }
    EXPECT_GT(found, 100);
}

TEST(Extract, FoundMatchingsAreMinimum) {
    std::mt19937_64 rng(12);
    for (int it = 0; it < 300; ++it) {
        PathGraph pg = random_path_graph(rng, 5, 30);
        const int64_t w_max = 1 + static_cast<int64_t>(rng() % 8);
        PerturbedWeights pw =
            PerturbedWeights::make(pg.graph, random_perturbation(rng, pg.graph.edges.size(), w_max), w_max);
        ExtractResult r = try_extract_mwpm(pg.graph, pw);
        if (r.status != ExtractStatus::kFound) continue;
        OracleResult o = brute_force_mwpm(pg.graph);
        EXPECT_TRUE(is_perfect_matching(pg.graph, r.matching->pairs));
        EXPECT_EQ(r.matching->total_base_weight, o.weight);
    }
}

TEST(Derandomized, ModularWeights) {
    EXPECT_EQ(modular_weight_function(2, 1, 2), (std::vector<int64_t>{1}));
    // 4*2^2+1 = 17; powers mod 5 are 2, 4, 3, 1.
    EXPECT_EQ(modular_weight_function(2, 4, 5), (std::vector<int64_t>{2, 4, 3, 1}));
    EXPECT_THROW(modular_weight_function(2, 1, 0), std::invalid_argument);
}

TEST(Derandomized, FamilyStructure) {
    DerandomizedFamily f(4, 6, 2, 7);
    EXPECT_EQ(f.size(), 36u);
    EXPECT_EQ(f.w_max_bound(), 784);
    EXPECT_EQ(f.ks(0), (std::vector<uint64_t>{2, 2}));
    EXPECT_EQ(f.ks(7), (std::vector<uint64_t>{3, 3}));
    EXPECT_EQ(f.ks(35), (std::vector<uint64_t>{7, 7}));
    EXPECT_THROW(f.ks(36), std::out_of_range);
    std::vector<int64_t> a = modular_weight_function(4, 6, 3);
    std::vector<int64_t> b = modular_weight_function(4, 6, 3);
    std::vector<int64_t> composed = f.function(7);
    for (size_t j = 0; j < 6; ++j) {
        EXPECT_EQ(composed[j], 28 * a[j] + b[j]);
        EXPECT_GE(composed[j], 0);
        EXPECT_LE(composed[j], f.w_max_bound());
    }
    EXPECT_THROW(DerandomizedFamily(4, 6, 2, 6), std::invalid_argument);
    EXPECT_THROW(DerandomizedFamily(4, 6, 0, 7), std::invalid_argument);
    EXPECT_THROW(DerandomizedFamily(1000, 6, 10, 1000).w_max_bound(), std::overflow_error);
}

TEST(Seeded, PerturbationsAreDeterministicAndInRange) {
    auto a = seeded_prng_perturbation(6, 50, 3, 17, 99);
    EXPECT_EQ(a, seeded_prng_perturbation(6, 50, 3, 17, 99));
    EXPECT_NE(a, seeded_prng_perturbation(6, 50, 4, 17, 99));
    for (int64_t x : a) {
        EXPECT_GE(x, 1);
        EXPECT_LE(x, 17);
    }
    EXPECT_NE(perturbation_seed(6, 1, 0, 99), perturbation_seed(6, 2, 0, 99));
}

TEST(Decode, EmptyInstance) {
    DecodeResult r = decode(WeightedGraph{0, {}}, SeededPrngScheme{});
    EXPECT_TRUE(r.matching.pairs.empty());
    EXPECT_EQ(r.attempts_used, 0u);
}

TEST(Decode, SeededSucceedsImmediatelyOnSingleEdge) {
    WeightedGraph g{2, {{0, 1, 7}}};
    DecodeResult r = decode(g, SeededPrngScheme{5, 2, 64});
    EXPECT_EQ(r.w_max_used, 2);
    EXPECT_EQ(r.attempts_used, 1u);
    EXPECT_EQ(r.matching.total_base_weight, 7);
}

TEST(Decode, RandomizedExhaustionThrows) {
    WeightedGraph g = square_with_cancelling_terms();
    EXPECT_THROW(decode(g, RandomizedScheme{1, 3, 0}), DecodeFailure);
    EXPECT_THROW(decode(g, SeededPrngScheme{0, 1, 1}), DecodeFailure);
}

TEST(Decode, AllSchemesFindMinimum) {
    std::mt19937_64 rng(13);
    for (int it = 0; it < 60; ++it) {
        PathGraph pg = random_path_graph(rng, 4, 20);
        OracleResult o = brute_force_mwpm(pg.graph);
        const PerturbationScheme schemes[] = {RandomizedScheme{64, 50, 3}, DerandomizedScheme{1, 7},
                                              SeededPrngScheme{3, 2, 4096}};
        for (const auto& s : schemes) {
            DecodeResult r = decode(pg.graph, s);
            EXPECT_EQ(r.matching.total_base_weight, o.weight) << describe(s);
        }
    }
}

TEST(Decode, ThreadCountDoesNotChangeResult) {
    std::mt19937_64 rng(14);
    for (int it = 0; it < 30; ++it) {
        PathGraph pg = random_path_graph(rng, 5, 3);
        SeededPrngScheme s{21, 2, 4096};
        DecodeResult one = decode(pg.graph, s, {Arithmetic::kTruncated, 1});
        for (unsigned t : {4u, 8u}) {
            DecodeResult many = decode(pg.graph, s, {Arithmetic::kTruncated, t});
            EXPECT_EQ(many.matching, one.matching);
            EXPECT_EQ(many.attempts_used, one.attempts_used);
            EXPECT_EQ(many.w_max_used, one.w_max_used);
        }
    }
}

TEST(Decode, JsonDescribesSchemeAndMatching) {
    WeightedGraph g{2, {{0, 1, 7}}};
    SeededPrngScheme s{5, 2, 64};
    nlohmann::json j = decode_result_to_json(decode(g, s), s);
    EXPECT_EQ(j["base_weight"], 7);
    EXPECT_EQ(j["matching"], nlohmann::json::parse("[[0,1]]"));
    EXPECT_EQ(j["scheme"]["kind"], "seeded-prng");
    EXPECT_EQ(j["scheme"]["generator"], "mt19937");
    EXPECT_EQ(scheme_to_json(DerandomizedScheme{2, 9})["t"], 9);
}

}  // namespace
}  // namespace pmwpm
