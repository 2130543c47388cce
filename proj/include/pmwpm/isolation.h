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

#ifndef PMWPM_ISOLATION_H_
#define PMWPM_ISOLATION_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "pmwpm/bigdet.h"
#include "pmwpm/matching_graph.h"

namespace pmwpm {

/// Scale factor (|V|/2)(W_max - 1) + 1 that keeps every non-minimum matching
/// strictly heavier than every minimum one after perturbation.
int64_t isolation_scale(uint32_t num_vertices, int64_t w_max);

/// Modified weights w~(e) = scale * w(e) + W(e) with 1 <= W(e) <= w_max.
struct PerturbedWeights {
    std::vector<int64_t> base;
    std::vector<int64_t> perturbation;
    std::vector<int64_t> modified;
    int64_t w_max = 1;
    int64_t scale = 1;

    /// Throws std::invalid_argument if a perturbation is outside [1, w_max],
    /// a base weight is negative, or a modified weight overflows.
    static PerturbedWeights make(const WeightedGraph& graph, std::vector<int64_t> perturbation, int64_t w_max);
};

/// Tutte matrix with x_ij = 2^{w~(ij)}: +x above the diagonal, -x below.
BigMatrix build_b_matrix(const WeightedGraph& graph, const PerturbedWeights& weights);

enum class ExtractStatus {
    kFound,           // candidate is a perfect matching of weight w*
    kSingular,        // det(B) == 0
    kNotPerfect,      // minor test did not select a perfect matching
    kWeightMismatch,  // perfect matching, but its modified weight != w*
};

const char* to_string(ExtractStatus status);

enum class Arithmetic {
    /// Determinants modulo 2^K after a potential shift of the weights; K is
    /// chosen above twice the reduced weight of a known perfect matching.
    kTruncated,
    /// Exact BigInt determinants of B and of every edge minor.
    kExact,
};

struct ExtractResult {
    ExtractStatus status = ExtractStatus::kSingular;
    std::optional<Matching> matching;  // set iff status == kFound
    std::optional<int64_t> w_star;     // in modified-weight units; unset if singular
};

/// One isolation attempt: det(B) gives w*, edge minors select M*, and M* is
/// accepted only if it is a perfect matching of modified weight w*.
ExtractResult try_extract_mwpm(const WeightedGraph& graph, const PerturbedWeights& weights,
                               Arithmetic arithmetic = Arithmetic::kTruncated);

struct RandomizedScheme {
    int64_t w_max = 2;
    uint64_t attempts = 1;
    uint64_t seed = 0;
};

/// The W_t^s family of composed modular hash functions.
struct DerandomizedScheme {
    uint32_t s = 1;
    uint64_t t = 7;
};

/// Seeded pseudo-random perturbations with W_max escalation: for each W_max
/// starting at `initial_w_max`, W_max seed sequences are tried.
struct SeededPrngScheme {
    uint64_t master_seed = 0;
    int64_t initial_w_max = 2;
    int64_t max_w_max = 4096;
};

using PerturbationScheme = std::variant<RandomizedScheme, DerandomizedScheme, SeededPrngScheme>;

/// Name of the pseudo-random generator behind f(j, seed).
inline constexpr const char* kPerturbationGenerator = "mt19937";

nlohmann::json scheme_to_json(const PerturbationScheme& scheme);
std::string describe(const PerturbationScheme& scheme);

/// w_k(e_j) = (4|V|^2 + 1)^j mod k for j = 1..num_edges.
std::vector<int64_t> modular_weight_function(uint32_t num_vertices, size_t num_edges, uint64_t k);

/// Lazily indexed family W_t^s = {((w_k1 o w_k2) o ...) o w_ks : k_i in 2..t},
/// with (w o w')(e) = |V| t w(e) + w'(e).
class DerandomizedFamily {
   public:
    DerandomizedFamily(uint32_t num_vertices, size_t num_edges, uint32_t s, uint64_t t);

    /// (t - 1)^s, saturating at UINT64_MAX.
    uint64_t size() const { return size_; }
    /// (|V| t)^s; throws if it does not fit in int64.
    int64_t w_max_bound() const;
    /// Member `index`; digits base t-1 pick k_1 (most significant) .. k_s.
    std::vector<int64_t> function(uint64_t index) const;
    /// k_1..k_s of member `index`.
    std::vector<uint64_t> ks(uint64_t index) const;

   private:
    uint32_t num_vertices_;
    size_t num_edges_;
    uint32_t s_;
    uint64_t t_;
    uint64_t size_;
    int64_t bound_;
};

DerandomizedFamily generate_derandomized_family(const WeightedGraph& graph, uint32_t s, uint64_t t);

/// 32-bit seed s_{|V|, e_j, k} derived from (|V|, j, k, master seed).
uint32_t perturbation_seed(uint32_t num_vertices, size_t j, uint64_t k, uint64_t master_seed);

/// W(e_j) = f(j, s_{|V|, e_j, k}) mapped into [1, w_max], j = 1..num_edges.
std::vector<int64_t> seeded_prng_perturbation(uint32_t num_vertices, size_t num_edges, uint64_t k, int64_t w_max,
                                              uint64_t master_seed);

struct DecodeResult {
    Matching matching;
    uint64_t attempts_used = 0;
    int64_t w_max_used = 0;
};

struct DecodeOptions {
    Arithmetic arithmetic = Arithmetic::kTruncated;
    /// Trials evaluated concurrently; the lowest successful trial index wins.
    unsigned threads = 1;
};

class DecodeFailure : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Walks the scheme's trials in index order and returns the first verified
/// matching. An empty graph returns the empty matching with zero attempts.
DecodeResult decode(const WeightedGraph& graph, const PerturbationScheme& scheme, const DecodeOptions& options = {});

nlohmann::json decode_result_to_json(const DecodeResult& result, const PerturbationScheme& scheme);

}  // namespace pmwpm

#endif  // PMWPM_ISOLATION_H_
