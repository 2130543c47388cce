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

#include "acceptance_checks.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pmwpm/bigdet.h"
#include "pmwpm/detector_model.h"
#include "pmwpm/experiments.h"
#include "pmwpm/hashing.h"
#include "pmwpm/isolation.h"
#include "pmwpm/matching_oracle.h"
#include "pmwpm/shortest_paths.h"
#include "pmwpm/windowing.h"

namespace pmwpm::acceptance {

namespace {

std::string str(double x) {
    std::ostringstream o;
    o.precision(6);
    o << x;
    return o.str();
}

BigInt from_u64(uint64_t x) {
    BigInt v;
    mpz_import(v.get_mpz_t(), 1, -1, sizeof(x), 0, 0, &x);
    return v;
}

// Uniform-ish integer in [-2^64, 2^64].
BigInt wide_entry(std::mt19937_64& rng) {
    BigInt v = (rng() % 4096 == 0) ? BigInt(1) << 64 : from_u64(rng());
    return (rng() & 1) ? BigInt(-v) : v;
}

Outcome soundness(const Options& o) {
    Outcome out{1, "oracle soundness"};
    const uint64_t shots = o.quick ? 1000 : 10000;
    uint64_t checked = 0, mismatches = 0, failures = 0;
    for (uint32_t d : {3u, 5u}) {
        ExperimentConfig cfg;
        cfg.distance = d;
        cfg.rounds = d;
        cfg.p = 1e-3;
        cfg.shots = shots;
        cfg.scheme = SeededPrngScheme{o.seed};
        cfg.master_seed = mix_seed({o.seed, 1, d});
        cfg.threads = o.threads;
        cfg.oracle_max_size = 10;
        cfg.keep_shot_records = false;
        ExperimentResult r = run_memory_experiment(cfg);
        checked += r.oracle_checked;
        mismatches += r.oracle_mismatches;
        failures += r.decode_failures;
    }
    out.pass = mismatches == 0 && checked > 0;
    out.detail = std::to_string(shots) + " shots per d in {3,5}; " + std::to_string(checked) +
                 " path graphs with |V|<=10 checked, " + std::to_string(mismatches) + " mismatches, " +
                 std::to_string(failures) + " decode failures";
    return out;
}

Outcome determinants(const Options& o) {
    Outcome out{2, "determinant equivalence"};
    std::mt19937_64 rng(mix_seed({o.seed, 2}));
    const int general = o.quick ? 200 : 1000;
    const int skew = o.quick ? 30 : 100;
    int bad = 0, not_square = 0;
    for (int i = 0; i < general; ++i) {
        const size_t n = 1 + rng() % 8;
        BigMatrix a(n);
        for (size_t r = 0; r < n; ++r)
            for (size_t c = 0; c < n; ++c) a.at(r, c) = wide_entry(rng);
        bad += det_berkowitz(a) != det_naive(a);
    }
    for (int i = 0; i < skew; ++i) {
        const size_t n = 2 * (1 + rng() % 4);
        BigMatrix a(n);
        for (size_t r = 0; r < n; ++r) {
            for (size_t c = r + 1; c < n; ++c) {
                a.at(r, c) = wide_entry(rng);
                a.at(c, r) = -a.at(r, c);
            }
        }
        not_square += !is_perfect_square(det_berkowitz(a));
    }
    out.pass = bad == 0 && not_square == 0;
    out.detail = std::to_string(general) + " general (n<=8, |a|<=2^64): " + std::to_string(bad) + " mismatches; " +
                 std::to_string(skew) + " antisymmetric: " + std::to_string(not_square) + " non-squares";
    return out;
}

Outcome characteristic(const Options& o) {
    Outcome out{3, "characteristic polynomial"};
    std::mt19937_64 rng(mix_seed({o.seed, 3}));
    int bad = 0;
    const int instances = 100;
    for (int i = 0; i < instances; ++i) {
        const size_t n = 1 + rng() % 6;
        BigMatrix a(n);
        for (size_t r = 0; r < n; ++r)
            for (size_t c = 0; c < n; ++c) a.at(r, c) = BigInt(static_cast<long>(rng() % 2001) - 1000);
        const std::vector<BigInt> p = characteristic_coefficients(a);
        for (long lambda : {0L, 1L, -1L, 2L}) {
            BigInt value = 0;
            for (size_t k = 0; k <= n; ++k) value = value * lambda + p[k];  // Horner, p_0 leads
            BigMatrix shifted = a;
            for (size_t r = 0; r < n; ++r) shifted.at(r, r) -= lambda;
            bad += value != det_naive(shifted);
        }
        bad += p.back() != det_naive(a);
    }
    out.pass = bad == 0;
    out.detail = std::to_string(instances) + " matrices n<=6 at lambda in {0,+-1,2}: " + std::to_string(bad) +
                 " mismatches";
    return out;
}

Outcome isolation_rate(const Options& o) {
    Outcome out{4, "randomized isolation bound"};
    std::mt19937_64 rng(mix_seed({o.seed, 4}));
    const int instances = 1000;
    int not_isolated = 0, non_unique = 0, unsound = 0;
    size_t edges = 0;
    for (int i = 0; i < instances; ++i) {
        const int64_t c = static_cast<int64_t>(rng() % 50);
        const std::vector<int64_t> pair(9, c);
        const std::vector<int64_t> boundary(3, c);
        const PathGraph pg = make_path_graph(pair, boundary);
        edges = pg.graph.edges.size();
        const auto w_max = static_cast<int64_t>(2 * edges);
        std::vector<int64_t> w(edges);
        for (auto& x : w) x = 1 + static_cast<int64_t>(rng() % static_cast<uint64_t>(w_max));
        const PerturbedWeights pw = PerturbedWeights::make(pg.graph, w, w_max);
        const ExtractResult r = try_extract_mwpm(pg.graph, pw);
        not_isolated += r.status != ExtractStatus::kFound;
        // Independent uniqueness count by enumeration.
        int64_t best = std::numeric_limits<int64_t>::max();
        int count = 0;
        for (const Matching& m : all_perfect_matchings(pg.graph)) {
            int64_t total = 0;
            for (auto [u, v] : m.pairs) {
                for (size_t e = 0; e < edges; ++e) {
                    if (pg.graph.edges[e].u == u && pg.graph.edges[e].v == v) total += pw.modified[e];
                }
            }
            if (total < best) {
                best = total;
                count = 1;
            } else if (total == best) {
                ++count;
            }
        }
        non_unique += count > 1;
        if (r.status == ExtractStatus::kFound && r.matching->total_base_weight != brute_force_mwpm(pg.graph).weight) {
            ++unsound;
        }
    }
    const double rate = static_cast<double>(not_isolated) / instances;
    const double bound = static_cast<double>(edges) / static_cast<double>(2 * edges);
    const double margin = 3.0 * std::sqrt(bound * (1.0 - bound) / instances);
    out.pass = rate <= bound + margin && unsound == 0;
    out.detail = std::to_string(instances) + " instances |V|=6, |E|=" + std::to_string(edges) +
                 ", W_max=2|E|: NotIsolated rate " + str(rate) + " (limit " + str(bound + margin) +
                 "), non-unique minimum rate " + str(static_cast<double>(non_unique) / instances) + ", " +
                 std::to_string(unsound) + " unsound";
    return out;
}

Outcome scaling(const Options& o) {
    Outcome out{5, "W_max scaling"};
    WmaxScanConfig cfg;
    cfg.distances = {3, 5, 7};
    cfg.p = 1e-3;
    cfg.shots_per_d = o.quick ? 1000 : 10000;
    cfg.size_cap = 30;
    cfg.master_seed = mix_seed({o.seed, 5});
    cfg.threads = o.threads;
    const WmaxScanResult r = run_wmax_scan(cfg);
    int over = 0;
    std::string table;
    for (const WmaxScanRecord& rec : r.records) {
        table += " " + std::to_string(rec.size) + ":" + std::to_string(rec.min_w_max) + (rec.sparse ? "s" : "");
        if (rec.size <= 20 &&
            rec.min_w_max > power_law_bound(kReferenceBoundA, kReferenceBoundB, rec.size) + 2) {
            ++over;
        }
    }
    out.pass = r.fit.has_value() && r.fit->b < 1.0 && over == 0;
    out.detail = std::to_string(cfg.shots_per_d) + " shots per d in {3,5,7}; ";
    out.detail += r.fit ? "fit a=" + str(r.fit->a) + " b=" + str(r.fit->b) : std::string("no fit (too few sizes)");
    out.detail += "; " + std::to_string(over) + " sizes above ceil(0.62 x^0.80)+2; size:min_w_max" + table;
    return out;
}

Outcome order_preservation(const Options& o) {
    Outcome out{6, "perturbation order preservation"};
    std::mt19937_64 rng(mix_seed({o.seed, 6}));
    const int instances = 1000;
    int violations = 0;
    for (int i = 0; i < instances; ++i) {
        const uint32_t k = 1 + static_cast<uint32_t>(rng() % 4);
        std::vector<int64_t> pair(k * k), boundary(k);
        for (uint32_t a = 0; a < k; ++a) {
            boundary[a] = static_cast<int64_t>(rng() % 8);
            for (uint32_t b = a + 1; b < k; ++b) pair[a * k + b] = pair[b * k + a] = static_cast<int64_t>(rng() % 8);
        }
        const PathGraph pg = make_path_graph(pair, boundary);
        const auto w_max = static_cast<int64_t>(1 + rng() % 32);
        std::vector<int64_t> w(pg.graph.edges.size());
        for (auto& x : w) x = 1 + static_cast<int64_t>(rng() % static_cast<uint64_t>(w_max));
        const PerturbedWeights pw = PerturbedWeights::make(pg.graph, w, w_max);
        const std::vector<int32_t> index = pg.graph.edge_index_matrix();
        const uint32_t n = pg.graph.num_vertices;
        int64_t min_base = std::numeric_limits<int64_t>::max();
        std::vector<std::pair<int64_t, int64_t>> weights;
        for (const Matching& m : all_perfect_matchings(pg.graph)) {
            int64_t base = 0, mod = 0;
            for (auto [u, v] : m.pairs) {
                base += pw.base[index[u * n + v]];
                mod += pw.modified[index[u * n + v]];
            }
            weights.emplace_back(base, mod);
            min_base = std::min(min_base, base);
        }
        int64_t worst_minimal = std::numeric_limits<int64_t>::min();
        int64_t best_other = std::numeric_limits<int64_t>::max();
        for (auto [base, mod] : weights) {
            if (base == min_base) {
                worst_minimal = std::max(worst_minimal, mod);
            } else {
                best_other = std::min(best_other, mod);
            }
        }
        violations += best_other <= worst_minimal;
    }
    out.pass = violations == 0;
    out.detail = std::to_string(instances) + " instances |V|<=8, all perfect matchings: " +
                 std::to_string(violations) + " violations";
    return out;
}

Outcome derandomized(const Options&) {
    Outcome out{7, "derandomized family structure"};
    int bad = 0, members = 0;
    for (uint32_t n : {4u, 6u}) {
        const uint32_t k = n / 2;
        const size_t edges = k * (k - 1) + k;
        for (uint32_t s : {1u, 2u}) {
            for (uint64_t t : {7ull, 11ull}) {
                DerandomizedFamily family(n, edges, s, t);
                bad += family.size() != static_cast<uint64_t>(std::pow(t - 1, s));
                const auto bound = static_cast<int64_t>(std::pow(n * t, s));
                bad += family.w_max_bound() != bound;
                for (uint64_t i = 0; i < family.size(); ++i, ++members) {
                    for (int64_t w : family.function(i)) bad += w < 0 || w > bound;
                }
                for (uint64_t m = 2; m <= t; ++m) {
                    for (int64_t w : modular_weight_function(n, edges, m)) bad += w < 0 || w >= static_cast<int64_t>(m);
                }
            }
        }
    }
    out.pass = bad == 0;
    out.detail = std::to_string(members) + " members over |V| in {4,6}, s in {1,2}, t in {7,11}: " +
                 std::to_string(bad) + " violations";
    return out;
}

Outcome timing(const Options& o) {
    Outcome out{8, "timing formulas"};
    int bad = 0;
    for (uint32_t d : {1u, 3u, 5u, 11u}) {
        for (double tau : {0.5, 1.0, 2.0}) {
            for (double frac : {1e-6, 0.25, 0.5, 0.999999}) {
                bad += reaction_time({tau, 0.0, frac * d * tau}, d) != 2.0 * d * tau;
            }
        }
    }
    bad += reaction_time({1.0, 2.9, 0.2}, 3) != 9.0;
    std::mt19937_64 rng(mix_seed({o.seed, 8}));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int disagreements = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto d = static_cast<uint32_t>(1 + rng() % 15);
        TimingModel tm{0.1 + 10.0 * unit(rng), 0.0, 0.0};
        tm.tau_l = 4.0 * d * tm.tau_sg * unit(rng);
        tm.t_w = d * tm.tau_sg * std::max(unit(rng), 1e-9);
        if (tm.t_w >= d * tm.tau_sg) continue;
        disagreements += reaction_time(tm, d) != reaction_time_case_form(tm, d);
    }
    bad += throughput_ok({1.0, 0.0, 3.0}, WindowConfig{3, 3, 3});  // equality is not enough
    bad += !throughput_ok({1.0, 0.0, 2.999}, WindowConfig{3, 3, 3});
    bad += !throughput_ok({1.0, 0.0, 1.0}, WindowConfig{3, 3, 3});
    out.pass = bad == 0 && disagreements == 0;
    out.detail = "first-case and reference checks: " + std::to_string(bad) + " failures; closed vs case form on 10^4 tuples: " +
                 std::to_string(disagreements) + " disagreements";
    return out;
}

Outcome windows(const Options& o) {
    Outcome out{9, "sliding-window consistency"};
    const uint32_t d = 3, rounds = 3 * d;
    const DetectorGraph graph = build_rotated_memory_graph(d, rounds, 1e-3, 10);
    const DistanceTable table = precompute_tables(graph, o.threads);
    const PerturbationScheme scheme = SeededPrngScheme{o.seed};
    SlidingWindowDecoder single(graph, WindowConfig{rounds, d, d}, scheme);
    SlidingWindowDecoder multi(graph, WindowConfig{d, d, d}, scheme);
    const int shots = 1000;
    int differ = 0, agree_whole = 0, agree_oracle = 0, oracle_shots = 0, nontrivial = 0;
    for (int i = 0; i < shots; ++i) {
        const ErrorSample sample = sample_errors(graph, mix_seed({o.seed, 9, static_cast<uint64_t>(i)}));
        const PathGraph pg = build_path_graph(table, sample.detection_events, graph);
        const DecodeResult whole = decode(pg.graph, scheme);
        const Recovery rc = matching_to_recovery(whole.matching.pairs, pg, table, graph);
        const WindowRunResult one = single.run(sample.detection_events);
        differ += one.committed_edges != rc.corrected_edges || one.logical_flip_correction != rc.logical_flip_correction;
        const WindowRunResult many = multi.run(sample.detection_events);
        nontrivial += !pg.empty();
        agree_whole += many.logical_flip_correction == rc.logical_flip_correction;
        if (pg.size() <= kOracleMaxVertices) {
            const OracleResult best = brute_force_mwpm(pg.graph);
            const Recovery oracle = matching_to_recovery(best.one_matching.pairs, pg, table, graph);
            ++oracle_shots;
            agree_oracle += many.logical_flip_correction == oracle.logical_flip_correction;
        }
    }
    out.pass = differ == 0;
    out.detail = std::to_string(shots) + " shots d=3, 9 rounds (" + std::to_string(nontrivial) +
                 " with events): single window differs on " + std::to_string(differ) +
                 "; windows n_com=n_buf=3 agree with whole-history decode on " + std::to_string(agree_whole) + "/" +
                 std::to_string(shots) + ", with brute-force whole-history on " + std::to_string(agree_oracle) + "/" +
                 std::to_string(oracle_shots);
    return out;
}

Outcome suppression(const Options& o) {
    Outcome out{10, "below-threshold suppression"};
    const uint64_t shots = 100000;
    ExperimentResult r[2];
    for (int i = 0; i < 2; ++i) {
        ExperimentConfig cfg;
        cfg.distance = cfg.rounds = i == 0 ? 3 : 5;
        cfg.p = 1e-3;
        cfg.shots = shots;
        cfg.scheme = SeededPrngScheme{o.seed};
        cfg.master_seed = mix_seed({o.seed, 10, cfg.distance});
        cfg.threads = o.threads;
        cfg.keep_shot_records = false;
        r[i] = run_memory_experiment(cfg);
    }
    out.pass = r[1].logical_error_rate < r[0].logical_error_rate && r[1].interval.high < r[0].interval.low;
    out.detail = std::to_string(shots) + " shots: d=3 rate " + str(r[0].logical_error_rate) + " [" +
                 str(r[0].interval.low) + ", " + str(r[0].interval.high) + "], d=5 rate " +
                 str(r[1].logical_error_rate) + " [" + str(r[1].interval.low) + ", " + str(r[1].interval.high) + "]";
    return out;
}

Outcome determinism(const Options& o) {
    Outcome out{11, "determinism across threads"};
    std::vector<std::string> reports;
    for (unsigned threads : {1u, 4u, 8u}) {
        ExperimentConfig cfg;
        cfg.distance = 3;
        cfg.rounds = 3;
        cfg.shots = o.quick ? 500 : 3000;
        cfg.scheme = SeededPrngScheme{o.seed};
        cfg.master_seed = o.seed;
        cfg.threads = threads;
        cfg.oracle_max_size = 10;
        const ExperimentResult e = run_memory_experiment(cfg);
        WmaxScanConfig scan;
        scan.distances = {3, 5};
        scan.shots_per_d = o.quick ? 500 : 3000;
        scan.master_seed = o.seed;
        scan.threads = threads;
        const WmaxScanResult w = run_wmax_scan(scan);
        reports.push_back(experiment_to_json(e).dump() + shots_to_csv(e.shots) + wmax_scan_to_json(w).dump() +
                          wmax_records_to_csv(w.records));
    }
    out.pass = reports[0] == reports[1] && reports[0] == reports[2];
    out.detail = "experiment + wmax-scan reports at 1, 4, 8 threads: " +
                 std::string(out.pass ? "byte-identical" : "differ") + " (" + std::to_string(reports[0].size()) +
                 " bytes)";
    return out;
}

}  // namespace

std::vector<Outcome> run(const Options& options, const std::function<void(const Outcome&)>& report) {
    using Check = Outcome (*)(const Options&);
    const Check checks[] = {soundness,  determinants, characteristic, isolation_rate, scaling,     order_preservation,
                            derandomized, timing,     windows,        suppression,    determinism};
    std::vector<Outcome> outcomes;
    for (int id = 1; id <= 11; ++id) {
        if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
            continue;
        }
        Outcome r;
        try {
            r = checks[id - 1](options);
        } catch (const std::exception& e) {
            r = Outcome{id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what()};
        }
        if (report) report(r);
        outcomes.push_back(std::move(r));
    }
    return outcomes;
}

std::string format(const Outcome& outcome) {
    return std::string(outcome.pass ? "PASS" : "FAIL") + " [" + std::to_string(outcome.id) + "] " + outcome.name +
           ": " + outcome.detail;
}

}  // namespace pmwpm::acceptance
