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

#include "pmwpm/experiments.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pmwpm/detector_model.h"
#include "pmwpm/hashing.h"
#include "pmwpm/matching_oracle.h"
#include "pmwpm/shortest_paths.h"

#ifndef PMWPM_BUILD_ID
#define PMWPM_BUILD_ID "unknown"
#endif

namespace pmwpm {

const char* build_id() { return PMWPM_BUILD_ID; }

WilsonInterval wilson_interval(uint64_t successes, uint64_t trials, double z) {
    if (trials == 0) throw std::invalid_argument("Wilson interval needs at least one trial");
    if (successes > trials) throw std::invalid_argument("more successes than trials");
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

namespace {

// Runs body(i) for i in [0, count) on `threads` workers, strided.
template <class Body>
void parallel_for(uint64_t count, unsigned threads, Body&& body) {
    threads = std::max(1u, threads);
    if (threads == 1 || count < 2) {
        for (uint64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (uint64_t i = w; i < count; i += threads) body(i);
        });
    }
}

PerturbationScheme scheme_for_shot(const PerturbationScheme& scheme, uint64_t shot) {
    if (const auto* r = std::get_if<RandomizedScheme>(&scheme)) {
        RandomizedScheme copy = *r;
        copy.seed = mix_seed({r->seed, shot});
        return copy;
    }
    return scheme;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// RFC 4180 records; quoted fields may contain commas, quotes and newlines.
std::vector<std::vector<std::string>> split_csv(std::string_view csv) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> fields(1);
    bool quoted = false;
    bool dirty = false;
    auto end_row = [&] {
        if (dirty) rows.push_back(std::move(fields));
        fields.assign(1, std::string());
        dirty = false;
    };
    for (size_t i = 0; i < csv.size(); ++i) {
        const char c = csv[i];
        if (quoted) {
            if (c == '"' && i + 1 < csv.size() && csv[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = dirty = true;
        } else if (c == ',') {
            fields.emplace_back();
            dirty = true;
        } else if (c == '\n') {
            end_row();
        } else if (c != '\r') {
            fields.back() += c;
            dirty = true;
        }
    }
    if (quoted) throw std::runtime_error("unterminated quoted CSV field");
    end_row();
    return rows;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view csv, const std::string& header, size_t columns) {
    std::vector<std::vector<std::string>> rows = split_csv(csv);
    if (rows.empty() || rows.front().size() != columns ||
        csv.substr(0, csv.find('\n')) != header) {
        throw std::runtime_error("unexpected CSV header");
    }
    rows.erase(rows.begin());
    for (size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != columns) {
            throw std::runtime_error("wrong number of CSV fields in record " + std::to_string(r + 1));
        }
    }
    return rows;
}

uint64_t to_u64(const std::string& s) { return std::stoull(s); }
int64_t to_i64(const std::string& s) { return std::stoll(s); }

nlohmann::json provenance(const nlohmann::json& scheme) {
    return {{"schema", kReportSchema}, {"build", build_id()}, {"generator", kPerturbationGenerator}, {"scheme", scheme}};
}

}  // namespace

ExperimentResult run_memory_experiment(const ExperimentConfig& config) {
    if (config.shots == 0) throw std::invalid_argument("shots must be positive");
    if (config.oracle_max_size > kOracleMaxVertices) throw std::invalid_argument("oracle size limit too large");
    const DetectorGraph graph = build_rotated_memory_graph(config.distance, config.rounds, config.p, config.scale_c);
    const DistanceTable table = precompute_tables(graph, config.threads);

    std::vector<ShotRecord> shots(config.shots);
    parallel_for(config.shots, config.threads, [&](uint64_t i) {
        ShotRecord& rec = shots[i];
        rec.shot = i;
        const ErrorSample sample = sample_errors(graph, mix_seed({config.master_seed, i}));
        const PathGraph pg = build_path_graph(table, sample.detection_events, graph);
        rec.path_graph_size = static_cast<uint32_t>(pg.size());
        try {
            DecodeResult res = decode(pg.graph, scheme_for_shot(config.scheme, i), {config.arithmetic, 1});
            const Recovery rc = matching_to_recovery(res.matching.pairs, pg, table, graph);
            rec.decoded = true;
            rec.logical_error = rc.logical_flip_correction != sample.logical_flip;
            rec.attempts_used = res.attempts_used;
            rec.w_max_used = res.w_max_used;
            rec.base_weight = res.matching.total_base_weight;
            if (!pg.empty() && pg.size() <= config.oracle_max_size) {
                rec.oracle = brute_force_mwpm(pg.graph).weight == rec.base_weight ? 1 : 0;
            }
        } catch (const DecodeFailure& e) {
            rec.logical_error = true;
            rec.error = e.what();
        }
    });

    ExperimentResult result;
    result.config = config;
    for (const ShotRecord& rec : shots) {
        result.logical_errors += rec.logical_error;
        result.decode_failures += !rec.decoded;
        if (rec.oracle >= 0) {
            ++result.oracle_checked;
            result.oracle_mismatches += rec.oracle == 0;
        }
        if (rec.decoded && rec.path_graph_size > 0) {
            WmaxStat& st = result.wmax_stats[rec.path_graph_size];
            ++st.shots;
            st.max_w_max = std::max(st.max_w_max, rec.w_max_used);
            st.total_attempts += rec.attempts_used;
        }
    }
    result.logical_error_rate = static_cast<double>(result.logical_errors) / static_cast<double>(config.shots);
    result.interval = wilson_interval(result.logical_errors, config.shots);
    if (config.keep_shot_records) result.shots = std::move(shots);
    return result;
}

nlohmann::json experiment_to_json(const ExperimentResult& r) {
    nlohmann::json j = provenance(scheme_to_json(r.config.scheme));
    j["kind"] = "memory-experiment";
    j["config"] = {{"distance", r.config.distance}, {"rounds", r.config.rounds},       {"p", r.config.p},
                   {"shots", r.config.shots},       {"master_seed", r.config.master_seed}, {"C", r.config.scale_c},
                   {"arithmetic", r.config.arithmetic == Arithmetic::kExact ? "exact" : "truncated"},
                   {"oracle_max_size", r.config.oracle_max_size}};
    j["logical_errors"] = r.logical_errors;
    j["decode_failures"] = r.decode_failures;
    j["logical_error_rate"] = r.logical_error_rate;
    j["wilson95"] = {r.interval.low, r.interval.high};
    j["oracle"] = {{"checked", r.oracle_checked}, {"mismatches", r.oracle_mismatches}};
    auto stats = nlohmann::json::array();
    for (const auto& [size, st] : r.wmax_stats) {
        stats.push_back(
            {{"size", size}, {"shots", st.shots}, {"max_w_max", st.max_w_max}, {"total_attempts", st.total_attempts}});
    }
    j["wmax_stats"] = stats;
    auto shots = nlohmann::json::array();
    for (const ShotRecord& s : r.shots) {
        nlohmann::json rec = {{"shot", s.shot},
                              {"size", s.path_graph_size},
                              {"decoded", s.decoded},
                              {"logical_error", s.logical_error},
                              {"attempts_used", s.attempts_used},
                              {"w_max_used", s.w_max_used},
                              {"base_weight", s.base_weight},
                              {"oracle", s.oracle}};
        if (!s.error.empty()) rec["error"] = s.error;
        shots.push_back(std::move(rec));
    }
    j["shots"] = std::move(shots);
    return j;
}

static const char* kShotHeader = "shot,size,decoded,logical_error,attempts_used,w_max_used,base_weight,oracle,error";

std::string shots_to_csv(const std::vector<ShotRecord>& shots) {
    std::ostringstream out;
    out << kShotHeader << '\n';
    for (const ShotRecord& s : shots) {
        out << s.shot << ',' << s.path_graph_size << ',' << s.decoded << ',' << s.logical_error << ','
            << s.attempts_used << ',' << s.w_max_used << ',' << s.base_weight << ',' << s.oracle << ','
            << csv_field(s.error) << '\n';
    }
    return out.str();
}

std::vector<ShotRecord> shots_from_csv(std::string_view csv) {
    std::vector<ShotRecord> out;
    for (const auto& f : parse_csv(csv, kShotHeader, 9)) {
        ShotRecord s;
        s.shot = to_u64(f[0]);
        s.path_graph_size = static_cast<uint32_t>(to_u64(f[1]));
        s.decoded = f[2] == "1";
        s.logical_error = f[3] == "1";
        s.attempts_used = to_u64(f[4]);
        s.w_max_used = to_i64(f[5]);
        s.base_weight = to_i64(f[6]);
        s.oracle = static_cast<int>(to_i64(f[7]));
        s.error = f[8];
        out.push_back(std::move(s));
    }
    return out;
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("power-law fit needs at least 3 points");
    double sx = 0, sy = 0;
    for (auto [x, y] : points) {
        if (!(x > 0.0 && y > 0.0)) throw std::invalid_argument("power-law fit needs positive coordinates");
        sx += std::log(x);
        sy += std::log(y);
    }
    const double n = static_cast<double>(points.size());
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0, sxy = 0;
    for (auto [x, y] : points) {
        sxx += (std::log(x) - mx) * (std::log(x) - mx);
        sxy += (std::log(x) - mx) * (std::log(y) - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("power-law fit needs two distinct x values");
    PowerLawFit fit;
    fit.b = sxy / sxx;
    const double log_a = my - fit.b * mx;
    fit.a = std::exp(log_a);
    for (auto [x, y] : points) {
        const double r = std::log(y) - (log_a + fit.b * std::log(x));
        fit.residual += r * r;
    }
    return fit;
}

int64_t power_law_bound(double a, double b, double x) { return static_cast<int64_t>(std::ceil(a * std::pow(x, b))); }

WmaxScanResult run_wmax_scan(const WmaxScanConfig& config) {
    if (config.size_cap % 2 != 0) throw std::invalid_argument("size cap must be even");
    if (config.distances.empty()) throw std::invalid_argument("need at least one distance");
    WmaxScanResult result;
    result.config = config;
    result.scheme = SeededPrngScheme{config.master_seed, 2, config.max_w_max};

    struct Cell {
        uint64_t shots = 0;
        int64_t max_w = 0;
    };
    std::map<uint32_t, std::map<uint32_t, Cell>> cells;  // size -> distance -> cell
    for (uint32_t d : config.distances) {
        const DetectorGraph graph = build_rotated_memory_graph(d, d, config.p, config.scale_c);
        const DistanceTable table = precompute_tables(graph, config.threads);
        std::vector<uint32_t> sizes(config.shots_per_d, 0);
        std::vector<int64_t> w_used(config.shots_per_d, 0);
        std::vector<uint8_t> failed(config.shots_per_d, 0);
        parallel_for(config.shots_per_d, config.threads, [&](uint64_t i) {
            const ErrorSample sample = sample_errors(graph, mix_seed({config.master_seed, d, i}));
            const PathGraph pg = build_path_graph(table, sample.detection_events, graph);
            if (pg.empty() || pg.size() > config.size_cap) return;
            sizes[i] = static_cast<uint32_t>(pg.size());
            try {
                w_used[i] = decode(pg.graph, result.scheme).w_max_used;
            } catch (const DecodeFailure&) {
                failed[i] = 1;
            }
        });
        for (uint64_t i = 0; i < config.shots_per_d; ++i) {
            if (sizes[i] == 0) continue;
            if (failed[i]) {
                ++result.decode_failures;
                continue;
            }
            Cell& c = cells[sizes[i]][d];
            ++c.shots;
            c.max_w = std::max(c.max_w, w_used[i]);
        }
    }
    std::vector<std::pair<double, double>> points;
    for (const auto& [size, by_d] : cells) {
        WmaxScanRecord rec;
        rec.size = size;
        for (const auto& [d, c] : by_d) {
            rec.shots += c.shots;
            rec.min_w_max = std::max(rec.min_w_max, c.max_w);
            rec.distances.push_back(d);
        }
        rec.sparse = rec.shots < config.min_samples;
        if (!rec.sparse) points.emplace_back(size, static_cast<double>(rec.min_w_max));
        result.records.push_back(std::move(rec));
    }
    if (points.size() >= 3) {
        try {
            result.fit = fit_power_law(points);
        } catch (const std::invalid_argument&) {
            result.fit.reset();
        }
    }
    return result;
}

nlohmann::json wmax_scan_to_json(const WmaxScanResult& r) {
    nlohmann::json j = provenance(scheme_to_json(r.scheme));
    j["kind"] = "wmax-scan";
    j["config"] = {{"distances", r.config.distances}, {"p", r.config.p},
                   {"shots_per_d", r.config.shots_per_d}, {"size_cap", r.config.size_cap},
                   {"master_seed", r.config.master_seed}, {"C", r.config.scale_c},
                   {"min_samples", r.config.min_samples}};
    auto records = nlohmann::json::array();
    for (const WmaxScanRecord& rec : r.records) {
        records.push_back({{"size", rec.size},
                           {"min_w_max", rec.min_w_max},
                           {"shots", rec.shots},
                           {"distances", rec.distances},
                           {"sparse", rec.sparse},
                           {"reference_bound", power_law_bound(kReferenceBoundA, kReferenceBoundB, rec.size)}});
    }
    j["records"] = records;
    j["decode_failures"] = r.decode_failures;
    if (r.fit) {
        j["fit"] = {{"a", r.fit->a}, {"b", r.fit->b}, {"residual", r.fit->residual}};
        auto curve = nlohmann::json::array();
        for (uint32_t x = 2; x <= r.config.size_cap; x += 2) {
            curve.push_back({{"size", x}, {"bound", power_law_bound(r.fit->a, r.fit->b, x)}});
        }
        j["fit_bound_curve"] = curve;
    } else {
        j["fit"] = nullptr;
    }
    return j;
}

static const char* kScanHeader = "size,min_w_max,shots_at_size,d_list,sparse";

std::string wmax_records_to_csv(const std::vector<WmaxScanRecord>& records) {
    std::ostringstream out;
    out << kScanHeader << '\n';
    for (const WmaxScanRecord& r : records) {
        out << r.size << ',' << r.min_w_max << ',' << r.shots << ',';
        for (size_t i = 0; i < r.distances.size(); ++i) out << (i ? ";" : "") << r.distances[i];
        out << ',' << r.sparse << '\n';
    }
    return out.str();
}

std::vector<WmaxScanRecord> wmax_records_from_csv(std::string_view csv) {
    std::vector<WmaxScanRecord> out;
    for (const auto& f : parse_csv(csv, kScanHeader, 5)) {
        WmaxScanRecord r;
        r.size = static_cast<uint32_t>(to_u64(f[0]));
        r.min_w_max = to_i64(f[1]);
        r.shots = to_u64(f[2]);
        std::istringstream ds(f[3]);
        std::string tok;
        while (std::getline(ds, tok, ';')) {
            if (!tok.empty()) r.distances.push_back(static_cast<uint32_t>(to_u64(tok)));
        }
        r.sparse = f[4] == "1";
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace pmwpm
