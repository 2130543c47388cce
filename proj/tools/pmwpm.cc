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

// Command-line front end: table precompute, decoding, experiments, window
// streaming, timing calculators, benchmarks and the self test.

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "acceptance_checks.h"
#include "pmwpm/bigdet.h"
#include "pmwpm/detector_model.h"
#include "pmwpm/experiments.h"
#include "pmwpm/hashing.h"
#include "pmwpm/isolation.h"
#include "pmwpm/shortest_paths.h"
#include "pmwpm/windowing.h"

namespace {

using namespace pmwpm;
using json = nlohmann::json;

struct Globals {
    uint64_t seed = 0;
    unsigned threads = 1;
    std::string format = "json";
    std::string out;
};

struct GraphSource {
    std::string graph_file;
    uint32_t d = 3;
    uint32_t rounds = 0;  // 0: same as d
    double p = 1e-3;
    int64_t c = 10;

    void add(CLI::App* cmd) {
        cmd->add_option("--graph", graph_file, "Detector graph file (text); otherwise a memory graph is built");
        cmd->add_option("--d", d, "Code distance")->check(CLI::PositiveNumber);
        cmd->add_option("--rounds", rounds, "Detector layers (default: d)");
        cmd->add_option("--p", p, "Physical error rate");
        cmd->add_option("--C", c, "Weight scale C")->check(CLI::PositiveNumber);
    }
    DetectorGraph load() const {
        if (!graph_file.empty()) {
            std::ifstream in(graph_file);
            if (!in) throw std::runtime_error("cannot open graph file " + graph_file);
            std::stringstream buf;
            buf << in.rdbuf();
            return parse_graph(buf.str());
        }
        return build_rotated_memory_graph(d, rounds == 0 ? d : rounds, p, c);
    }
};

struct SchemeOptions {
    std::string kind = "seeded";
    int64_t w_max = 0;  // randomized: default 2|E| per instance is not fixed, so 16
    uint64_t attempts = 64;
    uint32_t s = 1;
    uint64_t t = 7;
    int64_t max_w_max = 4096;

    void add(CLI::App* cmd) {
        cmd->add_option("--scheme", kind, "Perturbation scheme")
            ->check(CLI::IsMember({"seeded", "randomized", "derandomized"}));
        cmd->add_option("--w-max", w_max, "Randomized: W_max (default 16); seeded: initial W_max (default 2)");
        cmd->add_option("--attempts", attempts, "Randomized: attempt budget");
        cmd->add_option("--s", s, "Derandomized: composition depth s");
        cmd->add_option("--t", t, "Derandomized: modulus range t (>= 7)");
        cmd->add_option("--max-w-max", max_w_max, "Seeded: escalation cap");
    }
    PerturbationScheme make(uint64_t seed) const {
        if (kind == "randomized") return RandomizedScheme{w_max > 0 ? w_max : 16, attempts, seed};
        if (kind == "derandomized") return DerandomizedScheme{s, t};
        return SeededPrngScheme{seed, w_max > 0 ? w_max : 2, max_w_max};
    }
};

void emit(const Globals& g, const std::string& text) {
    if (g.out.empty() || g.out == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(g.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + g.out);
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
}

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::stringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Either a JSON array of detector ids or whitespace-separated ids.
std::vector<VertexId> parse_events(const std::string& text) {
    std::vector<VertexId> out;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return out;
    if (text[first] == '[') {
        for (const auto& v : json::parse(text)) out.push_back(v.get<VertexId>());
    } else {
        std::istringstream in(text);
        int64_t v;
        while (in >> v) {
            if (v < 0) throw std::runtime_error("negative detector id");
            out.push_back(static_cast<VertexId>(v));
        }
        if (!in.eof()) throw std::runtime_error("malformed event list");
    }
    std::sort(out.begin(), out.end());
    return out;
}

void require_json(const Globals& g, const char* cmd) {
    if (g.format != "json") throw CLI::ValidationError(std::string(cmd) + " only supports --format json");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Perturbation-based minimum-weight perfect matching decoder"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    app.add_option("--out", g.out, "Output file (default stdout)");
    app.fallthrough();

    // precompute
    auto* precompute = app.add_subcommand("precompute", "Build the lookup tables of a detector graph");
    GraphSource pre_src;
    pre_src.add(precompute);
    std::string graph_out;
    precompute->add_option("--graph-out", graph_out, "Also write the graph text here");

    // table inspect
    auto* table_cmd = app.add_subcommand("table", "Table utilities");
    table_cmd->require_subcommand(1);
    auto* inspect = table_cmd->add_subcommand("inspect", "Dump a table file as JSON");
    std::string inspect_file;
    bool inspect_paths = false;
    inspect->add_option("table", inspect_file, "Table file")->required();
    inspect->add_flag("--paths", inspect_paths, "Include recovery paths");

    // decode
    auto* decode_cmd = app.add_subcommand("decode", "Decode one set of detection events");
    GraphSource dec_src;
    dec_src.add(decode_cmd);
    SchemeOptions dec_scheme;
    dec_scheme.add(decode_cmd);
    std::string dec_table, dec_events;
    bool dec_exact = false;
    decode_cmd->add_option("--table", dec_table, "Table file (default: computed)");
    decode_cmd->add_option("--events", dec_events, "Event file: JSON array or whitespace list ('-' for stdin)")
        ->required();
    decode_cmd->add_flag("--exact", dec_exact, "Exact big-integer determinants");

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "Monte Carlo memory experiment");
    ExperimentConfig exp_cfg;
    SchemeOptions exp_scheme;
    exp_scheme.add(exp_cmd);
    uint32_t exp_rounds = 0;
    bool exp_per_shot = false, exp_exact = false;
    exp_cmd->add_option("--d", exp_cfg.distance, "Code distance");
    exp_cmd->add_option("--rounds", exp_rounds, "Detector layers (default: d)");
    exp_cmd->add_option("--p", exp_cfg.p, "Physical error rate");
    exp_cmd->add_option("--shots", exp_cfg.shots, "Shots")->check(CLI::PositiveNumber);
    exp_cmd->add_option("--C", exp_cfg.scale_c, "Weight scale C");
    exp_cmd->add_option("--oracle-max-size", exp_cfg.oracle_max_size, "Brute-force cross-check up to this |V|");
    exp_cmd->add_flag("--per-shot", exp_per_shot, "Include per-shot records in JSON");
    exp_cmd->add_flag("--exact", exp_exact, "Exact big-integer determinants");

    // wmax-scan
    auto* scan_cmd = app.add_subcommand("wmax-scan", "Minimal W_max per path-graph size");
    WmaxScanConfig scan_cfg;
    scan_cmd->add_option("--d-list", scan_cfg.distances, "Distances")->delimiter(',');
    scan_cmd->add_option("--p", scan_cfg.p, "Physical error rate");
    scan_cmd->add_option("--shots", scan_cfg.shots_per_d, "Shots per distance");
    scan_cmd->add_option("--size-cap", scan_cfg.size_cap, "Largest |V| recorded (even)");
    scan_cmd->add_option("--min-samples", scan_cfg.min_samples, "Sizes with fewer shots are sparse");
    scan_cmd->add_option("--max-w-max", scan_cfg.max_w_max, "Escalation cap");
    scan_cmd->add_option("--C", scan_cfg.scale_c, "Weight scale C");

    // window-run
    auto* win_cmd = app.add_subcommand("window-run", "Sliding-window decoding of a round stream (NDJSON)");
    GraphSource win_src;
    win_src.add(win_cmd);
    SchemeOptions win_scheme;
    win_scheme.add(win_cmd);
    uint32_t n_com = 0, n_buf = 0;
    std::string win_input = "-";
    win_cmd->add_option("--n-com", n_com, "Commit rounds (default: d)");
    win_cmd->add_option("--n-buf", n_buf, "Buffer rounds (default: d)");
    win_cmd->add_option("--input", win_input, "NDJSON rounds {\"round\": r, \"detectors\": [...]} ('-' for stdin)");

    // timing
    auto* timing_cmd = app.add_subcommand("timing", "Throughput and reaction-time calculators");
    TimingModel tm;
    uint32_t t_d = 3, t_ncom = 0;
    timing_cmd->add_option("--d", t_d, "Code distance")->check(CLI::PositiveNumber);
    timing_cmd->add_option("--tau-sg", tm.tau_sg, "Syndrome generation time per round")->required();
    timing_cmd->add_option("--tau-l", tm.tau_l, "IO latency");
    timing_cmd->add_option("--tw", tm.t_w, "Decode time per window")->required();
    timing_cmd->add_option("--n-com", t_ncom, "Commit rounds (default: d)");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Determinant and decode microbenchmarks");
    std::vector<uint32_t> bench_sizes = {8, 16, 24, 32};
    uint32_t bench_repeats = 5;
    bench_cmd->add_option("--sizes", bench_sizes, "Path-graph sizes |V|")->delimiter(',');
    bench_cmd->add_option("--repeats", bench_repeats, "Repetitions per size");

    // selftest
    auto* self_cmd = app.add_subcommand("selftest", "Oracle-equivalence suite (reduced sample counts)");
    bool self_full = false;
    std::vector<int> self_only;
    self_cmd->add_flag("--full", self_full, "Use the full acceptance sample counts");
    self_cmd->add_option("--only", self_only, "Criterion ids")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*precompute) {
            if (g.out.empty()) throw CLI::ValidationError("precompute needs --out for the table file");
            const DetectorGraph graph = pre_src.load();
            const DistanceTable table = precompute_tables(graph, g.threads);
            std::ofstream f(g.out, std::ios::binary);
            if (!f) throw std::runtime_error("cannot write " + g.out);
            table.write_binary(f);
            if (!graph_out.empty()) {
                std::ofstream gf(graph_out, std::ios::binary);
                gf << graph.serialize();
            }
            std::cerr << "wrote table for " << graph.num_detectors() << " detectors, graph hash " << std::hex
                      << graph.hash() << std::dec << "\n";
        } else if (*inspect) {
            require_json(g, "table inspect");
            std::ifstream f(inspect_file, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open " + inspect_file);
            emit(g, DistanceTable::read_binary(f).to_json(inspect_paths));
        } else if (*decode_cmd) {
            require_json(g, "decode");
            const DetectorGraph graph = dec_src.load();
            DistanceTable table;
            if (!dec_table.empty()) {
                std::ifstream f(dec_table, std::ios::binary);
                if (!f) throw std::runtime_error("cannot open " + dec_table);
                table = DistanceTable::read_binary(f);
            } else {
                table = precompute_tables(graph, g.threads);
            }
            const std::vector<VertexId> events = parse_events(read_file(dec_events));
            const PathGraph pg = build_path_graph(table, events, graph);
            const PerturbationScheme scheme = dec_scheme.make(g.seed);
            const DecodeResult r =
                decode(pg.graph, scheme, {dec_exact ? Arithmetic::kExact : Arithmetic::kTruncated, g.threads});
            const Recovery rc = matching_to_recovery(r.matching.pairs, pg, table, graph);
            json j = decode_result_to_json(r, scheme);
            j["path_graph_size"] = pg.size();
            j["actives"] = pg.actives;
            j["corrected_edges"] = rc.corrected_edges;
            j["logical_flip_correction"] = rc.logical_flip_correction;
            j["build"] = build_id();
            emit(g, j.dump(2));
        } else if (*exp_cmd) {
            exp_cfg.rounds = exp_rounds == 0 ? exp_cfg.distance : exp_rounds;
            exp_cfg.scheme = exp_scheme.make(g.seed);
            exp_cfg.master_seed = g.seed;
            exp_cfg.threads = g.threads;
            exp_cfg.arithmetic = exp_exact ? Arithmetic::kExact : Arithmetic::kTruncated;
            exp_cfg.keep_shot_records = exp_per_shot || g.format == "csv";
            const ExperimentResult r = run_memory_experiment(exp_cfg);
            emit(g, g.format == "csv" ? shots_to_csv(r.shots) : experiment_to_json(r).dump(2));
        } else if (*scan_cmd) {
            scan_cfg.master_seed = g.seed;
            scan_cfg.threads = g.threads;
            const WmaxScanResult r = run_wmax_scan(scan_cfg);
            emit(g, g.format == "csv" ? wmax_records_to_csv(r.records) : wmax_scan_to_json(r).dump(2));
        } else if (*win_cmd) {
            require_json(g, "window-run");
            const DetectorGraph graph = win_src.load();
            const uint32_t d = graph.info().distance ? graph.info().distance : win_src.d;
            WindowConfig cfg{n_com ? n_com : d, n_buf ? n_buf : d, d};
            SlidingWindowDecoder decoder(graph, cfg, win_scheme.make(g.seed), {Arithmetic::kTruncated, g.threads});
            std::istringstream in(read_file(win_input));
            std::ostringstream out;
            std::string line;
            while (std::getline(in, line)) {
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                const json rec = json::parse(line);
                const auto round = rec.at("round").get<uint32_t>();
                auto events = rec.value("detectors", std::vector<VertexId>{});
                std::sort(events.begin(), events.end());
                for (const WindowRecord& w : decoder.push_round(round, events)) {
                    out << window_record_to_json(w).dump() << '\n';
                }
            }
            const WindowRunResult res = decoder.finish();
            out << json{{"summary", true},
                        {"windows", res.windows.size()},
                        {"committed_edges", res.committed_edges},
                        {"logical_flip_correction", res.logical_flip_correction}}
                       .dump()
                << '\n';
            emit(g, out.str());
        } else if (*timing_cmd) {
            require_json(g, "timing");
            const WindowConfig cfg{t_ncom ? t_ncom : t_d, t_d, t_d};
            json j = {{"d", t_d},
                      {"tau_sg", tm.tau_sg},
                      {"tau_l", tm.tau_l},
                      {"t_w", tm.t_w},
                      {"n_com", cfg.n_com},
                      {"throughput_ok", throughput_ok(tm, cfg)},
                      {"reaction_time", reaction_time(tm, t_d)},
                      {"reaction_time_case_form", reaction_time_case_form(tm, t_d)},
                      {"reaction_time_parallel", reaction_time_parallel(tm, t_d)}};
            emit(g, j.dump(2));
        } else if (*bench_cmd) {
            require_json(g, "bench");
            std::mt19937_64 rng(g.seed);
            json rows = json::array();
            for (uint32_t n : bench_sizes) {
                if (n < 2 || n % 2) throw CLI::ValidationError("bench sizes must be even and >= 2");
                const uint32_t k = n / 2;
                double det_s = 0, fast_s = 0;
                uint64_t attempts = 0;
                for (uint32_t rep = 0; rep < bench_repeats; ++rep) {
                    std::vector<int64_t> pair(k * k), boundary(k);
                    for (uint32_t a = 0; a < k; ++a) {
                        boundary[a] = 60 + static_cast<int64_t>(rng() % 200);
                        for (uint32_t b = a + 1; b < k; ++b) {
                            pair[a * k + b] = pair[b * k + a] = 60 + static_cast<int64_t>(rng() % 300);
                        }
                    }
                    const PathGraph pg = make_path_graph(pair, boundary);
                    std::vector<int64_t> w(pg.graph.edges.size());
                    for (auto& x : w) x = 1 + static_cast<int64_t>(rng() % 8);
                    const PerturbedWeights pw = PerturbedWeights::make(pg.graph, w, 8);
                    const BigMatrix b = build_b_matrix(pg.graph, pw);
                    auto t0 = std::chrono::steady_clock::now();
                    const BigInt det = det_berkowitz(b, {g.threads});
                    auto t1 = std::chrono::steady_clock::now();
                    const DecodeResult r = decode(pg.graph, SeededPrngScheme{g.seed}, {Arithmetic::kTruncated, 1});
                    auto t2 = std::chrono::steady_clock::now();
                    det_s += std::chrono::duration<double>(t1 - t0).count();
                    fast_s += std::chrono::duration<double>(t2 - t1).count();
                    attempts += r.attempts_used;
                    (void)det;
                }
                rows.push_back({{"size", n},
                                {"repeats", bench_repeats},
                                {"exact_det_seconds", det_s / bench_repeats},
                                {"decode_seconds", fast_s / bench_repeats},
                                {"mean_attempts", static_cast<double>(attempts) / bench_repeats}});
            }
            emit(g, json{{"bench", rows}, {"build", build_id()}}.dump(2));
        } else if (*self_cmd) {
            acceptance::Options opt;
            opt.quick = !self_full;
            opt.threads = g.threads;
            if (g.seed != 0) opt.seed = g.seed;
            opt.only = self_only;
            bool ok = true;
            acceptance::run(opt, [&](const acceptance::Outcome& o) {
                std::cout << acceptance::format(o) << std::endl;
                ok = ok && o.pass;
            });
            return ok ? 0 : 2;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
