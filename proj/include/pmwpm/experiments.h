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

#ifndef PMWPM_EXPERIMENTS_H_
#define PMWPM_EXPERIMENTS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pmwpm/isolation.h"

namespace pmwpm {

/// Version tag of every JSON report.
inline constexpr const char* kReportSchema = "pmwpm-report/1";

/// Identifier of the source tree this binary was built from.
const char* build_id();

struct WilsonInterval {
    double low = 0.0;
    double high = 0.0;
};

/// Wilson score interval at confidence z (1.96 for 95%). trials must be > 0.
WilsonInterval wilson_interval(uint64_t successes, uint64_t trials, double z = 1.959963984540054);

struct ExperimentConfig {
    uint32_t distance = 3;
    uint32_t rounds = 3;
    double p = 1e-3;
    uint64_t shots = 1000;
    PerturbationScheme scheme = SeededPrngScheme{};
    uint64_t master_seed = 0;
    int64_t scale_c = 10;
    unsigned threads = 1;
    Arithmetic arithmetic = Arithmetic::kTruncated;
    /// Cross-check decoded weights against brute force on path graphs up to this size (0 disables).
    uint32_t oracle_max_size = 0;
    bool keep_shot_records = true;
};

struct ShotRecord {
    uint64_t shot = 0;
    uint32_t path_graph_size = 0;
    bool decoded = false;
    bool logical_error = false;
    uint64_t attempts_used = 0;
    int64_t w_max_used = 0;
    int64_t base_weight = 0;
    /// 1 agrees, 0 disagrees, -1 not checked.
    int oracle = -1;
    std::string error;
    bool operator==(const ShotRecord&) const = default;
};

struct WmaxStat {
    uint64_t shots = 0;
    int64_t max_w_max = 0;
    uint64_t total_attempts = 0;
    bool operator==(const WmaxStat&) const = default;
};

struct ExperimentResult {
    ExperimentConfig config;
    uint64_t logical_errors = 0;
    uint64_t decode_failures = 0;
    double logical_error_rate = 0.0;
    WilsonInterval interval;
    uint64_t oracle_checked = 0;
    uint64_t oracle_mismatches = 0;
    std::map<uint32_t, WmaxStat> wmax_stats;  // keyed by path graph size
    std::vector<ShotRecord> shots;
};

/// Monte Carlo memory experiment. Shot i samples errors with seed
/// mix_seed({master_seed, i}); results do not depend on `threads`. A failed
/// decode is recorded on its shot and counted as a logical error.
ExperimentResult run_memory_experiment(const ExperimentConfig& config);

nlohmann::json experiment_to_json(const ExperimentResult& result);
std::string shots_to_csv(const std::vector<ShotRecord>& shots);
std::vector<ShotRecord> shots_from_csv(std::string_view csv);

struct PowerLawFit {
    double a = 0.0;
    double b = 0.0;
    /// Sum of squared residuals of log y.
    double residual = 0.0;
};

/// Least squares of log y = log a + b log x. Needs at least 3 points with
/// positive coordinates and two distinct x values.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points);

/// ceil(a x^b).
int64_t power_law_bound(double a, double b, double x);

/// Reference bound ceil(0.62 x^0.80) on the minimal W_max.
inline constexpr double kReferenceBoundA = 0.62;
inline constexpr double kReferenceBoundB = 0.80;

struct WmaxScanConfig {
    std::vector<uint32_t> distances = {3, 5, 7};
    double p = 1e-3;
    uint64_t shots_per_d = 1000;
    uint32_t size_cap = 30;
    uint64_t master_seed = 0;
    int64_t scale_c = 10;
    unsigned threads = 1;
    /// Sizes seen fewer times than this are flagged sparse and left out of the fit.
    uint64_t min_samples = 10;
    int64_t max_w_max = 4096;
};

struct WmaxScanRecord {
    uint32_t size = 0;
    int64_t min_w_max = 0;
    uint64_t shots = 0;
    std::vector<uint32_t> distances;
    bool sparse = false;
    bool operator==(const WmaxScanRecord&) const = default;
};

struct WmaxScanResult {
    WmaxScanConfig config;
    SeededPrngScheme scheme;
    std::vector<WmaxScanRecord> records;  // by increasing size
    std::optional<PowerLawFit> fit;
    uint64_t decode_failures = 0;
};

/// Rounds equal the distance. Per shot the SeededPRNG escalation gives the
/// smallest successful W_max; per size the maximum is taken over shots and
/// then over distances.
WmaxScanResult run_wmax_scan(const WmaxScanConfig& config);

nlohmann::json wmax_scan_to_json(const WmaxScanResult& result);
std::string wmax_records_to_csv(const std::vector<WmaxScanRecord>& records);
std::vector<WmaxScanRecord> wmax_records_from_csv(std::string_view csv);

}  // namespace pmwpm

#endif  // PMWPM_EXPERIMENTS_H_
