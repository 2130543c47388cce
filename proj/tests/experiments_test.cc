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

#include <cmath>

#include "pmwpm/experiments.h"

namespace pmwpm {
namespace {

TEST(Wilson, KnownValues) {
    // Reference values from statsmodels proportion_confint(method="wilson").
    WilsonInterval a = wilson_interval(0, 10);
    EXPECT_NEAR(a.low, 0.0, 1e-12);
    EXPECT_NEAR(a.high, 0.27753279986288926, 1e-12);
    WilsonInterval b = wilson_interval(5, 10);
    EXPECT_NEAR(b.low, 0.23659309051256394, 1e-12);
    EXPECT_NEAR(b.high, 0.7634069094874361, 1e-12);
    WilsonInterval c = wilson_interval(3, 1000);
    EXPECT_NEAR(c.low, 0.0010207838811386195, 1e-12);
    EXPECT_NEAR(c.high, 0.008783014053503176, 1e-12);
}

TEST(PowerLaw, RecoversExactLaws) {
    PowerLawFit f = fit_power_law({{1, 2}, {2, 4}, {5, 10}, {9, 18}});
    EXPECT_NEAR(f.a, 2.0, 1e-12);
    EXPECT_NEAR(f.b, 1.0, 1e-12);
    EXPECT_NEAR(f.residual, 0.0, 1e-20);
    std::vector<std::pair<double, double>> pts;
    for (double x = 2; x <= 30; x += 2) pts.push_back({x, 0.62 * std::pow(x, 0.8)});
    PowerLawFit g = fit_power_law(pts);
    EXPECT_NEAR(g.a, 0.62, 1e-9);
    EXPECT_NEAR(g.b, 0.80, 1e-9);
}

TEST(PowerLaw, ResidualOfNoisyPoints) {
    // log y residuals +-0.1 around y = x: symmetric about the line, so the fit is exact.
    const double e = std::exp(0.1);
    PowerLawFit f = fit_power_law({{1, e}, {1, 1 / e}, {4, 4 * e}, {4, 4 / e}});
    EXPECT_NEAR(f.a, 1.0, 1e-12);
    EXPECT_NEAR(f.b, 1.0, 1e-12);
    EXPECT_NEAR(f.residual, 0.04, 1e-12);
}

TEST(PowerLaw, Errors) {
    EXPECT_THROW(fit_power_law({{1, 1}, {2, 2}}), std::invalid_argument);
    EXPECT_THROW(fit_power_law({{1, 1}, {2, 0}, {3, 3}}), std::invalid_argument);
}

TEST(PowerLaw, ReferenceBound) {
    EXPECT_EQ(power_law_bound(kReferenceBoundA, kReferenceBoundB, 2), 2);
    EXPECT_EQ(power_law_bound(kReferenceBoundA, kReferenceBoundB, 10), 4);
    EXPECT_EQ(power_law_bound(kReferenceBoundA, kReferenceBoundB, 30), 10);
    int64_t prev = 0;
    for (int x = 2; x <= 30; ++x) {
        const int64_t b = power_law_bound(kReferenceBoundA, kReferenceBoundB, x);
        EXPECT_GE(b, prev);
        prev = b;
    }
}

TEST(Experiment, VanishingNoiseGivesNoErrors) {
    ExperimentConfig c;
    c.p = 1e-9;
    c.shots = 200;
    ExperimentResult r = run_memory_experiment(c);
    EXPECT_EQ(r.logical_errors, 0u);
    EXPECT_EQ(r.decode_failures, 0u);
    ASSERT_EQ(r.shots.size(), 200u);
    for (const auto& s : r.shots) {
        EXPECT_EQ(s.path_graph_size, 0u);
        EXPECT_TRUE(s.decoded);
    }
}

TEST(Experiment, OracleAgreesAndThreadsDoNotMatter) {
    ExperimentConfig c;
    c.p = 5e-3;
    c.shots = 300;
    c.master_seed = 42;
    c.oracle_max_size = 10;
    ExperimentResult one = run_memory_experiment(c);
    EXPECT_GT(one.oracle_checked, 0u);
    EXPECT_EQ(one.oracle_mismatches, 0u);
    c.threads = 4;
    ExperimentResult four = run_memory_experiment(c);
    EXPECT_EQ(four.shots, one.shots);
    EXPECT_EQ(four.wmax_stats, one.wmax_stats);
    EXPECT_EQ(experiment_to_json(four).dump(), [&] {
        ExperimentResult copy = one;
        copy.config.threads = 4;
        return experiment_to_json(copy).dump();
    }());
}

TEST(Experiment, ReportProvenance) {
    ExperimentConfig c;
    c.shots = 10;
    nlohmann::json j = experiment_to_json(run_memory_experiment(c));
    EXPECT_EQ(j["schema"], kReportSchema);
    EXPECT_EQ(j["build"], build_id());
    EXPECT_EQ(j["generator"], "mt19937");
    EXPECT_EQ(j["scheme"]["kind"], "seeded-prng");
    EXPECT_EQ(j["config"]["C"], 10);
    EXPECT_EQ(j["wilson95"].size(), 2u);
}

TEST(Experiment, ShotCsvRoundTrip) {
    std::vector<ShotRecord> shots = {
        {0, 0, true, false, 0, 0, 0, -1, ""},
        {1, 6, true, true, 2, 3, 17, 1, ""},
        {2, 12, false, true, 9, 4096, 0, -1, "failed, \"quoted\"\nline"},
    };
    std::string csv = shots_to_csv(shots);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "shot,size,decoded,logical_error,attempts_used,w_max_used,base_weight,oracle,error");
    EXPECT_EQ(shots_from_csv(csv), shots);
}

TEST(WmaxScan, RecordsAndCsvRoundTrip) {
    WmaxScanConfig c;
    c.distances = {3};
    c.p = 5e-3;
    c.shots_per_d = 300;
    c.min_samples = 5;
    WmaxScanResult r = run_wmax_scan(c);
    ASSERT_FALSE(r.records.empty());
    EXPECT_EQ(r.decode_failures, 0u);
    for (size_t i = 0; i < r.records.size(); ++i) {
        const auto& rec = r.records[i];
        if (i) EXPECT_LT(r.records[i - 1].size, rec.size);
        EXPECT_GE(rec.min_w_max, 2);
        EXPECT_EQ(rec.sparse, rec.shots < c.min_samples);
        EXPECT_EQ(rec.distances, std::vector<uint32_t>{3});
        // Two vertices always isolate at the first trial.
        if (rec.size == 2) EXPECT_EQ(rec.min_w_max, 2);
    }
    EXPECT_EQ(wmax_records_from_csv(wmax_records_to_csv(r.records)), r.records);
    nlohmann::json j = wmax_scan_to_json(r);
    EXPECT_EQ(j["kind"], "wmax-scan");
    EXPECT_EQ(j["schema"], kReportSchema);
    EXPECT_EQ(j["records"].size(), r.records.size());
}

TEST(WmaxScan, MultiDistanceCsv) {
    std::vector<WmaxScanRecord> recs = {{2, 2, 100, {3, 5}, false}, {14, 4, 3, {5}, true}};
    std::string csv = wmax_records_to_csv(recs);
    EXPECT_NE(csv.find("3;5"), std::string::npos);
    EXPECT_EQ(wmax_records_from_csv(csv), recs);
}

}  // namespace
}  // namespace pmwpm
