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

#ifndef PMWPM_TOOLS_ACCEPTANCE_CHECKS_H_
#define PMWPM_TOOLS_ACCEPTANCE_CHECKS_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pmwpm::acceptance {

struct Options {
    /// Reduced sample counts for `pmwpm selftest`; the full sizes are the
    /// acceptance thresholds.
    bool quick = false;
    unsigned threads = 1;
    uint64_t seed = 20240101;
    /// Criterion ids to run; empty runs all of 1..11.
    std::vector<int> only;
};

struct Outcome {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Runs the criteria in order, reporting each outcome as soon as it is known.
std::vector<Outcome> run(const Options& options, const std::function<void(const Outcome&)>& report = {});

/// "PASS [3] name: detail" / "FAIL [...]".
std::string format(const Outcome& outcome);

}  // namespace pmwpm::acceptance

#endif  // PMWPM_TOOLS_ACCEPTANCE_CHECKS_H_
