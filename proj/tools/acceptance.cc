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

// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <iostream>

#include <CLI11.hpp>

#include "acceptance_checks.h"

int main(int argc, char** argv) {
    CLI::App app{"Acceptance suite"};
    pmwpm::acceptance::Options opt;
    app.add_flag("--quick", opt.quick, "Reduced sample counts");
    app.add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", opt.seed, "Master seed");
    app.add_option("--only", opt.only, "Criterion ids")->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    bool ok = true;
    pmwpm::acceptance::run(opt, [&](const pmwpm::acceptance::Outcome& o) {
        std::cout << pmwpm::acceptance::format(o) << std::endl;
        ok = ok && o.pass;
    });
    return ok ? 0 : 1;
}
