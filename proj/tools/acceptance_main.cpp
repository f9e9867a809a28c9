// SPDX-License-Identifier: Apache-2.0
//
// otfsim: delay-Doppler and CP-OFDM link-level waveform simulation
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Runs P1..P10 and prints one PASS/FAIL line per check.

#include "otfsim/acceptance.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"otfsim acceptance checks"};
    otfsim::AcceptanceOptions opts;
    bool skip_p9 = false, skip_p10 = false;
    app.add_option("--seed", opts.seed, "base seed");
    app.add_option("--p9-frames", opts.p9_frames, "frames per operating point in P9")->check(CLI::PositiveNumber);
    app.add_flag("--skip-p9", skip_p9, "skip the relative-SE simulation");
    app.add_flag("--skip-p10", skip_p10, "skip the determinism re-runs");
    CLI11_PARSE(app, argc, argv);
    opts.run_p9 = !skip_p9;
    opts.run_p10 = !skip_p10;
    opts.on_result = [](const otfsim::CheckResult& r) { std::cout << otfsim::format_check(r) << std::endl; };

    int failed = 0;
    for (const auto& r : otfsim::run_acceptance(opts)) failed += r.pass ? 0 : 1;
    std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " FAILED") << std::endl;
    return failed == 0 ? 0 : 1;
}
