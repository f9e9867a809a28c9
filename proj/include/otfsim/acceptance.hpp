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

// Acceptance checks P1..P10, shared by the acceptance binary and the
// `validate` subcommand.

#pragma once

#include "otfsim/sweep.hpp"

#include <functional>
#include <string>
#include <vector>

namespace otfsim {

struct CheckResult {
    std::string id;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::uint64_t seed = 1;
    int p9_frames = 200;
    bool run_p9 = true;
    bool run_p10 = true;
    /// Called after each check, e.g. to stream PASS/FAIL lines.
    std::function<void(const CheckResult&)> on_result;
};

CheckResult check_p1_transforms();
CheckResult check_p2_twisted_algebra(std::uint64_t seed);
CheckResult check_p3_zak_oracle(std::uint64_t seed);
CheckResult check_p4_ofdm_oracle(std::uint64_t seed);
CheckResult check_p5_overheads();
CheckResult check_p6_pnr();
CheckResult check_p7_crystallization(std::uint64_t seed);
CheckResult check_p8_ici(std::uint64_t seed);
CheckResult check_p9_relative_se(std::uint64_t seed, int frames);
CheckResult check_p10_determinism(std::uint64_t seed);

/// Reduced operating-point spaces used by P9.
SweepConfig p9_config(std::uint64_t seed, int frames);
/// Four cells with one operating point per waveform, used by P10.
SweepConfig mini_sweep_config(std::uint64_t seed);

std::vector<CheckResult> run_acceptance(const AcceptanceOptions& opts);

/// "P3 PASS  <detail>  (1.2 s)"
std::string format_check(const CheckResult& r);

}  // namespace otfsim
