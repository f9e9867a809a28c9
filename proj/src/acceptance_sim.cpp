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

// P9 and P10 (link-level simulation) and the acceptance runner.

#include "otfsim/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

namespace otfsim {

namespace {

constexpr double kCellA_nu = 100.0, kCellA_tau = 1.15e-6;
constexpr double kCellB_nu = 1600.0, kCellB_tau = 4.7e-6;

std::string cell_summary(const CellResult& c) {
    std::string s = "SE_zak " + fmt6(c.se_zak) + ", SE_ofdm " + fmt6(c.se_ofdm);
    if (c.best_zak) {
        const auto& op = c.zak_points[*c.best_zak].op;
        s += " [zak nu_p=" + fmt6(op.nu_p / 1e3) + "k " + op.pulse.name() + " " + to_string(op.allocation) +
             " pdr=" + fmt6(op.pdr_db) + "]";
    }
    if (c.best_ofdm) {
        const auto& op = c.ofdm_points[*c.best_ofdm].op;
        s += " [ofdm " + op.scs_label() + " dmrs=" + std::to_string(op.dmrs_positions.size()) +
             " boost=" + fmt6(op.boost_db) + "]";
    }
    return s;
}

// SE_ofdm = 0 with SE_zak > 0 counts as an unbounded ratio; both zero is
// undefined and fails every comparison.
double relative_se(const CellResult& c) {
    if (c.se_ofdm > 0.0) return c.se_zak / c.se_ofdm;
    return c.se_zak > 0.0 ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
}

template <typename F>
CheckResult timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r = f();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace

SweepConfig p9_config(std::uint64_t seed, int frames) {
    SweepConfig c;
    c.nu_max_list = {kCellA_nu, kCellB_nu};
    c.tau_s_list = {kCellA_tau, kCellB_tau};
    c.n_frames = frames;
    c.base_seed = seed;
    c.zak_space.nu_p_list = {2e3, 6e3, 12e3, 24e3};
    c.zak_space.pulses = {PulseKind::GaussSinc, PulseKind::Gauss};
    c.zak_space.allocations = {Allocation::I, Allocation::IV, Allocation::V};
    c.zak_space.pdr_db_list = {-10, -5, 0};
    c.ofdm_space.dmrs_sets = {{2}, {2, 11}, {2, 7, 11}};
    c.ofdm_space.boost_db_list = {-2, 0, 2, 4, 6};
    c.validate();
    return c;
}

SweepConfig mini_sweep_config(std::uint64_t seed) {
    SweepConfig c;
    c.nu_max_list = {kCellA_nu, kCellB_nu};
    c.tau_s_list = {kCellA_tau, kCellB_tau};
    c.n_frames = 20;
    c.base_seed = seed;
    c.zak_space.nu_p_list = {12e3};
    c.zak_space.pulses = {PulseKind::GaussSinc};
    c.zak_space.allocations = {Allocation::IV};
    c.zak_space.pdr_db_list = {-5};
    c.ofdm_space.scs_options = {{15e3, false}};
    c.ofdm_space.dmrs_sets = {{2}};
    c.ofdm_space.boost_db_list = {0};
    c.validate();
    return c;
}

CheckResult check_p9_relative_se(std::uint64_t seed, int frames) {
    CheckResult r{"P9", false, "", 0.0};
    const SweepConfig cfg = p9_config(seed, frames);
    const CellResult a = run_cell(cfg, kCellA_nu, kCellA_tau);
    const CellResult b = run_cell(cfg, kCellB_nu, kCellB_tau);
    const double ra = relative_se(a), rb = relative_se(b);
    const bool pa = ra >= 0.9 && ra <= 1.3;
    const bool pb = rb >= 1.2;
    const bool pc = rb > ra;
    r.pass = pa && pb && pc && a.error.empty() && b.error.empty();
    r.detail = "(a) ratio " + fmt6(ra) + (pa ? " ok" : " out of [0.9,1.3]") + " {" + cell_summary(a) + "}; (b) ratio " +
               fmt6(rb) + (pb ? " ok" : " < 1.2") + " {" + cell_summary(b) + "}; (c) " + (pc ? "ok" : "violated");
    if (!a.error.empty()) r.detail += "; error (a): " + a.error;
    if (!b.error.empty()) r.detail += "; error (b): " + b.error;
    return r;
}

CheckResult check_p10_determinism(std::uint64_t seed) {
    CheckResult r{"P10", false, "", 0.0};
    auto closed_form = [seed] {
        std::string s;
        for (const CheckResult& c : {check_p1_transforms(), check_p2_twisted_algebra(seed), check_p3_zak_oracle(seed),
                                     check_p4_ofdm_oracle(seed), check_p5_overheads(), check_p6_pnr(),
                                     check_p7_crystallization(seed), check_p8_ici(seed)})
            s += c.id + (c.pass ? " PASS " : " FAIL ") + c.detail + "\n";
        return s;
    };
    auto mini = [seed] {
        const SweepConfig cfg = mini_sweep_config(seed);
        const auto cells = run_sweep(cfg, 1);
        std::string s = heatmap_csv(cells);
        for (const auto& c : cells) s += cell_json_text(c);
        return s;
    };
    const std::string v1 = closed_form(), v2 = closed_form();
    const std::string m1 = mini(), m2 = mini();
    r.pass = v1 == v2 && m1 == m2;
    r.detail = std::string("validate P1-P8 outputs ") + (v1 == v2 ? "identical" : "DIFFER") +
               ", 4-cell mini-sweep CSV+JSON (" + std::to_string(m1.size()) + " bytes) " +
               (m1 == m2 ? "identical" : "DIFFER");
    return r;
}

std::vector<CheckResult> run_acceptance(const AcceptanceOptions& opts) {
    std::vector<CheckResult> out;
    auto run = [&](auto&& f, const char* id) {
        CheckResult c;
        try {
            c = timed(f);
        } catch (const std::exception& e) {
            c = CheckResult{id, false, std::string("exception: ") + e.what(), 0.0};
        }
        if (opts.on_result) opts.on_result(c);
        out.push_back(std::move(c));
    };
    const std::uint64_t s = opts.seed;
    run([] { return check_p1_transforms(); }, "P1");
    run([s] { return check_p2_twisted_algebra(s); }, "P2");
    run([s] { return check_p3_zak_oracle(s); }, "P3");
    run([s] { return check_p4_ofdm_oracle(s); }, "P4");
    run([] { return check_p5_overheads(); }, "P5");
    run([] { return check_p6_pnr(); }, "P6");
    run([s] { return check_p7_crystallization(s); }, "P7");
    run([s] { return check_p8_ici(s); }, "P8");
    if (opts.run_p9) run([&] { return check_p9_relative_se(s, opts.p9_frames); }, "P9");
    if (opts.run_p10) run([s] { return check_p10_determinism(s); }, "P10");
    return out;
}

}  // namespace otfsim
