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

#include "otfsim/acceptance.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace otfsim;

namespace {

struct GlobalFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "otfsim_out";
    std::optional<int> frames;
    int jobs = 1;
};

SweepConfig resolve_config(const GlobalFlags& g) {
    SweepConfig c = g.config.empty() ? SweepConfig{} : load_config(g.config);
    if (g.seed) c.base_seed = *g.seed;
    if (g.frames) c.n_frames = *g.frames;
    c.validate();
    return c;
}

void write_text(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text << '\n';
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= s.size()) {
        const size_t end = std::min(s.find(',', pos), s.size());
        const std::string item = s.substr(pos, end - pos);
        size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (item.empty() || used != item.size()) throw std::invalid_argument("invalid number '" + item + "' in list");
        out.push_back(v);
        pos = end + 1;
    }
    return out;
}

int cmd_sweep(const GlobalFlags& g) {
    const SweepConfig cfg = resolve_config(g);
    const auto cells = run_sweep(cfg, g.jobs);
    write_sweep_outputs(g.out, cfg, cells);
    std::cout << heatmap_csv(cells);
    int failed = 0;
    for (const auto& c : cells)
        if (!c.error.empty()) {
            std::cerr << "cell " << fmt6(c.nu_max) << " Hz, " << fmt6(c.tau_s * 1e6) << " us: " << c.error << "\n";
            ++failed;
        }
    return failed == 0 ? 0 : 3;
}

int cmd_cell(const GlobalFlags& g, double nu_max, double tau_s) {
    SweepConfig cfg = resolve_config(g);
    cfg.nu_max_list = {nu_max};
    cfg.tau_s_list = {tau_s};
    cfg.validate();
    const CellResult c = run_cell(cfg, nu_max, tau_s);
    write_text(fs::path(g.out) / "cells" / cell_file_name(nu_max, tau_s), cell_json_text(c));
    std::cout << heatmap_csv({c});
    if (!c.error.empty()) {
        std::cerr << c.error << "\n";
        return 3;
    }
    return 0;
}

int cmd_study(const GlobalFlags& g, const std::string& kind) {
    const SweepConfig cfg = resolve_config(g);
    std::vector<StudyKind> kinds;
    if (kind == "all")
        kinds = {StudyKind::SeVsTau, StudyKind::SeVsNuMax, StudyKind::SeVsAllocation, StudyKind::SeVsPdr};
    else
        kinds = {study_kind_from_string(kind)};
    for (StudyKind k : kinds) {
        const StudyResult r = run_zak_study(cfg, k);
        const fs::path p = fs::path(g.out) / "studies" / (to_string(k) + ".json");
        write_text(p, study_json_text(r));
        std::cout << to_string(k) << " -> " << p.string() << "\n";
        for (const auto& s : r.series) {
            std::cout << "  " << s.name << ":";
            for (const auto& pt : s.points) std::cout << " " << pt.x_label << "=" << fmt6(pt.se);
            std::cout << "\n";
        }
    }
    return 0;
}

int cmd_validate(const GlobalFlags& g, bool skip_p9, bool skip_p10) {
    AcceptanceOptions opts;
    if (g.seed) opts.seed = *g.seed;
    if (g.frames) opts.p9_frames = *g.frames;
    opts.run_p9 = !skip_p9;
    opts.run_p10 = !skip_p10;
    opts.on_result = [](const CheckResult& r) { std::cout << format_check(r) << std::endl; };
    int failed = 0;
    for (const auto& r : run_acceptance(opts)) failed += r.pass ? 0 : 1;
    return failed == 0 ? 0 : 1;
}

int cmd_overheads(const std::string& waveform, double tau_s, const std::string& nu_s_list, double nu_p) {
    if (waveform == "ofdm") {
        std::printf("nu_s_hz,scs_khz,n_dmrs,cp_pct,pilot_pct,total_pct\n");
        for (double nu_s : parse_list(nu_s_list)) {
            const OverheadPolicyPoint p = ofdm_overhead_policy(tau_s, nu_s);
            std::printf("%s,%s,%d,%.2f,%.2f,%.2f\n", fmt6(nu_s).c_str(), fmt6(p.scs / 1e3).c_str(), p.n_dmrs,
                        100.0 * p.overheads.cp_fraction, 100.0 * p.overheads.pilot_fraction,
                        100.0 * p.overheads.total_fraction);
        }
        return 0;
    }
    if (waveform == "zak") {
        if (nu_p <= 0.0) throw std::invalid_argument("--nu-p must be positive");
        const double tau_p = 1.0 / nu_p;
        std::printf("tau_s_us,nu_p_hz,tau_p_us,strip_pct,guard_pct\n");
        std::printf("%s,%s,%s,%.2f,%.2f\n", fmt6(tau_s * 1e6).c_str(), fmt6(nu_p).c_str(), fmt6(tau_p * 1e6).c_str(),
                    100.0 * zak_strip_overhead(tau_s, tau_p), 100.0 * zak_guard_overhead(tau_s, 1e-3));
        return 0;
    }
    throw std::invalid_argument("--waveform must be ofdm or zak");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"otfsim: Zak-OTFS and CP-OFDM link-level simulation"};
    app.require_subcommand(1);
    GlobalFlags g;
    app.add_option("--config", g.config, "sweep configuration (JSON)")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "base seed");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--frames", g.frames, "frames per operating point")->check(CLI::PositiveNumber);
    app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);

    auto* sweep = app.add_subcommand("sweep", "full (nu_max, tau_s) heatmap");

    double nu_max = 0.0, tau_s = 0.0;
    auto* cell = app.add_subcommand("cell", "one heatmap cell");
    cell->add_option("--nu-max", nu_max, "maximum Doppler [Hz]")->required();
    cell->add_option("--tau-s", tau_s, "delay spread [s]")->required();

    std::string kind = "all";
    auto* study = app.add_subcommand("zak-op-study", "single-axis Zak operating-point studies");
    study->add_option("--kind", kind, "se_vs_tau, se_vs_numax, se_vs_alloc, se_vs_pdr or all");

    bool skip_p9 = false, skip_p10 = false;
    auto* validate = app.add_subcommand("validate", "acceptance checks P1..P10");
    validate->add_flag("--skip-p9", skip_p9, "skip the relative-SE simulation");
    validate->add_flag("--skip-p10", skip_p10, "skip the determinism re-runs");

    std::string waveform = "ofdm", nu_s_list = "1e3,2e3,3e3,4e3";
    double ov_tau = 1.15e-6, nu_p = 5e3;
    auto* overheads = app.add_subcommand("overheads", "CP+pilot (OFDM) or strip (Zak) overheads");
    overheads->add_option("--waveform", waveform, "ofdm or zak");
    overheads->add_option("--tau-s", ov_tau, "delay spread [s]");
    overheads->add_option("--nu-s-list", nu_s_list, "comma-separated Doppler spreads [Hz] (ofdm)");
    overheads->add_option("--nu-p", nu_p, "Doppler period [Hz] (zak)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*sweep) return cmd_sweep(g);
        if (*cell) return cmd_cell(g, nu_max, tau_s);
        if (*study) return cmd_study(g, kind);
        if (*validate) return cmd_validate(g, skip_p9, skip_p10);
        if (*overheads) return cmd_overheads(waveform, ov_tau, nu_s_list, nu_p);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
