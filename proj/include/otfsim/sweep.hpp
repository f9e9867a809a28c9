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

// Sweep configuration, per-cell operating-point search and result files.

#pragma once

#include "otfsim/link_sim.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace otfsim {

struct ZakSearchSpace {
    std::vector<double> nu_p_list{1e3, 2e3, 4e3, 6e3, 8e3, 12e3, 14e3, 24e3};
    std::vector<PulseKind> pulses{PulseKind::Sinc, PulseKind::Gauss, PulseKind::GaussSinc};
    std::vector<Allocation> allocations{Allocation::I, Allocation::II, Allocation::III, Allocation::IV, Allocation::V};
    std::vector<double> pdr_db_list{-15, -10, -5, 0, 5, 10, 15};
};

/// An SCS option is a subcarrier spacing plus CP flavour, written "15",
/// "30", "60" or "60ext".
struct ScsOption {
    double scs = 15e3;
    bool extended_cp = false;

    std::string label() const;
    static ScsOption parse(const std::string& s);
};

bool operator==(const ScsOption& a, const ScsOption& b);

struct OfdmSearchSpace {
    std::vector<ScsOption> scs_options{{15e3, false}, {30e3, false}, {60e3, false}, {60e3, true}};
    std::vector<std::vector<int>> dmrs_sets{{2}, {2, 11}, {2, 7, 11}, {2, 5, 8, 11}};
    std::vector<double> boost_db_list{-6, -4, -2, 0, 2, 4, 6};
};

/// Admissible SCS options for one delay spread.
struct FeasibilityRow {
    double tau_s = 0.0;
    std::vector<ScsOption> allowed;
};

struct SweepConfig {
    std::vector<double> nu_max_list{0, 100, 400, 800, 1200, 1600, 2000};
    std::vector<double> tau_s_list{0, 1.15e-6, 2.3e-6, 4.13e-6, 4.7e-6};
    double snr_db = 12.0;
    int n_frames = 200;
    int max_errors = 20;
    std::uint64_t base_seed = 1;
    ZakSearchSpace zak_space;
    OfdmSearchSpace ofdm_space;
    std::vector<FeasibilityRow> ofdm_feasibility = default_feasibility();
    ZakReceiverSettings zak_receiver;

    static std::vector<FeasibilityRow> default_feasibility();

    /// Throws std::invalid_argument on empty lists or out-of-range values.
    void validate() const;

    /// SCS options searched at tau_s: the configured options restricted to the
    /// feasibility row for tau_s, or to options whose CP covers tau_s when no
    /// row matches.
    std::vector<ScsOption> feasible_scs(double tau_s) const;

    SimSettings sim_settings(double nu_max, double tau_s) const;
};

SweepConfig load_config(const std::filesystem::path& path);
SweepConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const SweepConfig& cfg);

struct ZakPointRecord {
    ZakOperatingPoint op;
    PointResult result;
    std::string skipped;  // reason when the point is infeasible
};

struct OfdmPointRecord {
    OfdmOperatingPoint op;
    PointResult result;
};

struct CellResult {
    double nu_max = 0.0;
    double tau_s = 0.0;
    std::optional<size_t> best_zak;   // index into zak_points
    std::optional<size_t> best_ofdm;  // index into ofdm_points
    double se_zak = 0.0;
    double se_ofdm = 0.0;
    std::optional<double> ratio;  // only when both SEs are positive
    std::vector<ZakPointRecord> zak_points;
    std::vector<OfdmPointRecord> ofdm_points;
    std::string error;

    double crystallization_product() const { return 8.0 * tau_s * nu_max; }
    double spread_product() const { return tau_s * 2.0 * nu_max; }
};

/// Restricts the search, used by the single-axis studies.
struct ZakFilter {
    std::optional<double> nu_p;
    std::optional<PulseKind> pulse;
    std::optional<Allocation> allocation;
    std::optional<double> pdr_db;

    bool admits(const ZakOperatingPoint& op) const;
};

CellResult run_cell(const SweepConfig& cfg, double nu_max, double tau_s);

/// Best Zak operating point at one cell under a filter; returns the records of
/// all evaluated points and the index of the best (none if all SEs are zero).
std::vector<ZakPointRecord> search_zak(const SweepConfig& cfg, double nu_max, double tau_s,
                                       const ZakFilter& filter, std::optional<size_t>* best);
std::vector<OfdmPointRecord> search_ofdm(const SweepConfig& cfg, double nu_max, double tau_s,
                                         std::optional<size_t>* best);

/// All cells; jobs > 1 runs cells on worker threads. Rows come back sorted by
/// (nu_max, tau_s).
std::vector<CellResult> run_sweep(const SweepConfig& cfg, int jobs = 1);

// ----- Output --------------------------------------------------------------

std::string heatmap_csv(const std::vector<CellResult>& cells);
std::string cell_json_text(const CellResult& cell);
std::string cell_file_name(double nu_max, double tau_s);
std::string run_meta_json_text(const SweepConfig& cfg);

/// heatmap.csv, cells/<nu>_<tau>.json and run_meta.json under dir.
void write_sweep_outputs(const std::filesystem::path& dir, const SweepConfig& cfg,
                         const std::vector<CellResult>& cells);

/// "%.6g" formatting used by every numeric field in the outputs.
std::string fmt6(double v);

// ----- Single-axis Zak studies ---------------------------------------------

enum class StudyKind { SeVsTau, SeVsNuMax, SeVsAllocation, SeVsPdr };

std::string to_string(StudyKind k);
StudyKind study_kind_from_string(const std::string& s);

struct StudyPoint {
    double x = 0.0;
    std::string x_label;
    double se = 0.0;
    std::optional<int> mcs;
    std::string best_op;
};

struct StudySeries {
    std::string name;
    std::vector<StudyPoint> points;
};

struct StudyResult {
    StudyKind kind = StudyKind::SeVsTau;
    std::string fixed;
    std::vector<StudySeries> series;
};

/// SE vs tau_s at nu_max = 100 Hz and SE vs nu_max at tau_s = 1.15 us, one
/// series per nu_p; SE vs allocation and vs PDR at nu_max = 100 Hz for the
/// first and last configured delay spreads, one series per tau_s. Each point
/// is optimized over the remaining configured parameters.
StudyResult run_zak_study(const SweepConfig& cfg, StudyKind kind);
std::string study_json_text(const StudyResult& r);

}  // namespace otfsim
