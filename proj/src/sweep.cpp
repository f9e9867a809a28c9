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

#include "otfsim/sweep.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace otfsim {

using nlohmann::json;

namespace {

PulseShape pulse_for(PulseKind k) {
    switch (k) {
        case PulseKind::Sinc: return PulseShape::sinc();
        case PulseKind::Gauss: return PulseShape::gauss();
        case PulseKind::GaussSinc: return PulseShape::gauss_sinc();
    }
    throw std::invalid_argument("unknown pulse kind");
}

bool same(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

std::string describe(const ZakOperatingPoint& op) {
    return "nu_p=" + fmt6(op.nu_p) + " pulse=" + op.pulse.name() + " alloc=" + to_string(op.allocation) +
           " pdr=" + fmt6(op.pdr_db);
}

}  // namespace

std::string fmt6(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // folds -0 into 0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

bool ZakFilter::admits(const ZakOperatingPoint& op) const {
    if (nu_p && !same(op.nu_p, *nu_p)) return false;
    if (pulse && op.pulse.kind != *pulse) return false;
    if (allocation && op.allocation != *allocation) return false;
    if (pdr_db && !same(op.pdr_db, *pdr_db)) return false;
    return true;
}

// ----- Search --------------------------------------------------------------

std::vector<ZakPointRecord> search_zak(const SweepConfig& cfg, double nu_max, double tau_s, const ZakFilter& filter,
                                       std::optional<size_t>* best) {
    const SimSettings s = cfg.sim_settings(nu_max, tau_s);
    std::vector<ZakPointRecord> out;
    double best_se = 0.0;
    if (best) best->reset();
    FrameCache cache;
    // Points sharing (pulse, nu_p) share effective channels; the cache is
    // dropped between groups to bound memory.
    for (PulseKind kind : cfg.zak_space.pulses) {
        for (double nu_p : cfg.zak_space.nu_p_list) {
            cache.clear();
            for (Allocation alloc : cfg.zak_space.allocations) {
                for (double pdr : cfg.zak_space.pdr_db_list) {
                    ZakPointRecord rec;
                    rec.op = ZakOperatingPoint{nu_p, pulse_for(kind), alloc, pdr};
                    if (!filter.admits(rec.op)) continue;
                    try {
                        build_layout(zak_dims(s, nu_p), tau_s, alloc);
                    } catch (const std::invalid_argument& e) {
                        rec.skipped = e.what();
                        rec.result.bler.assign(mcs_ladder().size(), std::nan(""));
                        out.push_back(std::move(rec));
                        continue;
                    }
                    rec.result = evaluate_zak_point(s, rec.op, &cache);
                    if (rec.result.se > best_se) {
                        best_se = rec.result.se;
                        if (best) *best = out.size();
                    }
                    out.push_back(std::move(rec));
                }
            }
        }
    }
    return out;
}

std::vector<OfdmPointRecord> search_ofdm(const SweepConfig& cfg, double nu_max, double tau_s,
                                         std::optional<size_t>* best) {
    const SimSettings s = cfg.sim_settings(nu_max, tau_s);
    std::vector<OfdmPointRecord> out;
    double best_se = 0.0;
    if (best) best->reset();
    FrameCache cache;
    for (const ScsOption& o : cfg.feasible_scs(tau_s)) {
        cache.clear();
        for (const auto& dmrs : cfg.ofdm_space.dmrs_sets) {
            for (double boost : cfg.ofdm_space.boost_db_list) {
                OfdmPointRecord rec;
                rec.op = OfdmOperatingPoint{o.scs, o.extended_cp, dmrs, boost};
                rec.result = evaluate_ofdm_point(s, rec.op, &cache);
                if (rec.result.se > best_se) {
                    best_se = rec.result.se;
                    if (best) *best = out.size();
                }
                out.push_back(std::move(rec));
            }
        }
    }
    return out;
}

CellResult run_cell(const SweepConfig& cfg, double nu_max, double tau_s) {
    CellResult c;
    c.nu_max = nu_max;
    c.tau_s = tau_s;
    try {
        if (cfg.feasible_scs(tau_s).empty()) throw std::invalid_argument("no feasible SCS option for this delay spread");
        c.zak_points = search_zak(cfg, nu_max, tau_s, ZakFilter{}, &c.best_zak);
        c.ofdm_points = search_ofdm(cfg, nu_max, tau_s, &c.best_ofdm);
        if (c.best_zak) c.se_zak = c.zak_points[*c.best_zak].result.se;
        if (c.best_ofdm) c.se_ofdm = c.ofdm_points[*c.best_ofdm].result.se;
        if (c.se_zak > 0.0 && c.se_ofdm > 0.0) c.ratio = c.se_zak / c.se_ofdm;
    } catch (const std::exception& e) {
        c.error = e.what();
    }
    return c;
}

std::vector<CellResult> run_sweep(const SweepConfig& cfg, int jobs) {
    cfg.validate();
    std::vector<std::pair<double, double>> grid;
    for (double nu : cfg.nu_max_list)
        for (double tau : cfg.tau_s_list) grid.emplace_back(nu, tau);
    std::sort(grid.begin(), grid.end());

    std::vector<CellResult> cells(grid.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next++; i < grid.size(); i = next++) cells[i] = run_cell(cfg, grid[i].first, grid[i].second);
    };
    const int n = std::clamp(jobs, 1, static_cast<int>(std::max<size_t>(grid.size(), 1)));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return cells;
}

// ----- Output --------------------------------------------------------------

std::string heatmap_csv(const std::vector<CellResult>& cells_in) {
    std::vector<const CellResult*> cells;
    for (const auto& c : cells_in) cells.push_back(&c);
    std::sort(cells.begin(), cells.end(), [](const CellResult* a, const CellResult* b) {
        return std::tie(a->nu_max, a->tau_s) < std::tie(b->nu_max, b->tau_s);
    });

    std::ostringstream os;
    os << "nu_max_hz,tau_s_us,se_zak,se_ofdm,ratio,zak_nu_p,zak_pulse,zak_alloc,zak_pdr_db,ofdm_scs,ofdm_boost_db,"
          "mcs_zak,mcs_ofdm\n";
    for (const CellResult* c : cells) {
        os << fmt6(c->nu_max) << ',' << fmt6(c->tau_s * 1e6) << ',' << fmt6(c->se_zak) << ',' << fmt6(c->se_ofdm) << ','
           << (c->ratio ? fmt6(*c->ratio) : "") << ',';
        if (c->best_zak) {
            const auto& z = c->zak_points[*c->best_zak];
            os << fmt6(z.op.nu_p) << ',' << z.op.pulse.name() << ',' << to_string(z.op.allocation) << ','
               << fmt6(z.op.pdr_db) << ',';
        } else {
            os << ",,,,";
        }
        if (c->best_ofdm) {
            const auto& o = c->ofdm_points[*c->best_ofdm];
            os << o.op.scs_label() << ',' << fmt6(o.op.boost_db) << ',';
        } else {
            os << ",,";
        }
        os << (c->best_zak ? std::to_string(*c->zak_points[*c->best_zak].result.mcs) : "") << ','
           << (c->best_ofdm ? std::to_string(*c->ofdm_points[*c->best_ofdm].result.mcs) : "") << '\n';
    }
    return os.str();
}

namespace {

json point_json(const PointResult& r) {
    json bler = json::array();
    for (double b : r.bler) bler.push_back(std::isnan(b) ? json(nullptr) : json(b));
    return json{
        {"se", r.se},
        {"mcs", r.mcs ? json(*r.mcs) : json(nullptr)},
        {"mcs_label", r.mcs ? json(mcs_ladder()[static_cast<size_t>(*r.mcs)].label()) : json(nullptr)},
        {"bler_per_mcs", bler},
        {"n_info_bits", r.n_info_bits},
        {"overhead", r.overhead},
        {"frames_simulated", r.frames_simulated},
        {"est_nmse_db", r.est_nmse_db ? json(*r.est_nmse_db) : json(nullptr)},
    };
}

json zak_op_json(const ZakOperatingPoint& op) {
    return json{{"nu_p_hz", op.nu_p}, {"pulse", op.pulse.name()}, {"allocation", to_string(op.allocation)},
                {"pdr_db", op.pdr_db}};
}

json ofdm_op_json(const OfdmOperatingPoint& op) {
    return json{{"scs", op.scs_label()}, {"dmrs_positions", op.dmrs_positions}, {"boost_db", op.boost_db}};
}

}  // namespace

std::string cell_json_text(const CellResult& c) {
    json zak = json::array();
    for (const auto& p : c.zak_points) {
        json j = zak_op_json(p.op);
        if (!p.skipped.empty())
            j["skipped"] = p.skipped;
        else
            j["result"] = point_json(p.result);
        zak.push_back(j);
    }
    json ofdm = json::array();
    for (const auto& p : c.ofdm_points) {
        json j = ofdm_op_json(p.op);
        j["result"] = point_json(p.result);
        ofdm.push_back(j);
    }
    json best_zak = nullptr, best_ofdm = nullptr;
    if (c.best_zak) {
        const auto& p = c.zak_points[*c.best_zak];
        best_zak = zak_op_json(p.op);
        best_zak["result"] = point_json(p.result);
    }
    if (c.best_ofdm) {
        const auto& p = c.ofdm_points[*c.best_ofdm];
        best_ofdm = ofdm_op_json(p.op);
        best_ofdm["result"] = point_json(p.result);
    }
    json j{
        {"nu_max_hz", c.nu_max},
        {"tau_s", c.tau_s},
        {"se_zak", c.se_zak},
        {"se_ofdm", c.se_ofdm},
        {"ratio", c.ratio ? json(*c.ratio) : json(nullptr)},
        {"best_zak", best_zak},
        {"best_ofdm", best_ofdm},
        {"crystallization_product_8_tau_numax", c.crystallization_product()},
        {"spread_product_tau_nus", c.spread_product()},
        {"zak_guard_overhead", zak_guard_overhead(c.tau_s, 1e-3)},
        {"zak_points", zak},
        {"ofdm_points", ofdm},
    };
    if (!c.error.empty()) j["error"] = c.error;
    return j.dump(2);
}

std::string cell_file_name(double nu_max, double tau_s) { return fmt6(nu_max) + "_" + fmt6(tau_s * 1e6) + ".json"; }

std::string run_meta_json_text(const SweepConfig& cfg) {
    json ladder = json::array();
    for (const auto& m : mcs_ladder())
        ladder.push_back({{"index", m.index}, {"label", m.label()}, {"info_rate", m.info_rate()}});
    json j{
        {"tool", "otfsim"},
        {"version", "1.0.0"},
        {"base_seed", cfg.base_seed},
        {"config", json::parse(config_to_json_text(cfg))},
        {"mcs_ladder", ladder},
        {"target_bler", kTargetBler},
        {"se_denominators",
         {{"zak", "B*(T+tau_s) with B=672 kHz, T=1 ms"},
          {"ofdm", "720 (48 subcarriers x 15 kHz x 1 ms resource)"},
          {"note", "the two waveforms are normalized by slightly different resource areas"}}},
        {"fec", "K=7 (133,171) convolutional code, punctured, soft Viterbi; pseudo-random bit interleaver"},
    };
    return j.dump(2);
}

void write_sweep_outputs(const std::filesystem::path& dir, const SweepConfig& cfg, const std::vector<CellResult>& cells) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "cells");
    auto write = [](const fs::path& p, const std::string& text) {
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + p.string());
        f << text;
        if (!text.empty() && text.back() != '\n') f << '\n';
    };
    write(dir / "heatmap.csv", heatmap_csv(cells));
    for (const auto& c : cells) write(dir / "cells" / cell_file_name(c.nu_max, c.tau_s), cell_json_text(c));
    write(dir / "run_meta.json", run_meta_json_text(cfg));
}

// ----- Studies -------------------------------------------------------------

std::string to_string(StudyKind k) {
    switch (k) {
        case StudyKind::SeVsTau: return "se_vs_tau";
        case StudyKind::SeVsNuMax: return "se_vs_numax";
        case StudyKind::SeVsAllocation: return "se_vs_alloc";
        case StudyKind::SeVsPdr: return "se_vs_pdr";
    }
    return "?";
}

StudyKind study_kind_from_string(const std::string& s) {
    for (StudyKind k : {StudyKind::SeVsTau, StudyKind::SeVsNuMax, StudyKind::SeVsAllocation, StudyKind::SeVsPdr})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown study '" + s + "'");
}

StudyResult run_zak_study(const SweepConfig& cfg, StudyKind kind) {
    cfg.validate();
    StudyResult r;
    r.kind = kind;

    auto best_point = [&](double nu_max, double tau_s, const ZakFilter& f, double x, std::string x_label) {
        std::optional<size_t> best;
        const auto recs = search_zak(cfg, nu_max, tau_s, f, &best);
        StudyPoint p;
        p.x = x;
        p.x_label = std::move(x_label);
        if (best) {
            p.se = recs[*best].result.se;
            p.mcs = recs[*best].result.mcs;
            p.best_op = describe(recs[*best].op);
        }
        return p;
    };

    constexpr double kLowMobility = 100.0;
    constexpr double kSmallCell = 1.15e-6;
    switch (kind) {
        case StudyKind::SeVsTau:
            r.fixed = "nu_max=100 Hz";
            for (double nu_p : cfg.zak_space.nu_p_list) {
                StudySeries s{"nu_p=" + fmt6(nu_p / 1e3) + " kHz", {}};
                for (double tau : cfg.tau_s_list)
                    s.points.push_back(best_point(kLowMobility, tau, ZakFilter{nu_p, {}, {}, {}}, tau, fmt6(tau * 1e6) + " us"));
                r.series.push_back(std::move(s));
            }
            break;
        case StudyKind::SeVsNuMax:
            r.fixed = "tau_s=1.15 us";
            for (double nu_p : cfg.zak_space.nu_p_list) {
                StudySeries s{"nu_p=" + fmt6(nu_p / 1e3) + " kHz", {}};
                for (double nu : cfg.nu_max_list)
                    s.points.push_back(best_point(nu, kSmallCell, ZakFilter{nu_p, {}, {}, {}}, nu, fmt6(nu) + " Hz"));
                r.series.push_back(std::move(s));
            }
            break;
        case StudyKind::SeVsAllocation:
        case StudyKind::SeVsPdr: {
            r.fixed = "nu_max=100 Hz";
            const std::vector<double> taus{cfg.tau_s_list.front(), cfg.tau_s_list.back()};
            for (double tau : taus) {
                StudySeries s{"tau_s=" + fmt6(tau * 1e6) + " us", {}};
                if (kind == StudyKind::SeVsAllocation) {
                    for (Allocation a : cfg.zak_space.allocations)
                        s.points.push_back(best_point(kLowMobility, tau, ZakFilter{{}, {}, a, {}},
                                                      static_cast<double>(static_cast<int>(a)), to_string(a)));
                } else {
                    for (double pdr : cfg.zak_space.pdr_db_list)
                        s.points.push_back(best_point(kLowMobility, tau, ZakFilter{{}, {}, {}, pdr}, pdr, fmt6(pdr) + " dB"));
                }
                r.series.push_back(std::move(s));
                if (taus[0] == taus[1]) break;
            }
            break;
        }
    }
    return r;
}

std::string study_json_text(const StudyResult& r) {
    json series = json::array();
    for (const auto& s : r.series) {
        json pts = json::array();
        for (const auto& p : s.points)
            pts.push_back({{"x", p.x},
                           {"x_label", p.x_label},
                           {"se", p.se},
                           {"mcs", p.mcs ? json(*p.mcs) : json(nullptr)},
                           {"best_op", p.best_op}});
        series.push_back({{"name", s.name}, {"points", pts}});
    }
    return json{{"study", to_string(r.kind)}, {"fixed", r.fixed}, {"series", series}}.dump(2);
}

}  // namespace otfsim
