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

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace otfsim {

using nlohmann::json;

// ----- SCS options ---------------------------------------------------------

std::string ScsOption::label() const {
    std::string s = std::to_string(static_cast<int>(std::lround(scs / 1e3)));
    return extended_cp ? s + "ext" : s;
}

ScsOption ScsOption::parse(const std::string& s) {
    ScsOption o;
    std::string num = s;
    if (num.size() > 3 && num.compare(num.size() - 3, 3, "ext") == 0) {
        o.extended_cp = true;
        num.resize(num.size() - 3);
    }
    size_t used = 0;
    double khz = 0.0;
    try {
        khz = std::stod(num, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != num.size() || khz <= 0.0) throw std::invalid_argument("invalid SCS option '" + s + "'");
    o.scs = khz * 1e3;
    return o;
}

bool operator==(const ScsOption& a, const ScsOption& b) {
    return std::abs(a.scs - b.scs) < 1e-6 && a.extended_cp == b.extended_cp;
}

// ----- Defaults and validation ---------------------------------------------

std::vector<FeasibilityRow> SweepConfig::default_feasibility() {
    const ScsOption s15{15e3, false}, s30{30e3, false}, s60{60e3, false}, s60e{60e3, true};
    return {
        {0.0, {s15, s30, s60}},
        {1.15e-6, {s15, s30, s60}},
        {2.3e-6, {s15, s30}},
        {4.13e-6, {s15, s60e}},
        {4.7e-6, {s15}},
    };
}

void SweepConfig::validate() const {
    auto need = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("sweep config: ") + what);
    };
    need(!nu_max_list.empty(), "nu_max_list is empty");
    need(!tau_s_list.empty(), "tau_s_list is empty");
    for (double v : nu_max_list) need(v >= 0.0 && std::isfinite(v), "nu_max must be finite and >= 0");
    for (double v : tau_s_list) need(v >= 0.0 && v < 1e-4, "tau_s must lie in [0, 100 us)");
    need(std::isfinite(snr_db), "snr_db must be finite");
    need(n_frames > 0, "n_frames must be positive");
    need(max_errors > 0, "max_errors must be positive");
    need(!zak_space.nu_p_list.empty(), "zak nu_p list is empty");
    need(!zak_space.pulses.empty(), "zak pulse list is empty");
    need(!zak_space.allocations.empty(), "zak allocation list is empty");
    need(!zak_space.pdr_db_list.empty(), "zak pdr list is empty");
    for (double v : zak_space.nu_p_list) need(v > 0.0, "nu_p must be positive");
    for (double v : zak_space.pdr_db_list) need(std::isfinite(v), "pdr must be finite");
    need(!ofdm_space.scs_options.empty(), "ofdm scs list is empty");
    need(!ofdm_space.dmrs_sets.empty(), "ofdm dmrs set list is empty");
    need(!ofdm_space.boost_db_list.empty(), "ofdm boost list is empty");
    for (const auto& o : ofdm_space.scs_options) OfdmNumerology::standard(o.scs, o.extended_cp).validate();
    for (const auto& set : ofdm_space.dmrs_sets) {
        need(!set.empty(), "empty dmrs position set");
        for (int p : set) need(p >= 0 && p < 12, "dmrs position outside the shortest slot");
    }
    need(zak_receiver.bandwidth > 0.0 && zak_receiver.duration > 0.0, "zak bandwidth and duration must be positive");
    need(zak_receiver.oversampling >= 1, "zak oversampling must be >= 1");
    need(zak_receiver.lsmr.max_iter > 0, "lsmr max_iter must be positive");
    for (double tau : tau_s_list)
        need(!feasible_scs(tau).empty(), "a delay spread admits no configured SCS option");
}

std::vector<ScsOption> SweepConfig::feasible_scs(double tau_s) const {
    const FeasibilityRow* row = nullptr;
    for (const auto& r : ofdm_feasibility)
        if (std::abs(r.tau_s - tau_s) < 1e-9) row = &r;
    std::vector<ScsOption> out;
    for (const auto& o : ofdm_space.scs_options) {
        bool ok = false;
        if (row) {
            for (const auto& a : row->allowed) ok = ok || a == o;
        } else {
            ok = OfdmNumerology::standard(o.scs, o.extended_cp).t_cp >= tau_s - 1e-12;
        }
        if (ok) out.push_back(o);
    }
    return out;
}

SimSettings SweepConfig::sim_settings(double nu_max, double tau_s) const {
    SimSettings s;
    s.snr_db = snr_db;
    s.max_frames = n_frames;
    s.max_errors = max_errors;
    s.base_seed = base_seed;
    s.nu_max = nu_max;
    s.tau_s = tau_s;
    s.zak = zak_receiver;
    return s;
}

// ----- JSON ----------------------------------------------------------------

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

json to_json(const SweepConfig& c) {
    json zs;
    zs["nu_p_hz"] = c.zak_space.nu_p_list;
    json pulses = json::array();
    for (auto p : c.zak_space.pulses) pulses.push_back(to_string(p));
    zs["pulses"] = pulses;
    json allocs = json::array();
    for (auto a : c.zak_space.allocations) allocs.push_back(to_string(a));
    zs["allocations"] = allocs;
    zs["pdr_db"] = c.zak_space.pdr_db_list;

    json os;
    json scs = json::array();
    for (const auto& o : c.ofdm_space.scs_options) scs.push_back(o.label());
    os["scs"] = scs;
    os["dmrs_sets"] = c.ofdm_space.dmrs_sets;
    os["boost_db"] = c.ofdm_space.boost_db_list;

    json feas = json::array();
    for (const auto& r : c.ofdm_feasibility) {
        json allowed = json::array();
        for (const auto& o : r.allowed) allowed.push_back(o.label());
        feas.push_back({{"tau_s", r.tau_s}, {"scs", allowed}});
    }

    const auto& zr = c.zak_receiver;
    json rx = {
        {"bandwidth_hz", zr.bandwidth},
        {"duration_s", zr.duration},
        {"oversampling", zr.oversampling},
        {"acquisition",
         {{"threshold", zr.acquisition.threshold},
          {"delay_margin", zr.acquisition.delay_margin},
          {"doppler_margin", zr.acquisition.doppler_margin}}},
        {"lsmr", {{"max_iter", zr.lsmr.max_iter}, {"atol", zr.lsmr.atol}, {"btol", zr.lsmr.btol}, {"conlim", zr.lsmr.conlim}}},
    };

    return json{
        {"nu_max_hz", c.nu_max_list},
        {"tau_s", c.tau_s_list},
        {"snr_db", c.snr_db},
        {"n_frames", c.n_frames},
        {"max_errors", c.max_errors},
        {"base_seed", c.base_seed},
        {"zak_space", zs},
        {"ofdm_space", os},
        {"ofdm_feasibility", feas},
        {"zak_receiver", rx},
    };
}

SweepConfig from_json(const json& j) {
    static const char* kKnown[] = {"nu_max_hz", "tau_s",     "snr_db",     "n_frames",         "max_errors",
                                   "base_seed", "zak_space", "ofdm_space", "ofdm_feasibility", "zak_receiver"};
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : kKnown) ok = ok || key == k;
        if (!ok) throw std::invalid_argument("sweep config: unknown key '" + key + "'");
    }

    SweepConfig c;
    read_opt(j, "nu_max_hz", c.nu_max_list);
    read_opt(j, "tau_s", c.tau_s_list);
    read_opt(j, "snr_db", c.snr_db);
    read_opt(j, "n_frames", c.n_frames);
    read_opt(j, "max_errors", c.max_errors);
    read_opt(j, "base_seed", c.base_seed);

    if (j.contains("zak_space")) {
        const json& zs = j.at("zak_space");
        read_opt(zs, "nu_p_hz", c.zak_space.nu_p_list);
        read_opt(zs, "pdr_db", c.zak_space.pdr_db_list);
        if (zs.contains("pulses")) {
            c.zak_space.pulses.clear();
            for (const auto& p : zs.at("pulses")) c.zak_space.pulses.push_back(pulse_kind_from_string(p.get<std::string>()));
        }
        if (zs.contains("allocations")) {
            c.zak_space.allocations.clear();
            for (const auto& a : zs.at("allocations"))
                c.zak_space.allocations.push_back(allocation_from_string(a.get<std::string>()));
        }
    }
    if (j.contains("ofdm_space")) {
        const json& os = j.at("ofdm_space");
        if (os.contains("scs")) {
            c.ofdm_space.scs_options.clear();
            for (const auto& s : os.at("scs")) c.ofdm_space.scs_options.push_back(ScsOption::parse(s.get<std::string>()));
        }
        read_opt(os, "dmrs_sets", c.ofdm_space.dmrs_sets);
        read_opt(os, "boost_db", c.ofdm_space.boost_db_list);
    }
    if (j.contains("ofdm_feasibility")) {
        c.ofdm_feasibility.clear();
        for (const auto& r : j.at("ofdm_feasibility")) {
            FeasibilityRow row;
            row.tau_s = r.at("tau_s").get<double>();
            for (const auto& s : r.at("scs")) row.allowed.push_back(ScsOption::parse(s.get<std::string>()));
            c.ofdm_feasibility.push_back(std::move(row));
        }
    }
    if (j.contains("zak_receiver")) {
        const json& rx = j.at("zak_receiver");
        auto& zr = c.zak_receiver;
        read_opt(rx, "bandwidth_hz", zr.bandwidth);
        read_opt(rx, "duration_s", zr.duration);
        read_opt(rx, "oversampling", zr.oversampling);
        if (rx.contains("acquisition")) {
            const json& a = rx.at("acquisition");
            read_opt(a, "threshold", zr.acquisition.threshold);
            read_opt(a, "delay_margin", zr.acquisition.delay_margin);
            read_opt(a, "doppler_margin", zr.acquisition.doppler_margin);
        }
        if (rx.contains("lsmr")) {
            const json& l = rx.at("lsmr");
            read_opt(l, "max_iter", zr.lsmr.max_iter);
            read_opt(l, "atol", zr.lsmr.atol);
            read_opt(l, "btol", zr.lsmr.btol);
            read_opt(l, "conlim", zr.lsmr.conlim);
        }
    }
    c.validate();
    return c;
}

}  // namespace

SweepConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("sweep config: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("sweep config: top level must be an object");
    try {
        return from_json(j);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("sweep config: ") + e.what());
    }
}

SweepConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

std::string config_to_json_text(const SweepConfig& cfg) { return to_json(cfg).dump(2); }

}  // namespace otfsim
