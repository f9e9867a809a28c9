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

#include "otfsim/zak_modem.hpp"

#include <cmath>
#include <stdexcept>

namespace otfsim {

std::string to_string(Allocation a) {
    static const char* names[] = {"I", "II", "III", "IV", "V"};
    const int n = static_cast<int>(a);
    if (n < 1 || n > 5) throw std::invalid_argument("invalid allocation");
    return names[n - 1];
}

Allocation allocation_from_string(const std::string& name) {
    static const char* names[] = {"I", "II", "III", "IV", "V"};
    for (int i = 0; i < 5; ++i)
        if (name == names[i] || name == std::to_string(i + 1)) return static_cast<Allocation>(i + 1);
    throw std::invalid_argument("unknown pilot allocation: " + name);
}

FrameLayout build_layout(const FrameDims& dims, double tau_s, Allocation alloc,
                         std::optional<std::pair<int, int>> pilot_loc) {
    dims.validate();
    const int n = static_cast<int>(alloc);
    if (n < 1 || n > 5) throw std::invalid_argument("build_layout: allocation must be I..V");
    if (tau_s < 0.0) throw std::invalid_argument("build_layout: negative delay spread");

    FrameLayout lay;
    lay.dims = dims;
    lay.allocation = alloc;
    lay.k_max = static_cast<int>(std::ceil(dims.bandwidth * tau_s - 1e-9));
    lay.strip_width = 2 * lay.k_max + 2 * (5 - n) + 1;
    if (lay.strip_width >= dims.M)
        throw std::invalid_argument("build_layout: pilot and guard region (" + std::to_string(lay.strip_width) +
                                    " delay bins) does not fit in M=" + std::to_string(dims.M));

    if (pilot_loc) {
        lay.k_p = static_cast<int>(pos_mod(pilot_loc->first, dims.M));
        lay.l_p = static_cast<int>(pos_mod(pilot_loc->second, dims.N));
    } else {
        lay.k_p = dims.M / 2;
        lay.l_p = 0;
    }
    const int half = lay.k_max + (5 - n);
    lay.strip_begin = static_cast<int>(pos_mod(lay.k_p - half, dims.M));

    const int M = dims.M, N = dims.N;
    lay.roles.assign(static_cast<size_t>(M) * N, CellRole::Data);
    for (int c = -half; c <= half; ++c) {
        const int k = static_cast<int>(pos_mod(lay.k_p + c, M));
        const CellRole r = (c >= 0 && c <= lay.k_max) ? CellRole::Pilot : CellRole::Guard;
        for (int l = 0; l < N; ++l) lay.roles[static_cast<size_t>(k) * N + l] = r;
    }
    for (int i = 0; i < M * N; ++i) {
        switch (lay.roles[static_cast<size_t>(i)]) {
            case CellRole::Data: lay.data_cells.push_back(i); break;
            case CellRole::Guard: lay.guard_cells.push_back(i); break;
            case CellRole::Pilot: lay.pilot_cells.push_back(i); break;
        }
    }
    return lay;
}

bool check_crystallization(const FrameDims& dims, double tau_s, double nu_s) {
    return dims.tau_p() > tau_s && dims.nu_p() > nu_s;
}

double pilot_energy(const FrameLayout& layout, double pdr_db, double data_power) {
    if (std::isinf(pdr_db) && pdr_db < 0) return 0.0;
    return data_power * std::pow(10.0, pdr_db / 10.0) * layout.data_count();
}

QuasiPeriodicGrid make_pilot_grid(const FrameLayout& layout, double pdr_db, double data_power) {
    QuasiPeriodicGrid g(layout.dims);
    const double e = pilot_energy(layout, pdr_db, data_power);
    if (e > 0.0) g(layout.k_p, layout.l_p) = std::sqrt(e);
    return g;
}

QuasiPeriodicGrid place_data(const FrameLayout& layout, std::span<const cplx> symbols) {
    if (symbols.size() != layout.data_cells.size())
        throw std::invalid_argument("place_data: symbol count does not match data region");
    QuasiPeriodicGrid g(layout.dims);
    auto cells = g.cells();
    for (size_t i = 0; i < symbols.size(); ++i) cells[static_cast<size_t>(layout.data_cells[i])] = symbols[i];
    return g;
}

CVec extract_data(const FrameLayout& layout, const QuasiPeriodicGrid& grid) {
    CVec out(layout.data_cells.size());
    auto cells = grid.cells();
    for (size_t i = 0; i < out.size(); ++i) out[i] = cells[static_cast<size_t>(layout.data_cells[i])];
    return out;
}

double effective_pnr_db(double pdr_db, double snr_db, double tau_p, double tau_s) {
    if (!(tau_s > 0.0) || !(tau_p > 0.0)) throw std::invalid_argument("effective_pnr_db: spreads must be positive");
    return pdr_db + snr_db + 10.0 * std::log10(tau_p / (2.0 * tau_s));
}

double zak_strip_overhead(double tau_s, double tau_p) {
    if (!(tau_p > 0.0)) throw std::invalid_argument("zak_strip_overhead: tau_p must be positive");
    return 2.0 * tau_s / tau_p;
}

}  // namespace otfsim
