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

// CP-OFDM transceiver over one slot.
//
// Subcarrier k sits at k * scs, k = 0..n_subcarriers-1. The slot starts with
// the cyclic prefix of symbol 0 at t = 0; the body of symbol j starts at t_j.
// The cyclic prefix is quantized to whole samples at the simulation rate
// Q * n_subcarriers * scs (rounded up), and that effective duration is what
// the time-domain chain and the symbol start times use. Sample n of the slot
// represents the cell centre t = (n + 1/2) / fs, so the receiver DFT is a
// midpoint-rule evaluation of the symbol integral.

#pragma once

#include "otfsim/channel_model.hpp"
#include "otfsim/dd_core.hpp"

#include <vector>

namespace otfsim {

struct OfdmNumerology {
    double scs = 15e3;  // [Hz]
    int n_subcarriers = 48;
    int n_symbols = 14;
    double t_cp = 4.7e-6;  // declared CP duration [s]
    bool extended_cp = false;
    int oversampling = 4;

    /// Normal CP: 4.7 us at 15 kHz, halved per doubling, 14 symbols.
    /// Extended CP: 12 symbols filling the nominal slot of 1 ms * 15 kHz / scs.
    static OfdmNumerology standard(double scs, bool extended = false, int oversampling = 4);

    double symbol_duration() const { return 1.0 / scs; }
    int fft_size() const { return oversampling * n_subcarriers; }
    double sample_rate() const { return fft_size() * scs; }
    double bandwidth() const { return n_subcarriers * scs; }
    int cp_samples() const;
    double effective_cp() const { return cp_samples() / sample_rate(); }
    int samples_per_symbol() const { return fft_size() + cp_samples(); }
    int slot_samples() const { return n_symbols * samples_per_symbol(); }
    /// Start time of the body (after the CP) of symbol j.
    double symbol_start_time(int j) const;
    /// n_symbols * (T + t_cp) with the declared CP.
    double slot_duration() const { return n_symbols * (symbol_duration() + t_cp); }
    int resource_elements() const { return n_symbols * n_subcarriers; }

    void validate() const;
};

/// n_symbols x n_subcarriers resource grid, symbol-major.
struct OfdmGrid {
    int n_symbols = 0;
    int n_subcarriers = 0;
    CVec re;

    OfdmGrid() = default;
    OfdmGrid(int n_sym, int n_sc) : n_symbols(n_sym), n_subcarriers(n_sc), re(static_cast<size_t>(n_sym) * n_sc) {}
    explicit OfdmGrid(const OfdmNumerology& num) : OfdmGrid(num.n_symbols, num.n_subcarriers) {}

    cplx& operator()(int j, int m) { return re[static_cast<size_t>(j) * n_subcarriers + m]; }
    const cplx& operator()(int j, int m) const { return re[static_cast<size_t>(j) * n_subcarriers + m]; }
};

TimeSignal modulate_ofdm(const OfdmGrid& symbols, const OfdmNumerology& num);

/// Discards each CP and applies a unitary DFT over the body.
OfdmGrid demodulate_ofdm(const TimeSignal& y, const OfdmNumerology& num);

/// Frequency-domain I/O matrix of one OFDM symbol, row-major h[m * n + k].
struct OfdmIoMatrix {
    int n = 0;
    double symbol_start = 0.0;
    CVec h;

    cplx operator()(int m, int k) const { return h[static_cast<size_t>(m) * n + k]; }
};

/// Coefficient from subcarrier k to subcarrier m (any integers) for a symbol
/// whose body starts at t_start, including the per-path phase exp(j2pi nu_i t_start).
cplx ofdm_io_coefficient(const DDSpreadingFunction& chan, const OfdmNumerology& num, double t_start, int m, int k);

OfdmIoMatrix compute_ofdm_io_matrix(const DDSpreadingFunction& chan, const OfdmNumerology& num, int symbol_index);

/// Applies the per-symbol I/O matrices to a resource grid (noiseless).
OfdmGrid apply_ofdm_io(const DDSpreadingFunction& chan, const OfdmGrid& x, const OfdmNumerology& num);

/// Off-diagonal share of the full (all integer subcarrier offsets) row energy
/// of a single path with normalized Doppler nu*T, summed from the I/O
/// coefficients with an Euler-Maclaurin tail beyond |k - m| > 1000.
double ici_off_diagonal_fraction(double nu_T);

/// Total diagonal power over total off-diagonal power of a matrix [dB].
double ofdm_sir_db(const OfdmIoMatrix& H);

/// Per-subcarrier SIR [dB] with path powers averaged over gain phases.
std::vector<double> ofdm_expected_sir_db(const DDSpreadingFunction& chan, const OfdmNumerology& num);

// ----- DMRS ----------------------------------------------------------------

struct DmrsConfig {
    std::vector<int> positions{2};
    int comb = 2;
    int comb_offset = 0;
    double boost_db = 0.0;

    void validate(const OfdmNumerology& num) const;
    bool is_pilot(int j, int m) const;
    int pilot_count(const OfdmNumerology& num) const;
};

/// Known pilot value at (j, m), unit-modulus QPSK scaled by the power boost.
cplx dmrs_value(const DmrsConfig& dmrs, int j, int m);

/// Data resource elements (non-pilot), symbol-major order.
std::vector<int> ofdm_data_indices(const OfdmNumerology& num, const DmrsConfig& dmrs);

/// Builds a slot grid with pilots and data symbols on the data REs.
OfdmGrid make_ofdm_grid(const OfdmNumerology& num, const DmrsConfig& dmrs, std::span<const cplx> data);

/// LS at pilots, linear interpolation in frequency, then linear
/// interpolation / extrapolation in time.
OfdmGrid estimate_channel_dmrs(const OfdmGrid& rx, const DmrsConfig& dmrs, const OfdmNumerology& num);

/// x = conj(H) Y / (|H|^2 + noise_var) per resource element.
OfdmGrid mmse_equalize_per_carrier(const OfdmGrid& rx, const OfdmGrid& est, double noise_var);

// ----- Overheads -----------------------------------------------------------

struct OfdmOverheads {
    double cp_fraction = 0.0;
    double pilot_fraction = 0.0;
    double total_fraction = 0.0;  // cp + pilot
};

OfdmOverheads ofdm_overheads(const OfdmNumerology& num, const DmrsConfig& dmrs);

/// Operating point used for overhead curves versus Doppler spread: CP equal to
/// tau_s, the smallest SCS in {15, 30, 60, 120} kHz with SCS >= 30 nu_s, and
/// min(4, ceil(nu_s / 1 kHz)) comb-2 DMRS symbols per 14-symbol slot.
struct OverheadPolicyPoint {
    double scs = 0.0;
    int n_dmrs = 0;
    OfdmOverheads overheads;
};

OverheadPolicyPoint ofdm_overhead_policy(double tau_s, double nu_s);

}  // namespace otfsim
