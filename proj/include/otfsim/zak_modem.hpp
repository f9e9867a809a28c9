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

// Zak-OTFS transceiver: frame layout, pilot, pulse-shaped modulation,
// matched-filter demodulation, pilot-based channel acquisition, closed-form
// effective channel and LSMR equalization.
//
// Lattice-time realization. With s = IDZT(x_dd) extended periodically, the
// pulse-shaped Zak signal is
//   x(t) = sum_q a[q] W1(t - q/B),  a[q] = P2(q / MN) s[q mod MN]
// where P2(f) is the cosine transform of the Doppler profile p2. The matched
// filter is the exact adjoint: correlate with W1 at t = q/B, weight by P2,
// fold modulo MN and apply the DZT.

#pragma once

#include "otfsim/channel_model.hpp"
#include "otfsim/dd_core.hpp"
#include "otfsim/lsmr.hpp"
#include "otfsim/pulse_shape.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace otfsim {

// ----- Layout --------------------------------------------------------------

enum class Allocation { I = 1, II = 2, III = 3, IV = 4, V = 5 };

std::string to_string(Allocation a);
Allocation allocation_from_string(const std::string& name);

enum class CellRole : unsigned char { Data, Guard, Pilot };

struct FrameLayout {
    FrameDims dims;
    Allocation allocation = Allocation::IV;
    int k_max = 0;
    int k_p = 0;
    int l_p = 0;
    int strip_begin = 0;  // first delay column of the pilot/guard strip (mod M)
    int strip_width = 0;
    std::vector<CellRole> roles;  // size M*N, delay-major
    std::vector<int> pilot_cells, guard_cells, data_cells;

    CellRole role(int k, int l) const { return roles[static_cast<size_t>(k) * dims.N + l]; }
    /// (2 k_max + 2(5 - n) + 1) / M
    double overhead() const { return static_cast<double>(strip_width) / dims.M; }
    int data_count() const { return static_cast<int>(data_cells.size()); }
};

/// Pilot strip of width 2 k_max + 2(5 - n) + 1 centred on the pilot column.
/// Throws std::invalid_argument when the strip does not fit in the frame.
FrameLayout build_layout(const FrameDims& dims, double tau_s, Allocation alloc,
                         std::optional<std::pair<int, int>> pilot_loc = std::nullopt);

/// tau_p > tau_s and nu_p > nu_s
bool check_crystallization(const FrameDims& dims, double tau_s, double nu_s);

inline constexpr double kNoPilot = -std::numeric_limits<double>::infinity();

/// Pilot energy = data_power * 10^(pdr_db/10) * (number of data cells).
double pilot_energy(const FrameLayout& layout, double pdr_db, double data_power = 1.0);

/// Single-cell pilot at (k_p, l_p); pdr_db = kNoPilot gives a zero grid.
QuasiPeriodicGrid make_pilot_grid(const FrameLayout& layout, double pdr_db, double data_power = 1.0);

/// Places data symbols on the data cells (in layout order).
QuasiPeriodicGrid place_data(const FrameLayout& layout, std::span<const cplx> symbols);
CVec extract_data(const FrameLayout& layout, const QuasiPeriodicGrid& grid);

/// PDR * SNR * tau_p / (2 tau_s), all in dB.
double effective_pnr_db(double pdr_db, double snr_db, double tau_p, double tau_s);

/// 2 tau_s / tau_p
double zak_strip_overhead(double tau_s, double tau_p);

// ----- Modem ---------------------------------------------------------------

class ZakModem {
public:
    ZakModem(const FrameDims& dims, const PulseShape& pulse, int oversampling = 4);

    const FrameDims& dims() const { return dims_; }
    const PulseShape& pulse() const { return pulse_; }
    int oversampling() const { return Q_; }
    double sample_rate() const { return Q_ * dims_.bandwidth; }
    /// Absolute time of the first transmitted sample.
    double t0() const { return t0_; }
    size_t tx_length() const { return tx_len_; }

    TimeSignal modulate(const QuasiPeriodicGrid& grid) const;

    /// y must share the sample rate and start time of modulate()'s output;
    /// it may be longer (channel tails) or shorter (zero-extended).
    QuasiPeriodicGrid demodulate(const TimeSignal& y) const;

private:
    FrameDims dims_;
    PulseShape pulse_;
    int Q_;
    int S1_;
    long long q_lo_ = 0, q_hi_ = 0;
    std::vector<double> w1_;      // p1(j/Q) / sqrt(Q), j in [-Q S1, Q S1]
    std::vector<double> window_;  // P2(q / MN), q in [q_lo, q_hi]
    double t0_ = 0.0;
    size_t tx_len_ = 0;
};

TimeSignal modulate(const QuasiPeriodicGrid& grid, const PulseShape& pulse, int oversampling = 4);
QuasiPeriodicGrid demodulate(const TimeSignal& y, const PulseShape& pulse, const FrameDims& dims,
                             int oversampling = 4);

// ----- Effective channel ---------------------------------------------------

/// Samples of w_rx *s h_phy *s w_tx on the lattice (k/B, l/T), evaluated with
/// separable quadrature (step 1/(8B) in delay, 1/(8T) in Doppler).
DiscreteDDFilter ground_truth_heff(const DDSpreadingFunction& chan, const PulseShape& pulse,
                                   const FrameDims& dims);

/// Self-interaction filter w_rx *s w_tx (identity channel).
DiscreteDDFilter self_interaction(const PulseShape& pulse, const FrameDims& dims);

/// Energy fraction of the strongest tap.
double dominant_tap_fraction(const DiscreteDDFilter& h);
/// Energy fraction outside |k - k0| <= 1, |l - l0| <= 1 around the strongest tap.
double leakage_beyond_3_taps(const DiscreteDDFilter& h);

/// 10 log10(sum |est - truth|^2 / sum |truth|^2) over the union of taps.
double filter_nmse_db(const DiscreteDDFilter& est, const DiscreteDDFilter& truth);

struct EffectiveChannelEstimate {
    DiscreteDDFilter filter;
    DiscreteDDFilter::Box box;
    std::optional<double> nmse_db;
};

struct AcquisitionOptions {
    double threshold = 0.0;   // relative amplitude; taps below threshold * peak are zeroed
    int delay_margin = 2;     // extra delay bins on both sides of [0, k_max]
    int doppler_margin = 2;   // extra Doppler bins beyond ceil(T nu_s / 2)
    double nu_s = -1.0;       // Doppler spread hint [Hz]; negative = full alias-free window
};

/// Reads the pilot response and removes the known pilot phase.
EffectiveChannelEstimate acquire_channel(const QuasiPeriodicGrid& rx, const FrameLayout& layout,
                                         cplx pilot_value, const AcquisitionOptions& opts = {});

// ----- Equalization --------------------------------------------------------

struct EqualizerResult {
    CVec symbols;  // soft estimates over the data cells, layout order
    int iterations = 0;
    bool hit_iteration_cap = false;
};

/// Tikhonov-regularized least squares over data cells with lambda = noise_var.
/// The reconstructed pilot response est *s pilot_grid is removed first and
/// observations are taken over the data and guard cells.
EqualizerResult lsmr_equalize(const QuasiPeriodicGrid& rx, const EffectiveChannelEstimate& est,
                              const FrameLayout& layout, const QuasiPeriodicGrid& pilot_grid,
                              double noise_var, const LsmrOptions& opts = {});

}  // namespace otfsim
