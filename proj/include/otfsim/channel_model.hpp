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

// Doubly-spread multipath channel: spreading-function draws (Veh-A power
// delay profile with a Jakes Doppler draw), brute-force time-domain
// application and AWGN.

#pragma once

#include "otfsim/dd_core.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace otfsim {

/// Sampled time-domain signal. Samples are scaled so that sum |x[n]|^2 equals
/// the continuous-time energy, i.e. x[n] = x(t0 + n/fs) / sqrt(fs).
struct TimeSignal {
    CVec samples;
    double sample_rate = 0.0;  // [Hz]
    double t0 = 0.0;           // time of samples[0] [s]

    double time_at(size_t n) const { return t0 + static_cast<double>(n) / sample_rate; }
    double energy() const;
};

struct ChannelPath {
    cplx gain{1.0, 0.0};
    double delay = 0.0;    // [s], >= 0
    double doppler = 0.0;  // [Hz]
};

/// h_phy(tau, nu) = sum_i h_i delta(tau - tau_i) delta(nu - nu_i)
struct DDSpreadingFunction {
    std::vector<ChannelPath> paths;

    void validate() const;
    double delay_spread() const;
    double doppler_spread() const;
    double max_delay() const;
};

struct PdpEntry {
    double delay = 0.0;     // [s]
    double power_db = 0.0;  // relative power [dB]
};

/// ITU vehicular-A power-delay profile, longest path at 2.51 us.
std::vector<PdpEntry> veh_a_profile();

struct ChannelDrawConfig {
    std::vector<PdpEntry> pdp = veh_a_profile();
    double nu_max = 0.0;  // [Hz]
    std::uint64_t rng_seed = 0;
    double delay_scale = 1.0;

    void validate() const;
};

/// Delay scale that stretches the Veh-A profile to a given delay spread.
double veh_a_delay_scale(double tau_s);

/// One channel realization: Rayleigh path gains with variance equal to the
/// normalized linear PDP power, Jakes Dopplers nu_i = nu_max cos(theta_i).
DDSpreadingFunction draw_veh_a(const ChannelDrawConfig& cfg);

/// Kaiser-windowed sinc fractional-delay interpolator (64 taps, beta = 8).
class FractionalDelay {
public:
    static constexpr int kHalfTaps = 32;
    static constexpr double kBeta = 8.0;

    /// Taps for a delay of `frac` samples, frac in [0,1); index j covers input
    /// offset j - kHalfTaps relative to the integer part of the delay.
    explicit FractionalDelay(double frac);

    const std::vector<double>& taps() const { return taps_; }

private:
    std::vector<double> taps_;
};

/// y(t) = sum_i h_i x(t - tau_i) exp(j2pi nu_i (t - tau_i)), evaluated on the
/// sample grid of x with t measured on the absolute time axis of x (t0 carried).
/// The output is extended by ceil(tau_max * fs) + 32 samples.
TimeSignal apply_channel_td(const TimeSignal& x, const DDSpreadingFunction& chan);

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

/// Adds circular white Gaussian noise with per-sample variance
/// signal_power / 10^(snr_db/10). snr_db = kNoiseless returns x unchanged.
/// signal_power is the signal energy per 1/B seconds (power in band B).
CVec add_awgn(std::span<const cplx> x, double snr_db, double signal_power, std::uint64_t rng_seed);

/// Same as add_awgn but with an explicit per-sample noise variance.
CVec add_noise_variance(std::span<const cplx> x, double noise_var, std::uint64_t rng_seed);

struct CoherenceMetrics {
    double tau_s = 0.0;     // delay spread [s]
    double nu_s = 0.0;      // Doppler spread [Hz]
    double tc_bound = 0.0;  // 1/nu_s, +inf when nu_s == 0
    double bc_bound = 0.0;  // 1/tau_s, +inf when tau_s == 0
};

CoherenceMetrics coherence_metrics(const DDSpreadingFunction& chan);

}  // namespace otfsim
