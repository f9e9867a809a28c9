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

#include "otfsim/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace otfsim {

double TimeSignal::energy() const {
    double e = 0.0;
    for (const auto& v : samples) e += std::norm(v);
    return e;
}

// ----- Spreading function --------------------------------------------------

void DDSpreadingFunction::validate() const {
    if (paths.empty()) throw std::invalid_argument("DDSpreadingFunction: at least one path required");
    for (const auto& p : paths)
        if (p.delay < 0.0) throw std::invalid_argument("DDSpreadingFunction: negative path delay");
}

double DDSpreadingFunction::delay_spread() const {
    validate();
    auto [lo, hi] = std::minmax_element(paths.begin(), paths.end(),
                                        [](const auto& a, const auto& b) { return a.delay < b.delay; });
    return hi->delay - lo->delay;
}

double DDSpreadingFunction::doppler_spread() const {
    validate();
    auto [lo, hi] = std::minmax_element(paths.begin(), paths.end(),
                                        [](const auto& a, const auto& b) { return a.doppler < b.doppler; });
    return hi->doppler - lo->doppler;
}

double DDSpreadingFunction::max_delay() const {
    double m = 0.0;
    for (const auto& p : paths) m = std::max(m, p.delay);
    return m;
}

std::vector<PdpEntry> veh_a_profile() {
    return {{0.0, 0.0}, {0.31e-6, -1.0}, {0.71e-6, -9.0}, {1.09e-6, -10.0}, {1.73e-6, -15.0}, {2.51e-6, -20.0}};
}

double veh_a_delay_scale(double tau_s) { return tau_s / 2.51e-6; }

void ChannelDrawConfig::validate() const {
    if (pdp.empty()) throw std::invalid_argument("ChannelDrawConfig: empty power-delay profile");
    if (delay_scale < 0.0) throw std::invalid_argument("ChannelDrawConfig: negative delay scale");
    if (nu_max < 0.0) throw std::invalid_argument("ChannelDrawConfig: negative nu_max");
}

DDSpreadingFunction draw_veh_a(const ChannelDrawConfig& cfg) {
    cfg.validate();
    double total = 0.0;
    for (const auto& e : cfg.pdp) total += std::pow(10.0, e.power_db / 10.0);

    std::mt19937_64 rng(cfg.rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);

    DDSpreadingFunction chan;
    chan.paths.reserve(cfg.pdp.size());
    for (const auto& e : cfg.pdp) {
        const double power = std::pow(10.0, e.power_db / 10.0) / total;
        const double sd = std::sqrt(power / 2.0);
        const double re = gauss(rng), im = gauss(rng);
        const double theta = angle(rng);
        ChannelPath p;
        p.gain = cplx(sd * re, sd * im);
        p.delay = e.delay * cfg.delay_scale;
        p.doppler = cfg.nu_max * std::cos(theta);
        chan.paths.push_back(p);
    }
    return chan;
}

// ----- Time-domain application ---------------------------------------------

FractionalDelay::FractionalDelay(double frac) : taps_(2 * kHalfTaps + 1, 0.0) {
    const double i0b = std::cyl_bessel_i(0.0, kBeta);
    for (int j = -kHalfTaps; j <= kHalfTaps; ++j) {
        const double x = -frac - j;  // u - m for input index m = base + j
        const double r = x / kHalfTaps;
        if (std::abs(r) >= 1.0) continue;
        const double sinc = (x == 0.0) ? 1.0 : std::sin(kPi * x) / (kPi * x);
        const double win = std::cyl_bessel_i(0.0, kBeta * std::sqrt(1.0 - r * r)) / i0b;
        taps_[static_cast<size_t>(j + kHalfTaps)] = sinc * win;
    }
}

TimeSignal apply_channel_td(const TimeSignal& x, const DDSpreadingFunction& chan) {
    chan.validate();
    if (x.sample_rate <= 0.0) throw std::invalid_argument("apply_channel_td: invalid sample rate");
    const double fs = x.sample_rate;
    const long long in_len = static_cast<long long>(x.samples.size());
    const long long extra =
        static_cast<long long>(std::ceil(chan.max_delay() * fs - 1e-9)) + FractionalDelay::kHalfTaps;

    TimeSignal y;
    y.sample_rate = fs;
    y.t0 = x.t0;
    y.samples.assign(static_cast<size_t>(in_len + extra), cplx{});

    for (const auto& p : chan.paths) {
        if (p.gain == cplx{}) continue;
        const double d = p.delay * fs;
        const double dfloor = std::floor(d + 1e-12);
        const long long D = static_cast<long long>(dfloor);
        const double frac = std::max(0.0, d - dfloor);
        const FractionalDelay fd(frac);
        const auto& taps = fd.taps();
        const bool integer_shift = frac < 1e-12;

        for (long long s = 0; s < static_cast<long long>(y.samples.size()); ++s) {
            const long long base = s - D;
            cplx acc{};
            if (integer_shift) {
                if (base >= 0 && base < in_len) acc = x.samples[static_cast<size_t>(base)];
            } else {
                const long long lo = std::max<long long>(-FractionalDelay::kHalfTaps, -base);
                const long long hi = std::min<long long>(FractionalDelay::kHalfTaps, in_len - 1 - base);
                for (long long j = lo; j <= hi; ++j)
                    acc += x.samples[static_cast<size_t>(base + j)] *
                           taps[static_cast<size_t>(j + FractionalDelay::kHalfTaps)];
            }
            if (acc == cplx{}) continue;
            const double t = y.time_at(static_cast<size_t>(s));
            const double ang = 2.0 * kPi * p.doppler * (t - p.delay);
            y.samples[static_cast<size_t>(s)] += p.gain * cplx(std::cos(ang), std::sin(ang)) * acc;
        }
    }
    return y;
}

// ----- Noise ---------------------------------------------------------------

CVec add_noise_variance(std::span<const cplx> x, double noise_var, std::uint64_t rng_seed) {
    CVec out(x.begin(), x.end());
    if (!(noise_var > 0.0)) return out;
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(noise_var / 2.0));
    for (auto& v : out) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v += cplx(re, im);
    }
    return out;
}

CVec add_awgn(std::span<const cplx> x, double snr_db, double signal_power, std::uint64_t rng_seed) {
    if (std::isinf(snr_db) && snr_db > 0) return CVec(x.begin(), x.end());
    if (!(signal_power > 0.0)) throw std::invalid_argument("add_awgn: signal power must be positive");
    return add_noise_variance(x, signal_power / std::pow(10.0, snr_db / 10.0), rng_seed);
}

CoherenceMetrics coherence_metrics(const DDSpreadingFunction& chan) {
    CoherenceMetrics m;
    m.tau_s = chan.delay_spread();
    m.nu_s = chan.doppler_spread();
    const double inf = std::numeric_limits<double>::infinity();
    m.tc_bound = m.nu_s > 0.0 ? 1.0 / m.nu_s : inf;
    m.bc_bound = m.tau_s > 0.0 ? 1.0 / m.tau_s : inf;
    return m;
}

}  // namespace otfsim
