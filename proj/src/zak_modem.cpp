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

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace otfsim {

// ----- Modem ---------------------------------------------------------------

ZakModem::ZakModem(const FrameDims& dims, const PulseShape& pulse, int oversampling)
    : dims_(dims), pulse_(pulse), Q_(oversampling) {
    dims_.validate();
    if (Q_ < 1) throw std::invalid_argument("ZakModem: oversampling must be >= 1");

    const PulseProfile p1 = pulse.delay_profile();
    S1_ = p1.half_width();
    w1_ = p1.sampled(Q_);
    const double inv_sqrt_q = 1.0 / std::sqrt(static_cast<double>(Q_));
    for (auto& w : w1_) w *= inv_sqrt_q;

    const PulseProfile p2 = pulse.doppler_profile();
    const long long MN = dims_.size();
    const double edge = p2.kind() == PulseKind::Gauss ? 0.0 : 0.5;
    const double fmax = edge + 7.0 / (2.0 * kPi * p2.envelope_std());
    const long long qlim = static_cast<long long>(std::ceil(fmax * static_cast<double>(MN)));

    std::vector<double> win(static_cast<size_t>(2 * qlim + 1));
    double peak = 0.0;
    for (long long q = -qlim; q <= qlim; ++q) {
        const double v = p2.spectrum(static_cast<double>(q) / static_cast<double>(MN));
        win[static_cast<size_t>(q + qlim)] = v;
        peak = std::max(peak, std::abs(v));
    }
    long long lo = 0, hi = 2 * qlim;
    while (lo < hi && std::abs(win[static_cast<size_t>(lo)]) < 1e-10 * peak) ++lo;
    while (hi > lo && std::abs(win[static_cast<size_t>(hi)]) < 1e-10 * peak) --hi;
    window_.assign(win.begin() + lo, win.begin() + hi + 1);
    q_lo_ = lo - qlim;
    q_hi_ = hi - qlim;

    t0_ = static_cast<double>(q_lo_ - S1_) / dims_.bandwidth;
    tx_len_ = static_cast<size_t>(Q_ * (q_hi_ - q_lo_ + 2 * S1_) + 1);
}

TimeSignal ZakModem::modulate(const QuasiPeriodicGrid& grid) const {
    if (!(grid.dims() == dims_)) throw std::invalid_argument("ZakModem::modulate: grid dims mismatch");
    const CVec s = inverse_discrete_zak_transform(grid);
    const long long MN = dims_.size();
    const long long taps = static_cast<long long>(w1_.size());

    TimeSignal x;
    x.sample_rate = sample_rate();
    x.t0 = t0_;
    x.samples.assign(tx_len_, cplx{});
    for (long long q = q_lo_; q <= q_hi_; ++q) {
        const cplx a = window_[static_cast<size_t>(q - q_lo_)] * s[static_cast<size_t>(pos_mod(q, MN))];
        if (a == cplx{}) continue;
        cplx* dst = x.samples.data() + Q_ * (q - q_lo_);  // j = -Q S1 maps here
        for (long long j = 0; j < taps; ++j) dst[j] += a * w1_[static_cast<size_t>(j)];
    }
    return x;
}

QuasiPeriodicGrid ZakModem::demodulate(const TimeSignal& y) const {
    if (std::abs(y.sample_rate - sample_rate()) > 1e-9 * sample_rate())
        throw std::invalid_argument("ZakModem::demodulate: sample rate mismatch");
    if (std::abs(y.t0 - t0_) * sample_rate() > 1e-6)
        throw std::invalid_argument("ZakModem::demodulate: signal is not aligned with the frame lattice");

    const long long MN = dims_.size();
    const long long taps = static_cast<long long>(w1_.size());
    const long long len = static_cast<long long>(y.samples.size());
    CVec folded(static_cast<size_t>(MN), cplx{});
    for (long long q = q_lo_; q <= q_hi_; ++q) {
        const long long start = Q_ * (q - q_lo_);
        const long long stop = std::min(start + taps, len);
        cplx r{};
        for (long long s = start; s < stop; ++s) r += y.samples[static_cast<size_t>(s)] * w1_[static_cast<size_t>(s - start)];
        folded[static_cast<size_t>(pos_mod(q, MN))] += window_[static_cast<size_t>(q - q_lo_)] * r;
    }
    return discrete_zak_transform(folded, dims_);
}

TimeSignal modulate(const QuasiPeriodicGrid& grid, const PulseShape& pulse, int oversampling) {
    return ZakModem(grid.dims(), pulse, oversampling).modulate(grid);
}

QuasiPeriodicGrid demodulate(const TimeSignal& y, const PulseShape& pulse, const FrameDims& dims,
                             int oversampling) {
    return ZakModem(dims, pulse, oversampling).demodulate(y);
}

// ----- Effective channel ---------------------------------------------------

namespace {

constexpr int kQuadDen = 8;  // quadrature step 1/8 lattice unit

}  // namespace

DiscreteDDFilter ground_truth_heff(const DDSpreadingFunction& chan, const PulseShape& pulse,
                                   const FrameDims& dims) {
    chan.validate();
    dims.validate();
    const PulseProfile p1 = pulse.delay_profile();
    const PulseProfile p2 = pulse.doppler_profile();
    const int S1 = p1.half_width(), S2 = p2.half_width();
    const double B = dims.bandwidth, T = dims.duration;
    const double MN = static_cast<double>(dims.size());

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& p : chan.paths) {
        xmin = std::min(xmin, B * p.delay);
        xmax = std::max(xmax, B * p.delay);
        ymin = std::min(ymin, T * p.doppler);
        ymax = std::max(ymax, T * p.doppler);
    }
    const int k_lo = static_cast<int>(std::floor(xmin)) - 2 * S1;
    const int k_hi = static_cast<int>(std::ceil(xmax)) + 2 * S1;
    const int l_lo = static_cast<int>(std::floor(ymin)) - 2 * S2;
    const int l_hi = static_cast<int>(std::ceil(ymax)) + 2 * S2;
    const int nk = k_hi - k_lo + 1, nl = l_hi - l_lo + 1;

    const std::vector<double> p1s = p1.sampled(kQuadDen);
    const std::vector<double> p2s = p2.sampled(kQuadDen);
    const int n1 = static_cast<int>(p1s.size()), n2 = static_cast<int>(p2s.size());
    const double h = 1.0 / kQuadDen;

    CVec acc(static_cast<size_t>(nk) * nl, cplx{});
    for (const auto& path : chan.paths) {
        if (path.gain == cplx{}) continue;
        const double xi = B * path.delay;
        const double yi = T * path.doppler;

        // A(k) = int p1(x) p1(x + k - xi) exp(j2pi yi x / MN) dx
        CVec A(static_cast<size_t>(nk));
        for (int k = k_lo; k <= k_hi; ++k) {
            cplx a{};
            for (int m = 0; m < n1; ++m) {
                const double x = (m - S1 * kQuadDen) * h;
                const double v = p1s[static_cast<size_t>(m)] * p1(x + k - xi);
                if (v == 0.0) continue;
                const double ang = 2.0 * kPi * yi * x / MN;
                a += v * cplx(std::cos(ang), std::sin(ang));
            }
            A[static_cast<size_t>(k - k_lo)] = a * h;
        }

        // Doppler cross-profiles g_l(y) = p2(y) p2(y + l - yi)
        std::vector<double> g(static_cast<size_t>(nl) * n2);
        for (int l = l_lo; l <= l_hi; ++l)
            for (int m = 0; m < n2; ++m) {
                const double y = (m - S2 * kQuadDen) * h;
                g[static_cast<size_t>(l - l_lo) * n2 + m] = p2s[static_cast<size_t>(m)] * p2(y + l - yi);
            }

        CVec phase(static_cast<size_t>(n2));
        for (int k = k_lo; k <= k_hi; ++k) {
            const cplx a = A[static_cast<size_t>(k - k_lo)];
            if (std::abs(a) < 1e-300) continue;
            for (int m = 0; m < n2; ++m) {
                const double y = (m - S2 * kQuadDen) * h;
                const double ang = -2.0 * kPi * y * k / MN;
                phase[static_cast<size_t>(m)] = cplx(std::cos(ang), std::sin(ang));
            }
            const double ang0 = 2.0 * kPi * yi * (k - xi) / MN;
            const cplx pre = path.gain * cplx(std::cos(ang0), std::sin(ang0)) * a * h;
            for (int l = l_lo; l <= l_hi; ++l) {
                const double* gl = g.data() + static_cast<size_t>(l - l_lo) * n2;
                cplx b{};
                for (int m = 0; m < n2; ++m)
                    if (gl[m] != 0.0) b += gl[m] * phase[static_cast<size_t>(m)];
                acc[static_cast<size_t>(k - k_lo) * nl + (l - l_lo)] += pre * b;
            }
        }
    }

    DiscreteDDFilter out;
    double peak = 0.0;
    for (const auto& v : acc) peak = std::max(peak, std::abs(v));
    for (int k = k_lo; k <= k_hi; ++k)
        for (int l = l_lo; l <= l_hi; ++l) {
            const cplx v = acc[static_cast<size_t>(k - k_lo) * nl + (l - l_lo)];
            if (std::abs(v) > 1e-14 * peak) out.taps[{k, l}] = v;
        }
    return out;
}

DiscreteDDFilter self_interaction(const PulseShape& pulse, const FrameDims& dims) {
    DDSpreadingFunction id;
    id.paths.push_back({cplx{1.0, 0.0}, 0.0, 0.0});
    return ground_truth_heff(id, pulse, dims);
}

namespace {

std::pair<std::pair<int, int>, double> strongest_tap(const DiscreteDDFilter& h) {
    std::pair<int, int> at{0, 0};
    double best = -1.0;
    for (const auto& [kl, v] : h.taps)
        if (std::norm(v) > best) {
            best = std::norm(v);
            at = kl;
        }
    return {at, best};
}

}  // namespace

double dominant_tap_fraction(const DiscreteDDFilter& h) {
    const double e = h.energy();
    if (e <= 0.0) return 0.0;
    return strongest_tap(h).second / e;
}

double leakage_beyond_3_taps(const DiscreteDDFilter& h) {
    const double e = h.energy();
    if (e <= 0.0) return 0.0;
    const auto [at, best] = strongest_tap(h);
    double outside = 0.0;
    for (const auto& [kl, v] : h.taps)
        if (std::abs(kl.first - at.first) > 1 || std::abs(kl.second - at.second) > 1) outside += std::norm(v);
    return outside / e;
}

double filter_nmse_db(const DiscreteDDFilter& est, const DiscreteDDFilter& truth) {
    double err = 0.0;
    for (const auto& [kl, v] : truth.taps) err += std::norm(est.get(kl.first, kl.second) - v);
    for (const auto& [kl, v] : est.taps)
        if (!truth.taps.count(kl)) err += std::norm(v);
    const double ref = truth.energy();
    if (ref <= 0.0) throw std::invalid_argument("filter_nmse_db: reference filter has zero energy");
    return 10.0 * std::log10(std::max(err / ref, 1e-300));
}

// ----- Acquisition ---------------------------------------------------------

EffectiveChannelEstimate acquire_channel(const QuasiPeriodicGrid& rx, const FrameLayout& layout,
                                         cplx pilot_value, const AcquisitionOptions& opts) {
    if (pilot_value == cplx{}) throw std::invalid_argument("acquire_channel: zero pilot");
    const FrameDims& d = layout.dims;
    const int M = d.M, N = d.N;

    int l_lo = -((N - 1) / 2), l_hi = N / 2;
    if (opts.nu_s >= 0.0) {
        const int half = static_cast<int>(std::ceil(d.duration * opts.nu_s / 2.0 - 1e-9)) + opts.doppler_margin;
        l_lo = std::max(l_lo, -half);
        l_hi = std::min(l_hi, half);
    }
    // Delay window: the pilot spread plus margin, never past the guard strip
    // (cells beyond it carry data).
    const int strip_half = (layout.strip_width - 1) / 2;
    int k_lo = std::max(-opts.delay_margin, -strip_half);
    int k_hi = std::min(layout.k_max + opts.delay_margin, strip_half);
    if (k_hi - k_lo + 1 > M) k_hi = k_lo + M - 1;

    const PhaseTable twist(static_cast<long long>(M) * N);
    const cplx inv = 1.0 / pilot_value;
    EffectiveChannelEstimate est;
    double peak = 0.0;
    for (int k = k_lo; k <= k_hi; ++k)
        for (int l = l_lo; l <= l_hi; ++l) {
            const cplx v = rx.at(layout.k_p + k, layout.l_p + l) *
                           twist(-static_cast<long long>(layout.k_p) * l) * inv;
            est.filter.taps[{k, l}] = v;
            peak = std::max(peak, std::abs(v));
        }
    if (opts.threshold > 0.0) {
        const double thr = opts.threshold * peak;
        std::erase_if(est.filter.taps, [thr](const auto& kv) { return std::abs(kv.second) < thr; });
    }
    est.box = {k_lo, k_hi, l_lo, l_hi};
    return est;
}

// ----- Equalization --------------------------------------------------------

EqualizerResult lsmr_equalize(const QuasiPeriodicGrid& rx, const EffectiveChannelEstimate& est,
                              const FrameLayout& layout, const QuasiPeriodicGrid& pilot_grid,
                              double noise_var, const LsmrOptions& opts) {
    const FrameDims& d = layout.dims;
    if (!(rx.dims() == d) || !(pilot_grid.dims() == d))
        throw std::invalid_argument("lsmr_equalize: grid dims mismatch");

    QuasiPeriodicGrid y = rx;
    y -= discrete_twisted_convolve(est.filter, pilot_grid);

    std::vector<int> obs;
    obs.reserve(layout.data_cells.size() + layout.guard_cells.size());
    for (int i = 0; i < d.size(); ++i)
        if (layout.roles[static_cast<size_t>(i)] != CellRole::Pilot) obs.push_back(i);

    CVec b(obs.size());
    for (size_t i = 0; i < obs.size(); ++i) b[i] = y.cells()[static_cast<size_t>(obs[i])];

    const LinearOp A = [&](const CVec& x) {
        const QuasiPeriodicGrid out = discrete_twisted_convolve(est.filter, place_data(layout, x));
        CVec r(obs.size());
        for (size_t i = 0; i < obs.size(); ++i) r[i] = out.cells()[static_cast<size_t>(obs[i])];
        return r;
    };
    const LinearOp AH = [&](const CVec& r) {
        QuasiPeriodicGrid g(d);
        for (size_t i = 0; i < obs.size(); ++i) g.cells()[static_cast<size_t>(obs[i])] = r[i];
        return extract_data(layout, discrete_twisted_convolve_adjoint(est.filter, g));
    };

    const LsmrResult res = lsmr(A, AH, b, layout.data_cells.size(), std::sqrt(std::max(noise_var, 0.0)), opts);
    return {res.x, res.iterations, res.hit_iteration_cap};
}

}  // namespace otfsim
