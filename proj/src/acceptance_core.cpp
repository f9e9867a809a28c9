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

// P1..P8: transform, algebra, oracle and closed-form checks.

#include "otfsim/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

namespace otfsim {

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

CVec random_vec(size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CVec v(n);
    for (auto& c : v) c = cplx(g(rng), g(rng));
    return v;
}

QuasiPeriodicGrid random_grid(const FrameDims& d, std::mt19937_64& rng) {
    QuasiPeriodicGrid x(d);
    const CVec v = random_vec(static_cast<size_t>(d.size()), rng);
    std::copy(v.begin(), v.end(), x.cells().begin());
    return x;
}

DiscreteDDFilter random_filter(std::mt19937_64& rng, int n_taps, int reach) {
    std::uniform_int_distribution<int> pos(-reach, reach);
    std::normal_distribution<double> g;
    DiscreteDDFilter h;
    for (int i = 0; i < n_taps; ++i) h.add(pos(rng), pos(rng), cplx(g(rng), g(rng)));
    return h;
}

double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double rel_err(std::span<const cplx> a, std::span<const cplx> ref) {
    double e = 0.0, r = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        e += std::norm(a[i] - ref[i]);
        r += std::norm(ref[i]);
    }
    return r > 0.0 ? std::sqrt(e / r) : std::sqrt(e);
}

double norm2(std::span<const cplx> a) {
    double s = 0.0;
    for (const auto& v : a) s += std::norm(v);
    return s;
}

// Twisted convolution evaluated straight from its defining sum at any (k, l).
cplx direct_twisted(const DiscreteDDFilter& h, const QuasiPeriodicGrid& x, int k, int l) {
    const FrameDims& d = x.dims();
    const double MN = static_cast<double>(d.M) * d.N;
    cplx acc{};
    for (const auto& [kl, v] : h.taps) {
        const int kk = k - kl.first, ll = l - kl.second;
        acc += v * x.at(kk, ll) * std::polar(1.0, 2.0 * kPi * kl.second * kk / MN);
    }
    return acc;
}

std::vector<DDSpreadingFunction> oracle_channels(std::uint64_t seed) {
    std::vector<DDSpreadingFunction> out;
    for (double scale : {0.0, 1.0, 4.7 / 2.51})
        for (double nu : {0.0, 800.0}) {
            ChannelDrawConfig cfg;
            cfg.nu_max = nu;
            cfg.delay_scale = scale;
            cfg.rng_seed = seed;
            out.push_back(draw_veh_a(cfg));
        }
    return out;
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

}  // namespace

CheckResult check_p1_transforms() {
    CheckResult r{"P1", true, "", 0.0};
    std::mt19937_64 rng(11);
    double worst_round = 0.0, worst_unit = 0.0;
    for (auto [M, N] : {std::pair{2, 2}, {8, 4}, {56, 12}, {336, 2}}) {
        const FrameDims d = FrameDims::from_bins(M, N, 672e3);
        const CVec td = random_vec(static_cast<size_t>(d.size()), rng);
        const QuasiPeriodicGrid X = discrete_zak_transform(td, d);
        worst_round = std::max(worst_round, max_abs_diff(inverse_discrete_zak_transform(X), td));
        const QuasiPeriodicGrid G = random_grid(d, rng);
        worst_round = std::max(worst_round, max_abs_diff(discrete_zak_transform(inverse_discrete_zak_transform(G), d).cells(),
                                                         G.cells()));
        worst_unit = std::max(worst_unit, std::abs(norm2(X.cells()) - norm2(td)) / norm2(td));
    }
    r.pass = worst_round <= 1e-12 && worst_unit <= 1e-12;
    r.detail = "round-trip max abs err " + sci(worst_round) + ", unitarity rel err " + sci(worst_unit);
    return r;
}

CheckResult check_p2_twisted_algebra(std::uint64_t seed) {
    CheckResult r{"P2", true, "", 0.0};
    std::mt19937_64 rng(seed ^ 0x22);
    const FrameDims d = FrameDims::from_bins(8, 4, 672e3);

    const QuasiPeriodicGrid x = random_grid(d, rng), y = random_grid(d, rng);
    const double e_id = max_abs_diff(discrete_twisted_convolve(DiscreteDDFilter::identity(), x).cells(), x.cells());

    const DiscreteDDFilter h = random_filter(rng, 5, 5);
    const cplx a{0.3, -1.2}, b{-0.7, 0.4};
    QuasiPeriodicGrid ax = x, by = y;
    ax *= a;
    by *= b;
    QuasiPeriodicGrid lhs_in = ax;
    lhs_in += by;
    QuasiPeriodicGrid hx = discrete_twisted_convolve(h, x), hy = discrete_twisted_convolve(h, y);
    hx *= a;
    hy *= b;
    hx += hy;
    const double e_lin = max_abs_diff(discrete_twisted_convolve(h, lhs_in).cells(), hx.cells());

    const QuasiPeriodicGrid hxo = discrete_twisted_convolve(h, x);
    double e_qp = 0.0;
    for (int k : {-9, -1, 3, 8, 17})
        for (int l : {-5, 0, 2, 4, 9}) e_qp = std::max(e_qp, std::abs(direct_twisted(h, x, k, l) - hxo.at(k, l)));

    double e_assoc = 0.0;
    for (int t = 0; t < 100; ++t) {
        std::uniform_int_distribution<int> dm(2, 7);
        const FrameDims ds = FrameDims::from_bins(dm(rng), dm(rng), 672e3);
        const DiscreteDDFilter h1 = random_filter(rng, 3, 4), h2 = random_filter(rng, 3, 4);
        const QuasiPeriodicGrid z = random_grid(ds, rng);
        const auto nested = discrete_twisted_convolve(h1, discrete_twisted_convolve(h2, z));
        const auto composed = discrete_twisted_convolve(compose_filters(h1, h2, ds), z);
        e_assoc = std::max(e_assoc, max_abs_diff(nested.cells(), composed.cells()) / std::sqrt(norm2(nested.cells())));
    }

    DiscreteDDFilter shift_k, shift_l;
    shift_k.add(1, 0, 1.0);
    shift_l.add(0, 1, 1.0);
    const double noncomm = max_abs_diff(discrete_twisted_convolve(shift_k, discrete_twisted_convolve(shift_l, x)).cells(),
                                        discrete_twisted_convolve(shift_l, discrete_twisted_convolve(shift_k, x)).cells());

    r.pass = e_id <= 1e-12 && e_lin <= 1e-12 && e_qp <= 1e-12 && e_assoc <= 1e-10 && noncomm > 1e-3;
    r.detail = "identity " + sci(e_id) + ", linearity " + sci(e_lin) + ", quasi-periodicity " + sci(e_qp) +
               ", associativity(100) " + sci(e_assoc) + ", delay/Doppler shift commutator " + sci(noncomm);
    return r;
}

CheckResult check_p3_zak_oracle(std::uint64_t seed) {
    CheckResult r{"P3", true, "", 0.0};
    const FrameDims d = FrameDims::from_bins(56, 12, 672e3);
    std::mt19937_64 rng(seed ^ 0x33);
    const QuasiPeriodicGrid x = random_grid(d, rng);
    double worst = 0.0;
    std::string where;
    for (const PulseShape& p : {PulseShape::sinc(), PulseShape::gauss(), PulseShape::gauss_sinc()}) {
        const ZakModem modem(d, p);
        const TimeSignal tx = modem.modulate(x);
        for (const auto& ch : oracle_channels(seed)) {
            const QuasiPeriodicGrid y = modem.demodulate(apply_channel_td(tx, ch));
            const QuasiPeriodicGrid ref = discrete_twisted_convolve(ground_truth_heff(ch, p, d), x);
            const double e = rel_err(y.cells(), ref.cells());
            if (e > worst) {
                worst = e;
                where = p.name() + ", tau_max=" + sci(ch.max_delay() * 1e6) + " us, nu_s=" + sci(ch.doppler_spread());
            }
        }
    }
    r.pass = worst <= 1e-3;
    r.detail = "max rel err " + sci(worst) + " over 3 pulses x 6 channels (worst: " + where + ")";
    return r;
}

CheckResult check_p4_ofdm_oracle(std::uint64_t seed) {
    CheckResult r{"P4", true, "", 0.0};
    // The oracle runs at 16x oversampling so that the TD fractional-delay
    // interpolator is accurate near the band edge.
    const OfdmNumerology num = OfdmNumerology::standard(15e3, false, 16);
    std::mt19937_64 rng(seed ^ 0x44);
    OfdmGrid x(num);
    const CVec v = random_vec(x.re.size(), rng);
    for (size_t i = 0; i < v.size(); ++i) x.re[i] = v[i] / std::sqrt(2.0);
    double worst = 0.0, offdiag = 0.0;
    for (const auto& ch : oracle_channels(seed)) {
        const OfdmGrid y = demodulate_ofdm(apply_channel_td(modulate_ofdm(x, num), ch), num);
        worst = std::max(worst, rel_err(y.re, apply_ofdm_io(ch, x, num).re));
        if (ch.doppler_spread() == 0.0) {
            for (int j = 0; j < num.n_symbols; ++j) {
                const OfdmIoMatrix H = compute_ofdm_io_matrix(ch, num, j);
                for (int m = 0; m < H.n; ++m)
                    for (int k = 0; k < H.n; ++k)
                        if (k != m) offdiag = std::max(offdiag, std::abs(H(m, k)));
            }
        }
    }
    r.pass = worst <= 1e-3 && offdiag < 1e-12;
    r.detail = "max rel err " + sci(worst) + " over 6 channels (Q=16), zero-Doppler max off-diagonal " + sci(offdiag);
    return r;
}

CheckResult check_p5_overheads() {
    CheckResult r{"P5", true, "", 0.0};
    DmrsConfig none;
    none.positions.clear();
    const double cp = ofdm_overheads(OfdmNumerology::standard(15e3), none).cp_fraction * 100.0;
    const double guard = zak_guard_overhead(4.7e-6, 1e-3) * 100.0;
    const FrameLayout l56 = build_layout(FrameDims::from_doppler_period(672e3, 1e-3, 12e3), 4.7e-6, Allocation::IV);
    const FrameLayout l336 = build_layout(FrameDims::from_doppler_period(672e3, 1e-3, 2e3), 4.7e-6, Allocation::IV);
    const double s1 = zak_strip_overhead(2.5e-6, 200e-6) * 100.0;
    const double s2 = zak_strip_overhead(4.7e-6, 500e-6) * 100.0;

    const bool ok = std::abs(cp - 6.6) <= 0.05 && std::abs(guard - 0.47) <= 0.01 && l56.k_max == 4 &&
                    std::abs(l56.overhead() - 11.0 / 56.0) < 1e-12 && l336.k_max == 4 &&
                    std::abs(l336.overhead() - 11.0 / 336.0) < 1e-12 && std::abs(s1 - 2.5) < 1e-9 &&
                    std::abs(s2 - 1.88) < 1e-9;
    r.pass = ok;
    r.detail = "CP " + sci(cp) + "%, guard " + sci(guard) + "%, IV M=56 " + std::to_string(l56.strip_width) +
               "/56, IV M=336 " + std::to_string(l336.strip_width) + "/336 = " + sci(l336.overhead() * 100) +
               "%, strip " + sci(s1) + "% and " + sci(s2) + "%";
    return r;
}

CheckResult check_p6_pnr() {
    CheckResult r{"P6", true, "", 0.0};
    const double a = effective_pnr_db(-10.0, 12.0, 500e-6, 4.7e-6);
    const double b = effective_pnr_db(-15.0, 12.0, 500e-6, 4.7e-6);
    r.pass = std::abs(a - 19.3) <= 0.1 && std::abs(b - 14.3) <= 0.1;
    char buf[96];
    std::snprintf(buf, sizeof buf, "PNR %.2f dB (PDR -10 dB), %.2f dB (PDR -15 dB)", a, b);
    r.detail = buf;
    return r;
}

CheckResult check_p7_crystallization(std::uint64_t seed) {
    CheckResult r{"P7", true, "", 0.0};
    constexpr int kDraws = 20;
    const PulseShape pulse = PulseShape::gauss();
    AcquisitionOptions acq;
    acq.delay_margin = 3;
    acq.doppler_margin = 3;
    acq.nu_s = 2.0 * 800.0;

    auto mean_nmse_db = [&](double nu_p) {
        const FrameDims d = FrameDims::from_doppler_period(672e3, 1e-3, nu_p);
        const FrameLayout layout = build_layout(d, 2.51e-6, Allocation::I);
        const QuasiPeriodicGrid pilot = make_pilot_grid(layout, 0.0);
        double acc = 0.0;
        for (int i = 0; i < kDraws; ++i) {
            ChannelDrawConfig cfg;
            cfg.nu_max = 800.0;
            cfg.rng_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
            const DiscreteDDFilter h = ground_truth_heff(draw_veh_a(cfg), pulse, d);
            const auto est = acquire_channel(discrete_twisted_convolve(h, pilot), layout, pilot(layout.k_p, layout.l_p), acq);
            acc += std::pow(10.0, filter_nmse_db(est.filter, h) / 10.0);
        }
        return 10.0 * std::log10(acc / kDraws);
    };
    const double good = mean_nmse_db(12e3);
    const double bad = mean_nmse_db(1e3);
    r.pass = good <= -40.0 && bad - good >= 10.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "mean NMSE %.1f dB at nu_p=12 kHz, %.1f dB at nu_p=1 kHz (20 draws, nu_max=800 Hz)",
                  good, bad);
    r.detail = buf;
    return r;
}

CheckResult check_p8_ici(std::uint64_t seed) {
    CheckResult r{"P8", true, "", 0.0};
    double worst = 0.0;
    for (double nt : {0.0, 0.1, 0.25, 0.5})
        worst = std::max(worst, std::abs(ici_off_diagonal_fraction(nt) - (1.0 - sinc(nt) * sinc(nt))));

    bool monotone = true;
    double prev = -1.0;
    for (int i = 0; i <= 50; ++i) {
        const double f = ici_off_diagonal_fraction(0.01 * i);
        monotone = monotone && f >= prev;
        prev = f;
    }

    // Per-carrier sufficiency regime: Doppler at most 5% of the SCS.
    const OfdmNumerology num = OfdmNumerology::standard(15e3);
    double min_sir = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20; ++i) {
        ChannelDrawConfig cfg;
        cfg.nu_max = 0.05 * num.scs;
        cfg.rng_seed = derive_seed(seed ^ 0x88, static_cast<std::uint64_t>(i));
        for (double s : ofdm_expected_sir_db(draw_veh_a(cfg), num)) min_sir = std::min(min_sir, s);
    }
    r.pass = worst <= 1e-10 && monotone && min_sir >= 20.0;
    r.detail = "max |ICI fraction - (1 - sinc^2)| " + sci(worst) + (monotone ? ", monotone" : ", NOT monotone") +
               ", min per-carrier SIR " + sci(min_sir) + " dB at nu_max=0.05 SCS";
    return r;
}

std::string format_check(const CheckResult& r) {
    char t[32];
    std::snprintf(t, sizeof t, "%.1f s", r.seconds);
    return r.id + (r.pass ? " PASS  " : " FAIL  ") + r.detail + "  (" + t + ")";
}

}  // namespace otfsim
