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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "otfsim/zak_modem.hpp"
#include "test_util.hpp"

#include <Eigen/Dense>

using namespace otfsim;
using namespace otfsim::test;

namespace {

const FrameDims kDims56 = FrameDims::from_doppler_period(672e3, 1e-3, 12e3);

}  // namespace

TEST_CASE("allocation names") {
    for (int n = 1; n <= 5; ++n) {
        const auto a = static_cast<Allocation>(n);
        CHECK(allocation_from_string(to_string(a)) == a);
        CHECK(allocation_from_string(std::to_string(n)) == a);
    }
    CHECK_THROWS_AS(allocation_from_string("VI"), std::invalid_argument);
}

TEST_CASE("layout overhead follows (2 k_max + 2(5 - n) + 1) / M") {
    for (int M : {56, 112, 336})
        for (double tau : {0.0, 1.15e-6, 2.3e-6, 4.7e-6})
            for (int n = 1; n <= 5; ++n) {
                const FrameDims d = FrameDims::from_bins(M, 672 / M, 672e3);
                const auto lay = build_layout(d, tau, static_cast<Allocation>(n));
                const int k_max = static_cast<int>(std::ceil(672e3 * tau - 1e-9));
                CHECK(lay.k_max == k_max);
                CHECK(lay.overhead() == doctest::Approx(double(2 * k_max + 2 * (5 - n) + 1) / M));
                const size_t non_data = lay.pilot_cells.size() + lay.guard_cells.size();
                CHECK(non_data == static_cast<size_t>(lay.strip_width * d.N));
                CHECK(lay.data_cells.size() + non_data == static_cast<size_t>(d.size()));
                CHECK(lay.role(lay.k_p, lay.l_p) == CellRole::Pilot);
            }
    CHECK(build_layout(kDims56, 0.0, Allocation::V).overhead() == doctest::Approx(1.0 / 56));
    CHECK_THROWS_AS(build_layout(FrameDims::from_bins(8, 4, 672e3), 4.7e-6, Allocation::I), std::invalid_argument);
    CHECK_THROWS_AS(build_layout(kDims56, -1e-6, Allocation::I), std::invalid_argument);
}

TEST_CASE("crystallization condition") {
    CHECK(check_crystallization(FrameDims::from_doppler_period(672e3, 1e-3, 2e3), 4.7e-6, 200.0));
    CHECK_FALSE(check_crystallization(FrameDims::from_doppler_period(672e3, 1e-3, 1e3), 2.51e-6, 1600.0));
    CHECK(check_crystallization(FrameDims::from_bins(2, 2, 1e3), 0.0, 0.0));
}

TEST_CASE("pilot grid, data placement and PNR") {
    const auto lay = build_layout(kDims56, 4.7e-6, Allocation::IV);
    CHECK(make_pilot_grid(lay, kNoPilot).energy() == 0.0);
    const auto p = make_pilot_grid(lay, -5.0);
    CHECK(p.energy() == doctest::Approx(std::pow(10.0, -0.5) * lay.data_count()));
    CHECK(std::norm(p(lay.k_p, lay.l_p)) == doctest::Approx(p.energy()));

    std::mt19937_64 rng(20);
    const CVec sym = random_cvec(lay.data_cells.size(), rng);
    const auto g = place_data(lay, sym);
    CHECK(extract_data(lay, g) == sym);
    for (int i : lay.guard_cells) CHECK(g.cells()[static_cast<size_t>(i)] == cplx{});
    CHECK_THROWS_AS(place_data(lay, CVec(3)), std::invalid_argument);

    CHECK(effective_pnr_db(-10, 12, 500e-6, 4.7e-6) == doctest::Approx(19.26).epsilon(1e-3));
    CHECK(effective_pnr_db(-15, 12, 500e-6, 4.7e-6) == doctest::Approx(14.26).epsilon(1e-3));
    CHECK(zak_strip_overhead(2.5e-6, 200e-6) == doctest::Approx(0.025));
}

TEST_CASE("modulator: empty grid and pulsone") {
    const FrameDims d = FrameDims::from_bins(16, 4, 64e3);
    const ZakModem modem(d, PulseShape::sinc());
    for (const auto& v : modem.modulate(QuasiPeriodicGrid(d)).samples) CHECK(v == cplx{});

    for (int l0 : {0, 1}) {
        QuasiPeriodicGrid g(d);
        g(0, l0) = 1.0;
        const TimeSignal s = modem.modulate(g);
        // The frame is centred on t = 0; the pulse train peaks at t = n tau_p
        // and the outer peaks are tapered by the frame edges.
        std::vector<cplx> peaks;
        for (int n = -1; n <= 1; ++n) {
            const long long idx = std::llround((n * d.tau_p() - s.t0) * s.sample_rate);
            REQUIRE(idx >= 2);
            REQUIRE(idx + 2 < static_cast<long long>(s.samples.size()));
            const double a = std::abs(s.samples[static_cast<size_t>(idx)]);
            CHECK(a > std::abs(s.samples[static_cast<size_t>(idx + 1)]));
            CHECK(a > std::abs(s.samples[static_cast<size_t>(idx - 1)]));
            CHECK(a > 0.2);
            peaks.push_back(s.samples[static_cast<size_t>(idx)]);
        }
        for (size_t n = 1; n < peaks.size(); ++n) {
            const cplx ratio = peaks[n] / peaks[n - 1];
            CHECK(std::abs(ratio - std::polar(1.0, 2.0 * kPi * l0 / d.N)) < 1e-3);
        }
        // Midway between peaks the train is small.
        const long long mid = std::llround((0.5 * d.tau_p() - s.t0) * s.sample_rate);
        CHECK(std::abs(s.samples[static_cast<size_t>(mid)]) < 0.05);
    }
}

TEST_CASE("identity channel: demodulate(modulate(x)) = h_self * x") {
    std::mt19937_64 rng(21);
    for (const auto& p : {PulseShape::sinc(), PulseShape::gauss(), PulseShape::gauss_sinc()}) {
        const ZakModem modem(kDims56, p);
        const auto x = random_grid(kDims56, rng);
        const auto y = modem.demodulate(modem.modulate(x));
        const auto ref = discrete_twisted_convolve(self_interaction(p, kDims56), x);
        CHECK(rel_err(y.cells(), ref.cells()) < 1e-4);
        CHECK(modem.demodulate(TimeSignal{CVec(modem.tx_length()), modem.sample_rate(), modem.t0()}).energy() == 0.0);
    }
    CHECK(dominant_tap_fraction(self_interaction(PulseShape::sinc(), kDims56)) >= 0.99);
}

TEST_CASE("demodulated white noise stays white") {
    const ZakModem modem(kDims56, PulseShape::gauss_sinc());
    double sum = 0.0, sum_sq = 0.0;
    long long cells = 0;
    for (int f = 0; f < 150; ++f) {
        TimeSignal n{add_noise_variance(CVec(modem.tx_length()), 1.0, 100 + static_cast<std::uint64_t>(f)),
                     modem.sample_rate(), modem.t0()};
        for (const auto& v : modem.demodulate(n).cells()) {
            sum += std::norm(v);
            sum_sq += std::norm(v) * std::norm(v);
            ++cells;
        }
    }
    // Unit-variance samples at rate Q B give unit-variance DD cells.
    CHECK(sum / cells == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("acquisition: single integer delay and Veh-A") {
    const auto lay = build_layout(kDims56, 4.7e-6, Allocation::I);
    const auto pilot = make_pilot_grid(lay, 0.0);
    const PulseShape p = PulseShape::gauss_sinc();
    const DDSpreadingFunction one{{{cplx(1.0), 3.0 / 672e3, 0.0}}};
    const auto h = ground_truth_heff(one, p, kDims56);
    const auto est = acquire_channel(discrete_twisted_convolve(h, pilot), lay, pilot(lay.k_p, lay.l_p));
    double best = 0.0;
    std::pair<int, int> at{};
    for (const auto& [kl, v] : est.filter.taps)
        if (std::abs(v) > best) {
            best = std::abs(v);
            at = kl;
        }
    CHECK(at == std::pair{3, 0});

    ChannelDrawConfig cfg;
    cfg.nu_max = 800.0;
    cfg.rng_seed = 22;
    const auto hv = ground_truth_heff(draw_veh_a(cfg), PulseShape::gauss(), kDims56);
    const auto lay1 = build_layout(kDims56, 2.51e-6, Allocation::I);
    const auto pil1 = make_pilot_grid(lay1, 0.0);
    AcquisitionOptions acq;
    acq.delay_margin = acq.doppler_margin = 3;
    const auto e1 = acquire_channel(discrete_twisted_convolve(hv, pil1), lay1, pil1(lay1.k_p, lay1.l_p), acq);
    CHECK(filter_nmse_db(e1.filter, hv) <= -40.0);

    const FrameDims d1 = FrameDims::from_doppler_period(672e3, 1e-3, 1e3);
    const auto hb = ground_truth_heff(draw_veh_a(cfg), PulseShape::gauss(), d1);
    const auto lay2 = build_layout(d1, 2.51e-6, Allocation::I);
    const auto pil2 = make_pilot_grid(lay2, 0.0);
    const auto e2 = acquire_channel(discrete_twisted_convolve(hb, pil2), lay2, pil2(lay2.k_p, lay2.l_p), acq);
    CHECK(filter_nmse_db(e2.filter, hb) >= filter_nmse_db(e1.filter, hv) + 10.0);
}

TEST_CASE("TD pilot read-off agrees with the quadrature effective channel") {
    const auto lay = build_layout(kDims56, 2.51e-6, Allocation::I);
    const auto pilot = make_pilot_grid(lay, 0.0);
    const PulseShape p = PulseShape::gauss_sinc();
    ChannelDrawConfig cfg;
    cfg.nu_max = 400.0;
    cfg.rng_seed = 23;
    const auto chan = draw_veh_a(cfg);
    const ZakModem modem(kDims56, p);
    const auto y = modem.demodulate(apply_channel_td(modem.modulate(pilot), chan));
    const auto ref = discrete_twisted_convolve(ground_truth_heff(chan, p, kDims56), pilot);
    CHECK(rel_err(y.cells(), ref.cells()) < 1e-3);
}

TEST_CASE("LSMR equalizer") {
    const FrameDims d = FrameDims::from_bins(8, 4, 672e3);
    const auto lay = build_layout(d, 1.0 / 672e3, Allocation::V);
    const auto pilot = make_pilot_grid(lay, 0.0);
    std::mt19937_64 rng(24);
    const CVec x = random_cvec(lay.data_cells.size(), rng);

    SUBCASE("identity channel, no noise") {
        EffectiveChannelEstimate est;
        est.filter = DiscreteDDFilter::identity();
        QuasiPeriodicGrid rx = place_data(lay, x);
        rx += pilot;
        const auto r = lsmr_equalize(rx, est, lay, pilot, 0.0);
        CHECK(max_abs_diff(r.symbols, x) < 1e-10);
        CHECK(r.iterations <= 2);
    }

    SUBCASE("dense regularized least squares oracle") {
        EffectiveChannelEstimate est;
        est.filter.add(0, 0, cplx(1.0, 0.2));
        est.filter.add(1, 0, cplx(0.4, -0.3));
        est.filter.add(0, 1, cplx(-0.2, 0.1));
        est.filter.add(1, -1, cplx(0.1, 0.1));
        QuasiPeriodicGrid rx = discrete_twisted_convolve(est.filter, place_data(lay, x));
        rx += discrete_twisted_convolve(est.filter, pilot);
        rx += random_grid(d, rng) *= cplx(0.1);
        const double nv = 0.05;

        // Dense A over the non-pilot observations.
        std::vector<int> obs;
        for (int i = 0; i < d.size(); ++i)
            if (lay.roles[static_cast<size_t>(i)] != CellRole::Pilot) obs.push_back(i);
        const auto n = static_cast<Eigen::Index>(x.size());
        Eigen::MatrixXcd A(static_cast<Eigen::Index>(obs.size()), n);
        for (Eigen::Index c = 0; c < n; ++c) {
            CVec e(x.size());
            e[static_cast<size_t>(c)] = 1.0;
            const auto col = discrete_twisted_convolve(est.filter, place_data(lay, e));
            for (size_t r = 0; r < obs.size(); ++r) A(static_cast<Eigen::Index>(r), c) = col.cells()[size_t(obs[r])];
        }
        QuasiPeriodicGrid y = rx;
        y -= discrete_twisted_convolve(est.filter, pilot);
        Eigen::VectorXcd b(static_cast<Eigen::Index>(obs.size()));
        for (size_t r = 0; r < obs.size(); ++r) b(static_cast<Eigen::Index>(r)) = y.cells()[size_t(obs[r])];
        const Eigen::MatrixXcd G = A.adjoint() * A + nv * Eigen::MatrixXcd::Identity(n, n);
        const Eigen::VectorXcd ref = G.ldlt().solve(A.adjoint() * b);

        LsmrOptions opts;
        opts.max_iter = 500;
        opts.atol = opts.btol = 1e-14;
        const auto r = lsmr_equalize(rx, est, lay, pilot, nv, opts);
        CHECK(max_abs_diff(r.symbols, CVec(ref.data(), ref.data() + n)) < 1e-6);
    }
    CHECK_THROWS_AS(lsmr_equalize(QuasiPeriodicGrid(kDims56), {}, lay, pilot, 0.0), std::invalid_argument);
}
