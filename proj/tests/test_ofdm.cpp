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

#include "otfsim/ofdm_modem.hpp"
#include "test_util.hpp"

using namespace otfsim;
using namespace otfsim::test;

namespace {

OfdmGrid random_ofdm(const OfdmNumerology& num, std::mt19937_64& rng) {
    OfdmGrid x(num);
    x.re = random_cvec(x.re.size(), rng);
    return x;
}

OfdmGrid true_diagonal(const DDSpreadingFunction& chan, const OfdmNumerology& num) {
    OfdmGrid h(num);
    for (int j = 0; j < num.n_symbols; ++j) {
        const auto H = compute_ofdm_io_matrix(chan, num, j);
        for (int m = 0; m < num.n_subcarriers; ++m) h(j, m) = H(m, m);
    }
    return h;
}

double nmse_db(const OfdmGrid& est, const OfdmGrid& ref) {
    double e = 0.0, r = 0.0;
    for (size_t i = 0; i < ref.re.size(); ++i) {
        e += std::norm(est.re[i] - ref.re[i]);
        r += std::norm(ref.re[i]);
    }
    return 10.0 * std::log10(e / r);
}

}  // namespace

TEST_CASE("numerologies") {
    const auto n15 = OfdmNumerology::standard(15e3);
    CHECK(n15.n_symbols == 14);
    CHECK(n15.t_cp == doctest::Approx(4.7e-6));
    CHECK(OfdmNumerology::standard(60e3).t_cp == doctest::Approx(4.7e-6 / 4));
    const auto ext = OfdmNumerology::standard(60e3, true);
    CHECK(ext.n_symbols == 12);
    CHECK(ext.t_cp == doctest::Approx(1e-3 / 4 / 12 - 1.0 / 60e3));
    CHECK(ext.slot_duration() == doctest::Approx(0.25e-3));
    CHECK_THROWS_AS(OfdmNumerology::standard(0.0), std::invalid_argument);
}

TEST_CASE("single subcarrier is a tone across CP and body") {
    const auto num = OfdmNumerology::standard(15e3);
    OfdmGrid x(num);
    const int k = 5;
    x(0, k) = 1.0;
    const auto s = modulate_ofdm(x, num);
    const int sps = num.samples_per_symbol();
    const cplx step = std::polar(1.0, 2.0 * kPi * k / num.fft_size());
    for (int n = 0; n < sps; ++n) {
        CHECK(std::abs(s.samples[size_t(n)]) == doctest::Approx(1.0 / std::sqrt(num.fft_size())));
        if (n > 0) CHECK(std::abs(s.samples[size_t(n)] - s.samples[size_t(n - 1)] * step) < 1e-12);
    }
}

TEST_CASE("cyclic prefix repeats the end of each body") {
    std::mt19937_64 rng(30);
    const auto num = OfdmNumerology::standard(30e3);
    const auto s = modulate_ofdm(random_ofdm(num, rng), num);
    const int cp = num.cp_samples(), Nf = num.fft_size(), sps = num.samples_per_symbol();
    for (int j = 0; j < num.n_symbols; ++j)
        for (int n = 0; n < cp; ++n)
            CHECK(s.samples[size_t(j * sps + n)] == s.samples[size_t(j * sps + Nf + n)]);
}

TEST_CASE("clean round trip and integer-delay rotation") {
    std::mt19937_64 rng(31);
    for (auto [scs, ext] : {std::pair{15e3, false}, {60e3, true}}) {
        const auto num = OfdmNumerology::standard(scs, ext);
        const auto x = random_ofdm(num, rng);
        const auto s = modulate_ofdm(x, num);
        CHECK(max_abs_diff(demodulate_ofdm(s, num).re, x.re) < 1e-10);

        const double tau = 7.0 / num.sample_rate();
        REQUIRE(tau <= num.effective_cp());
        const cplx h(0.6, -0.8);
        const DDSpreadingFunction chan{{{h, tau, 0.0}}};
        const auto y = demodulate_ofdm(apply_channel_td(s, chan), num);
        for (int j = 0; j < num.n_symbols; ++j)
            for (int m = 0; m < num.n_subcarriers; ++m)
                CHECK(std::abs(y(j, m) - x(j, m) * h * std::polar(1.0, -2.0 * kPi * m * scs * tau)) < 1e-10);
        CHECK(max_abs_diff(apply_ofdm_io(chan, x, num).re, y.re) < 1e-10);
    }
}

TEST_CASE("analytic I/O matrix") {
    const auto num = OfdmNumerology::standard(15e3);
    ChannelDrawConfig cfg;
    cfg.rng_seed = 32;
    const auto H = compute_ofdm_io_matrix(draw_veh_a(cfg), num, 3);
    for (int m = 0; m < H.n; ++m)
        for (int k = 0; k < H.n; ++k)
            if (k != m) CHECK(std::abs(H(m, k)) < 1e-12);

    const DDSpreadingFunction half{{{cplx(1.0), 0.0, num.scs / 2}}};
    CHECK(std::abs(ofdm_io_coefficient(half, num, 0.0, 4, 4) - cplx(0.0, 2.0 / kPi)) < 1e-12);
    CHECK_THROWS_AS(compute_ofdm_io_matrix(half, num, 14), std::invalid_argument);
}

TEST_CASE("TD oracle at 16x oversampling with Doppler") {
    const auto num = OfdmNumerology::standard(15e3, false, 16);
    std::mt19937_64 rng(33);
    const auto x = random_ofdm(num, rng);
    ChannelDrawConfig cfg;
    cfg.nu_max = 800.0;
    cfg.rng_seed = 34;
    const auto chan = draw_veh_a(cfg);
    const auto y = demodulate_ofdm(apply_channel_td(modulate_ofdm(x, num), chan), num);
    CHECK(rel_err(y.re, apply_ofdm_io(chan, x, num).re) < 1e-3);
}

TEST_CASE("demodulated white noise has uniform per-cell variance") {
    const auto num = OfdmNumerology::standard(15e3);
    std::vector<double> per_cell(static_cast<size_t>(num.resource_elements()));
    const int trials = 150;
    for (int t = 0; t < trials; ++t) {
        TimeSignal n{add_noise_variance(CVec(size_t(num.slot_samples())), 1.0, 40 + std::uint64_t(t)),
                     num.sample_rate(), 0.5 / num.sample_rate()};
        const auto g = demodulate_ofdm(n, num);
        for (size_t i = 0; i < per_cell.size(); ++i) per_cell[i] += std::norm(g.re[i]);
    }
    double mean = 0.0;
    for (double v : per_cell) mean += v / (trials * static_cast<double>(per_cell.size()));
    CHECK(mean == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("ICI fraction and SIR") {
    CHECK(ici_off_diagonal_fraction(0.0) < 1e-20);
    const double s = std::sin(kPi * 0.25) / (kPi * 0.25);
    CHECK(ici_off_diagonal_fraction(0.25) == doctest::Approx(1.0 - s * s).epsilon(1e-10));
    const auto num = OfdmNumerology::standard(15e3);
    CHECK(ofdm_sir_db(compute_ofdm_io_matrix(DDSpreadingFunction{{{cplx(1.0), 0.0, 0.0}}}, num, 0)) > 200.0);
    const auto H = compute_ofdm_io_matrix(DDSpreadingFunction{{{cplx(1.0), 0.0, 1500.0}}}, num, 0);
    CHECK(ofdm_sir_db(H) > 10.0);
}

TEST_CASE("DMRS configuration") {
    const auto num = OfdmNumerology::standard(15e3);
    DmrsConfig d;
    d.positions = {2, 11};
    CHECK(d.pilot_count(num) == 48);
    CHECK(ofdm_data_indices(num, d).size() == size_t(14 * 48 - 48));
    CHECK(std::abs(dmrs_value(d, 2, 0)) == doctest::Approx(1.0));
    d.boost_db = 6.0;
    CHECK(std::abs(dmrs_value(d, 2, 0)) == doctest::Approx(std::pow(10.0, 0.3)));
    d.positions = {14};
    CHECK_THROWS_AS(d.validate(num), std::invalid_argument);
    d.positions = {2};
    d.comb = 5;
    CHECK_THROWS_AS(d.validate(num), std::invalid_argument);
}

TEST_CASE("DMRS channel estimation") {
    const auto num = OfdmNumerology::standard(15e3);
    std::mt19937_64 rng(35);
    DmrsConfig d;
    const CVec data = random_cvec(ofdm_data_indices(num, d).size(), rng);
    const auto x = make_ofdm_grid(num, d, data);
    CHECK_THROWS_AS(make_ofdm_grid(num, d, CVec(3)), std::invalid_argument);

    const cplx c(0.3, 0.9);
    const auto flat = estimate_channel_dmrs(apply_ofdm_io(DDSpreadingFunction{{{c, 0.0, 0.0}}}, x, num), d, num);
    for (const auto& v : flat.re) CHECK(std::abs(v - c) < 1e-12);

    ChannelDrawConfig cfg;
    cfg.rng_seed = 36;
    cfg.delay_scale = veh_a_delay_scale(1.15e-6);
    const auto sel = draw_veh_a(cfg);
    CHECK(nmse_db(estimate_channel_dmrs(apply_ofdm_io(sel, x, num), d, num), true_diagonal(sel, num)) <= -25.0);

    auto doppler_nmse = [&](double nu_max) {
        double acc = 0.0;
        for (int i = 0; i < 10; ++i) {
            cfg.nu_max = nu_max;
            cfg.rng_seed = 50 + std::uint64_t(i);
            const auto ch = draw_veh_a(cfg);
            acc += std::pow(10.0, nmse_db(estimate_channel_dmrs(apply_ofdm_io(ch, x, num), d, num),
                                          true_diagonal(ch, num)) / 10.0);
        }
        return 10.0 * std::log10(acc / 10.0);
    };
    CHECK(doppler_nmse(2000.0) >= doppler_nmse(100.0) + 10.0);
}

TEST_CASE("per-carrier MMSE equalization") {
    const auto num = OfdmNumerology::standard(15e3);
    std::mt19937_64 rng(37);
    const auto x = random_ofdm(num, rng);
    ChannelDrawConfig cfg;
    cfg.rng_seed = 38;
    const auto chan = draw_veh_a(cfg);
    const auto y = apply_ofdm_io(chan, x, num);
    CHECK(max_abs_diff(mmse_equalize_per_carrier(y, true_diagonal(chan, num), 0.0).re, x.re) < 1e-9);

    // With Doppler the residual error after equalization is the ICI floor.
    cfg.nu_max = 2000.0;
    const auto fast = draw_veh_a(cfg);
    const auto h = true_diagonal(fast, num);
    const auto yf = apply_ofdm_io(fast, x, num);
    double sig = 0.0, err = 0.0, sir_lin = 0.0;
    for (size_t i = 0; i < x.re.size(); ++i) {
        sig += std::norm(h.re[i] * x.re[i]);
        err += std::norm(yf.re[i] - h.re[i] * x.re[i]);
    }
    for (int j = 0; j < num.n_symbols; ++j) sir_lin += std::pow(10.0, ofdm_sir_db(compute_ofdm_io_matrix(fast, num, j)) / 10.0);
    const double measured = 10.0 * std::log10(sig / err);
    CHECK(std::abs(measured - 10.0 * std::log10(sir_lin / num.n_symbols)) <= 1.0);
}

TEST_CASE("overheads") {
    DmrsConfig none;
    none.positions.clear();
    CHECK(ofdm_overheads(OfdmNumerology::standard(15e3), none).cp_fraction == doctest::Approx(0.066).epsilon(0.01));
    OfdmNumerology bare;
    bare.t_cp = 0.0;
    const auto o = ofdm_overheads(bare, none);
    CHECK(o.cp_fraction == 0.0);
    CHECK(o.pilot_fraction == 0.0);

    double prev = 0.0;
    for (double nu_s : {1e3, 2e3, 3e3, 4e3}) {
        const double t = ofdm_overhead_policy(1.15e-6, nu_s).overheads.total_fraction;
        CHECK(t > prev);
        prev = t;
    }
    CHECK(std::abs(ofdm_overhead_policy(1.15e-6, 1e3).overheads.total_fraction - 0.0768) <= 0.01);
    CHECK(std::abs(prev - 0.264) <= 0.01);
}
