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

#include "test_util.hpp"

using namespace otfsim;
using namespace otfsim::test;

namespace {

// DZT straight from its defining sum.
QuasiPeriodicGrid dzt_oracle(const CVec& td, const FrameDims& d) {
    QuasiPeriodicGrid out(d);
    for (int k = 0; k < d.M; ++k)
        for (int l = 0; l < d.N; ++l) {
            cplx acc{};
            for (int n = 0; n < d.N; ++n)
                acc += td[static_cast<size_t>(k + n * d.M)] * std::polar(1.0, -2.0 * kPi * n * l / d.N);
            out(k, l) = acc / std::sqrt(static_cast<double>(d.N));
        }
    return out;
}

QuasiPeriodicGrid twisted_oracle(const DiscreteDDFilter& h, const QuasiPeriodicGrid& x) {
    const FrameDims& d = x.dims();
    QuasiPeriodicGrid out(d);
    for (int k = 0; k < d.M; ++k)
        for (int l = 0; l < d.N; ++l)
            for (const auto& [kl, v] : h.taps)
                out(k, l) += v * x.at(k - kl.first, l - kl.second) *
                             std::polar(1.0, 2.0 * kPi * kl.second * (k - kl.first) / (d.M * d.N));
    return out;
}

DiscreteDDFilter random_filter(std::mt19937_64& rng, int taps, int reach) {
    std::uniform_int_distribution<int> pos(-reach, reach);
    std::normal_distribution<double> g;
    DiscreteDDFilter h;
    for (int i = 0; i < taps; ++i) h.add(pos(rng), pos(rng), cplx(g(rng), g(rng)));
    return h;
}

}  // namespace

TEST_CASE("floor_div and pos_mod round toward minus infinity") {
    CHECK(floor_div(-1, 4) == -1);
    CHECK(floor_div(-4, 4) == -1);
    CHECK(floor_div(7, 4) == 1);
    CHECK(pos_mod(-1, 4) == 3);
    CHECK(pos_mod(8, 4) == 0);
}

TEST_CASE("frame dims from the Doppler period") {
    const FrameDims d = FrameDims::from_doppler_period(672e3, 1e-3, 12e3);
    CHECK(d.M == 56);
    CHECK(d.N == 12);
    CHECK(d.tau_p() == doctest::Approx(1.0 / 12e3));
    const FrameDims d2 = FrameDims::from_doppler_period(672e3, 1e-3, 2e3);
    CHECK(d2.M == 336);
    CHECK(d2.N == 2);
    CHECK_THROWS_AS(FrameDims::from_doppler_period(672e3, 1e-3, 5e3), std::invalid_argument);
    CHECK_THROWS_AS(FrameDims::from_bins(0, 4, 1e3), std::invalid_argument);
}

TEST_CASE("DZT of a 1x1 frame is the identity") {
    const FrameDims d = FrameDims::from_bins(1, 1, 1e3);
    const CVec td{cplx(0.3, -2.0)};
    CHECK(discrete_zak_transform(td, d)(0, 0) == td[0]);
}

TEST_CASE("DZT of a time impulse occupies one delay column") {
    const FrameDims d = FrameDims::from_bins(8, 4, 1e3);
    CVec td(32);
    td[5] = 1.0;
    const auto g = discrete_zak_transform(td, d);
    for (int k = 0; k < 8; ++k)
        for (int l = 0; l < 4; ++l) CHECK(std::abs(g(k, l)) == doctest::Approx(k == 5 ? 0.5 : 0.0));
}

TEST_CASE("inverse DZT of a single cell") {
    const FrameDims d = FrameDims::from_bins(2, 2, 1e3);
    QuasiPeriodicGrid g(d);
    g(0, 0) = 1.0;
    const CVec td = inverse_discrete_zak_transform(g);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(max_abs_diff(td, CVec{s, 0.0, s, 0.0}) < 1e-15);
}

TEST_CASE("DZT matches the direct sum and round-trips") {
    std::mt19937_64 rng(3);
    for (auto [M, N] : {std::pair{56, 12}, {7, 5}, {3, 1}}) {
        const FrameDims d = FrameDims::from_bins(M, N, 672e3);
        const CVec td = random_cvec(static_cast<size_t>(M * N), rng);
        const auto g = discrete_zak_transform(td, d);
        CHECK(max_abs_diff(g.cells(), dzt_oracle(td, d).cells()) < 1e-12);
        CHECK(max_abs_diff(inverse_discrete_zak_transform(g), td) < 1e-12);
        const auto r = random_grid(d, rng);
        CHECK(max_abs_diff(discrete_zak_transform(inverse_discrete_zak_transform(r), d).cells(), r.cells()) < 1e-12);
    }
    CHECK_THROWS_AS(discrete_zak_transform(CVec(5), FrameDims::from_bins(2, 2, 1e3)), std::invalid_argument);
}

TEST_CASE("quasi-periodic extension") {
    std::mt19937_64 rng(4);
    const FrameDims d = FrameDims::from_bins(5, 3, 1e3);
    const auto x = random_grid(d, rng);
    for (int k = -12; k < 12; ++k)
        for (int l = -7; l < 7; ++l) {
            // x[k + nM, l + mN] = exp(j 2 pi n l / N) x[k, l]
            CHECK(std::abs(x.at(k + d.M, l) - std::polar(1.0, 2.0 * kPi * l / d.N) * x.at(k, l)) < 1e-12);
            CHECK(std::abs(x.at(k, l + d.N) - x.at(k, l)) < 1e-12);
        }
}

TEST_CASE("twisted convolution: hand-evaluated cases") {
    const FrameDims d = FrameDims::from_bins(2, 2, 1e3);
    QuasiPeriodicGrid x(d);
    x(0, 0) = 1.0;
    DiscreteDDFilter h;
    h.add(1, 0, 1.0);
    const auto y = discrete_twisted_convolve(h, x);
    CHECK(std::abs(y(1, 0) - cplx(1.0)) < 1e-15);
    CHECK(std::abs(y(0, 0)) + std::abs(y(0, 1)) + std::abs(y(1, 1)) < 1e-15);

    std::mt19937_64 rng(5);
    const auto z = random_grid(FrameDims::from_bins(6, 4, 1e3), rng);
    CHECK(max_abs_diff(discrete_twisted_convolve(DiscreteDDFilter::identity(), z).cells(), z.cells()) == 0.0);
}

TEST_CASE("twisted convolution matches the direct sum, including wrapped taps") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 20; ++t) {
        const FrameDims d = FrameDims::from_bins(3 + t % 5, 2 + t % 3, 1e3);
        const auto h = random_filter(rng, 6, 9);
        const auto x = random_grid(d, rng);
        CHECK(max_abs_diff(discrete_twisted_convolve(h, x).cells(), twisted_oracle(h, x).cells()) < 1e-11);
    }
}

TEST_CASE("adjoint satisfies <y, H x> = <H^* y, x>") {
    std::mt19937_64 rng(7);
    const FrameDims d = FrameDims::from_bins(9, 4, 1e3);
    const auto h = random_filter(rng, 8, 6);
    const auto x = random_grid(d, rng), y = random_grid(d, rng);
    const cplx a = inner(y.cells(), discrete_twisted_convolve(h, x).cells());
    const cplx b = inner(discrete_twisted_convolve_adjoint(h, y).cells(), x.cells());
    CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
}

TEST_CASE("filter composition") {
    const FrameDims d = FrameDims::from_bins(8, 4, 1e3);
    DiscreteDDFilter dl, dk;
    dl.add(0, 1, 1.0);
    dk.add(1, 0, 1.0);
    const auto a = compose_filters(dl, dk, d);
    const auto b = compose_filters(dk, dl, d);
    REQUIRE(a.taps.size() == 1);
    REQUIRE(b.taps.size() == 1);
    CHECK(std::abs(a.get(1, 1) - std::polar(1.0, 2.0 * kPi / 32.0)) < 1e-15);
    CHECK(std::abs(b.get(1, 1) - cplx(1.0)) < 1e-15);

    std::mt19937_64 rng(8);
    const auto h = random_filter(rng, 5, 3);
    const auto hi = compose_filters(h, DiscreteDDFilter::identity(), d);
    const auto ih = compose_filters(DiscreteDDFilter::identity(), h, d);
    for (const auto& [kl, v] : h.taps) {
        CHECK(std::abs(hi.get(kl.first, kl.second) - v) < 1e-15);
        CHECK(std::abs(ih.get(kl.first, kl.second) - v) < 1e-15);
    }

    for (int t = 0; t < 20; ++t) {
        const auto h1 = random_filter(rng, 3, 4), h2 = random_filter(rng, 3, 4);
        const auto x = random_grid(d, rng);
        const auto lhs = discrete_twisted_convolve(compose_filters(h1, h2, d), x);
        const auto rhs = discrete_twisted_convolve(h1, discrete_twisted_convolve(h2, x));
        CHECK(max_abs_diff(lhs.cells(), rhs.cells()) < 1e-10);
    }
}

TEST_CASE("filter support, energy and pruning") {
    DiscreteDDFilter h;
    h.add(-2, 1, 2.0);
    h.add(3, -1, cplx(0, 1));
    h.add(0, 0, 1e-4);
    const auto b = h.support();
    CHECK(b.k_min == -2);
    CHECK(b.k_max == 3);
    CHECK(b.l_min == -1);
    CHECK(b.l_max == 1);
    CHECK(h.energy() == doctest::Approx(5.0 + 1e-8));
    h.prune(1e-3);
    CHECK(h.taps.size() == 2);
}
