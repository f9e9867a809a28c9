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

#include "otfsim/channel_model.hpp"
#include "otfsim/link_layer.hpp"

#include <random>
#include <set>

using namespace otfsim;

namespace {

Bits random_bits(size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Bits b(n);
    for (auto& v : b) v = static_cast<std::uint8_t>(rng() & 1U);
    return b;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

long long bit_errors(const Bits& a, const Bits& b) {
    long long e = 0;
    for (size_t i = 0; i < a.size(); ++i) e += a[i] != b[i];
    return e;
}

}  // namespace

TEST_CASE("QPSK Gray table") {
    const double s = 1.0 / std::sqrt(2.0);
    const CVec q = map_qam(Bits{0, 0, 0, 1, 1, 0, 1, 1}, 4);
    CHECK(std::abs(q[0] - cplx(s, s)) < 1e-15);
    CHECK(std::abs(q[1] - cplx(s, -s)) < 1e-15);
    CHECK(std::abs(q[2] - cplx(-s, s)) < 1e-15);
    CHECK(std::abs(q[3] - cplx(-s, -s)) < 1e-15);
}

TEST_CASE("square QAM: unit energy, Gray neighbours, noiseless round trip") {
    for (int order : {4, 16, 64}) {
        const int bps = bits_per_symbol(order);
        Bits all;
        for (int v = 0; v < order; ++v)
            for (int b = bps - 1; b >= 0; --b) all.push_back(static_cast<std::uint8_t>((v >> b) & 1));
        const CVec pts = map_qam(all, order);
        double e = 0.0;
        for (const auto& p : pts) e += std::norm(p);
        CHECK(e / order == doctest::Approx(1.0));

        // Nearest neighbours differ in exactly one bit.
        const double dmin = 2.0 / std::sqrt(2.0 * (order - 1) / 3.0);
        for (int a = 0; a < order; ++a)
            for (int b = 0; b < order; ++b)
                if (std::abs(std::abs(pts[size_t(a)] - pts[size_t(b)]) - dmin) < 1e-9)
                    CHECK(__builtin_popcount(static_cast<unsigned>(a ^ b)) == 1);

        const Bits bits = random_bits(size_t(bps) * 500, 60 + std::uint64_t(order));
        CHECK(hard_decision(demap_qam(map_qam(bits, order), order, 0.1)) == bits);
    }
    CHECK_THROWS_AS(map_qam(Bits{0, 1, 1}, 4), std::invalid_argument);
    CHECK_THROWS_AS(bits_per_symbol(8), std::invalid_argument);
}

TEST_CASE("uncoded QPSK over AWGN matches Q(sqrt(2 Eb/N0))") {
    const double ebn0 = std::pow(10.0, 0.7);
    const double nv = 1.0 / (2.0 * ebn0);  // Es = 1 = 2 Eb
    const Bits bits = random_bits(1'000'000, 61);
    const CVec rx = add_noise_variance(map_qam(bits, 4), nv, 62);
    const double ber = double(bit_errors(hard_decision(demap_qam(rx, 4, nv)), bits)) / double(bits.size());
    CHECK(ber == doctest::Approx(q_function(std::sqrt(2.0 * ebn0))).epsilon(0.1));
}

TEST_CASE("convolutional code: lengths and noiseless decoding") {
    for (CodeRate r : {CodeRate{1, 2}, CodeRate{2, 3}, CodeRate{3, 4}, CodeRate{5, 6}}) {
        const ConvolutionalCode code(r);
        for (size_t n : {size_t{1}, size_t{37}, size_t{600}}) {
            const Bits info = random_bits(n, 63 + n);
            const Bits cw = code.encode(info);
            CHECK(cw.size() == code.coded_length(n));
            std::vector<double> llr(cw.size());
            for (size_t i = 0; i < cw.size(); ++i) llr[i] = cw[i] ? -4.0 : 4.0;
            CHECK(code.decode(llr, n) == info);
        }
        CHECK(code.coded_length(1200) == doctest::Approx(1206 / r.value()).epsilon(0.01));
        const size_t k = code.max_info_bits(1000);
        CHECK(code.coded_length(k) <= 1000);
        CHECK(code.coded_length(k + 1) > 1000);
    }
    CHECK(ConvolutionalCode(CodeRate{1, 2}).coded_length(10) == 32);
    CHECK_THROWS_AS(ConvolutionalCode(CodeRate{4, 5}), std::invalid_argument);

    const Bits zeros(500, 0);
    const Bits cw = fec_encode(zeros, CodeRate{1, 2});
    for (auto b : cw) CHECK(b == 0);
}

TEST_CASE("rate 1/2 soft decoding at Eb/N0 = 4 dB") {
    const double ebn0 = std::pow(10.0, 0.4);
    const double nv = 1.0 / ebn0;  // QPSK, rate 1/2: Es = Eb
    long long errors = 0, total = 0;
    for (int blk = 0; blk < 100; ++blk) {
        const Bits info = random_bits(10'000, 70 + std::uint64_t(blk));
        const Bits cw = fec_encode(info, CodeRate{1, 2});
        const CVec rx = add_noise_variance(map_qam(cw, 4), nv, 500 + std::uint64_t(blk));
        errors += bit_errors(fec_decode(demap_qam(rx, 4, nv), CodeRate{1, 2}, info.size()), info);
        total += static_cast<long long>(info.size());
    }
    CHECK(double(errors) / double(total) <= 3e-4);
}

TEST_CASE("interleaver") {
    const auto p = interleaver_permutation(1000);
    CHECK(std::set<size_t>(p.begin(), p.end()).size() == 1000);
    CHECK(*std::max_element(p.begin(), p.end()) == 999);
    CHECK(interleaver_permutation(1000) == p);
    size_t fixed = 0;
    for (size_t i = 0; i < p.size(); ++i) fixed += p[i] == i;
    CHECK(fixed < 20);

    const Bits b = random_bits(777, 80);
    const Bits x = interleave(b);
    std::vector<double> llr(x.size());
    for (size_t i = 0; i < x.size(); ++i) llr[i] = x[i] ? -1.0 : 1.0;
    CHECK(hard_decision(deinterleave(llr)) == b);
}

TEST_CASE("MCS ladder and selection") {
    const auto& ladder = mcs_ladder();
    REQUIRE(ladder.size() == 12);
    CHECK(ladder.front().qam_order == 4);
    CHECK(ladder.front().rate == CodeRate{1, 2});
    for (size_t i = 1; i < ladder.size(); ++i) CHECK(ladder[i].info_rate() >= ladder[i - 1].info_rate());
    CHECK(ladder.back().info_rate() == doctest::Approx(5.0));

    const std::vector<double> zeros(12, 0.0), ones(12, 1.0);
    CHECK(select_mcs(zeros) == 11);
    CHECK_FALSE(select_mcs(ones).has_value());
    const std::vector<double> five{0.01, 0.05, 0.09, 0.3, 0.9};
    CHECK(select_mcs(five) == 2);
    CHECK_THROWS_AS(select_mcs(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("spectral efficiency and overheads") {
    CHECK(zak_spectral_efficiency(1.0, 1000, 672e3, 1e-3, 0.0) == 0.0);
    CHECK(zak_spectral_efficiency(0.1, 672, 672e3, 1e-3, 0.0) == doctest::Approx(0.9));
    CHECK(ofdm_spectral_efficiency(0.0, 720) == doctest::Approx(1.0));
    CHECK(ofdm_spectral_efficiency(1.0, 720) == 0.0);
    CHECK(zak_guard_overhead(4.7e-6, 1e-3) == doctest::Approx(0.00468).epsilon(1e-3));
    CHECK(zak_guard_overhead(0.0, 1e-3) == 0.0);
    CHECK(zak_guard_overhead(1e-3, 1e-3) == doctest::Approx(0.5));
}

TEST_CASE("BLER counter stopping rule") {
    BlerCounter c;
    CHECK(c.bler() == 1.0);
    for (int i = 0; i < 19; ++i) c.add(3, 100);
    CHECK_FALSE(c.done());
    c.add(1, 100);
    CHECK(c.done());
    CHECK(c.bler() == 1.0);
    BlerCounter clean;
    while (!clean.done()) clean.add(0, 100);
    CHECK(clean.frames == 200);
    CHECK(clean.bler() == 0.0);
    CHECK(clean.ber() == 0.0);
}
