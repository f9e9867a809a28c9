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

#include "otfsim/dd_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace otfsim {

namespace {

bool near_integer(double v, double rel) {
    return std::abs(v - std::round(v)) <= rel * std::max(1.0, std::abs(v));
}

}  // namespace

// ----- FrameDims -----------------------------------------------------------

FrameDims FrameDims::from_doppler_period(double bandwidth, double duration, double nu_p) {
    if (bandwidth <= 0.0 || duration <= 0.0 || nu_p <= 0.0)
        throw std::invalid_argument("FrameDims: B, T and nu_p must be positive");
    const double m = bandwidth / nu_p;
    const double n = duration * nu_p;
    if (!near_integer(m, 1e-9) || !near_integer(n, 1e-9))
        throw std::invalid_argument("FrameDims: B*tau_p and T*nu_p must be integers (B=" +
                                    std::to_string(bandwidth) + ", T=" + std::to_string(duration) +
                                    ", nu_p=" + std::to_string(nu_p) + ")");
    FrameDims d;
    d.M = static_cast<int>(std::lround(m));
    d.N = static_cast<int>(std::lround(n));
    d.bandwidth = bandwidth;
    d.duration = duration;
    d.validate();
    return d;
}

FrameDims FrameDims::from_bins(int M, int N, double bandwidth) {
    FrameDims d;
    d.M = M;
    d.N = N;
    d.bandwidth = bandwidth;
    d.duration = static_cast<double>(M) * N / bandwidth;
    d.validate();
    return d;
}

void FrameDims::validate() const {
    if (M <= 0 || N <= 0) throw std::invalid_argument("FrameDims: M and N must be positive");
    if (bandwidth <= 0.0 || duration <= 0.0)
        throw std::invalid_argument("FrameDims: B and T must be positive");
    if (std::abs(tau_p() * nu_p() - 1.0) > 1e-12 * 16)
        throw std::invalid_argument("FrameDims: tau_p * nu_p != 1");
    if (std::lround(bandwidth * duration) != static_cast<long>(M) * N ||
        !near_integer(bandwidth * duration, 1e-9))
        throw std::invalid_argument("FrameDims: M*N != B*T");
}

bool operator==(const FrameDims& a, const FrameDims& b) {
    return a.M == b.M && a.N == b.N && a.bandwidth == b.bandwidth && a.duration == b.duration;
}

// ----- QuasiPeriodicGrid ---------------------------------------------------

QuasiPeriodicGrid::QuasiPeriodicGrid(const FrameDims& dims)
    : dims_(dims), cells_(static_cast<size_t>(dims.M) * dims.N) {}

QuasiPeriodicGrid::QuasiPeriodicGrid(const FrameDims& dims, CVec cells)
    : dims_(dims), cells_(std::move(cells)) {
    if (cells_.size() != static_cast<size_t>(dims.M) * dims.N)
        throw std::invalid_argument("QuasiPeriodicGrid: cell count does not match M*N");
}

cplx QuasiPeriodicGrid::at(long long k, long long l) const {
    const long long M = dims_.M, N = dims_.N;
    const long long n = floor_div(k, M);
    const long long kk = k - n * M;
    const long long ll = pos_mod(l, N);
    const cplx v = cells_[static_cast<size_t>(kk * N + ll)];
    if (n == 0) return v;
    const long long r = pos_mod(n * ll, N);
    if (r == 0) return v;
    const double ang = 2.0 * kPi * static_cast<double>(r) / static_cast<double>(N);
    return v * cplx(std::cos(ang), std::sin(ang));
}

double QuasiPeriodicGrid::energy() const {
    double e = 0.0;
    for (const auto& c : cells_) e += std::norm(c);
    return e;
}

QuasiPeriodicGrid& QuasiPeriodicGrid::operator+=(const QuasiPeriodicGrid& other) {
    if (!(other.dims_ == dims_)) throw std::invalid_argument("grid dims mismatch");
    for (size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
    return *this;
}

QuasiPeriodicGrid& QuasiPeriodicGrid::operator-=(const QuasiPeriodicGrid& other) {
    if (!(other.dims_ == dims_)) throw std::invalid_argument("grid dims mismatch");
    for (size_t i = 0; i < cells_.size(); ++i) cells_[i] -= other.cells_[i];
    return *this;
}

QuasiPeriodicGrid& QuasiPeriodicGrid::operator*=(cplx s) {
    for (auto& c : cells_) c *= s;
    return *this;
}

// ----- DiscreteDDFilter ----------------------------------------------------

cplx DiscreteDDFilter::get(int k, int l) const {
    auto it = taps.find({k, l});
    return it == taps.end() ? cplx{} : it->second;
}

DiscreteDDFilter::Box DiscreteDDFilter::support() const {
    Box b;
    bool first = true;
    for (const auto& [kl, v] : taps) {
        if (v == cplx{}) continue;
        const auto [k, l] = kl;
        if (first) {
            b = {k, k, l, l};
            first = false;
            continue;
        }
        b.k_min = std::min(b.k_min, k);
        b.k_max = std::max(b.k_max, k);
        b.l_min = std::min(b.l_min, l);
        b.l_max = std::max(b.l_max, l);
    }
    return b;
}

double DiscreteDDFilter::energy() const {
    double e = 0.0;
    for (const auto& [kl, v] : taps) e += std::norm(v);
    return e;
}

void DiscreteDDFilter::prune(double rel) {
    double peak = 0.0;
    for (const auto& [kl, v] : taps) peak = std::max(peak, std::abs(v));
    const double thr = rel * peak;
    std::erase_if(taps, [thr](const auto& kv) { return std::abs(kv.second) <= thr; });
}

// ----- PhaseTable ----------------------------------------------------------

PhaseTable::PhaseTable(long long period) : period_(period), table_(static_cast<size_t>(period)) {
    if (period <= 0) throw std::invalid_argument("PhaseTable: period must be positive");
    for (long long r = 0; r < period; ++r) {
        const double ang = 2.0 * kPi * static_cast<double>(r) / static_cast<double>(period);
        table_[static_cast<size_t>(r)] = cplx(std::cos(ang), std::sin(ang));
    }
}

// ----- Zak transform pair --------------------------------------------------

QuasiPeriodicGrid discrete_zak_transform(std::span<const cplx> td, const FrameDims& dims) {
    const int M = dims.M, N = dims.N;
    if (td.size() != static_cast<size_t>(M) * N)
        throw std::invalid_argument("discrete_zak_transform: input length must equal M*N");
    const PhaseTable phase(N);
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    QuasiPeriodicGrid out(dims);
    for (int k = 0; k < M; ++k) {
        for (int l = 0; l < N; ++l) {
            cplx acc{};
            for (int n = 0; n < N; ++n) acc += td[static_cast<size_t>(k + n * M)] * phase(-1LL * n * l);
            out(k, l) = acc * scale;
        }
    }
    return out;
}

CVec inverse_discrete_zak_transform(const QuasiPeriodicGrid& grid) {
    const int M = grid.M(), N = grid.N();
    grid.dims().validate();
    const PhaseTable phase(N);
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    CVec td(static_cast<size_t>(M) * N);
    for (int k = 0; k < M; ++k) {
        for (int n = 0; n < N; ++n) {
            cplx acc{};
            for (int l = 0; l < N; ++l) acc += grid(k, l) * phase(1LL * n * l);
            td[static_cast<size_t>(k + n * M)] = acc * scale;
        }
    }
    return td;
}

// ----- Twisted convolution -------------------------------------------------

namespace {

// Calls fn(out_index, in_index, coefficient) for every term of the twisted
// convolution sum restricted to the fundamental domain of the output.
template <typename Fn>
void for_each_twisted_term(const DiscreteDDFilter& h, const FrameDims& dims, Fn&& fn) {
    const long long M = dims.M, N = dims.N, MN = M * N;
    const PhaseTable twist(MN);
    const PhaseTable root(N);
    for (const auto& [kl, hv] : h.taps) {
        if (hv == cplx{}) continue;
        const long long kp = kl.first, lp = kl.second;
        const long long lpm = pos_mod(lp, N);
        for (long long k = 0; k < M; ++k) {
            const long long src_k = k - kp;
            const long long n = floor_div(src_k, M);
            const size_t obase = static_cast<size_t>(k * N);
            const size_t ibase = static_cast<size_t>((src_k - n * M) * N);
            const cplx tw = hv * twist(lp * src_k);
            const long long nm = pos_mod(n, N);
            for (long long l = 0; l < N; ++l) {
                long long ll = l - lpm;
                if (ll < 0) ll += N;
                // quasi-periodic phase exp(j2pi n (l-l') / N)
                const cplx c = nm == 0 ? tw : tw * root(nm * ll);
                fn(obase + static_cast<size_t>(l), ibase + static_cast<size_t>(ll), c);
            }
        }
    }
}

}  // namespace

QuasiPeriodicGrid discrete_twisted_convolve(const DiscreteDDFilter& h, const QuasiPeriodicGrid& x) {
    QuasiPeriodicGrid out(x.dims());
    auto in = x.cells();
    auto dst = out.cells();
    for_each_twisted_term(h, x.dims(), [&](size_t o, size_t i, cplx c) { dst[o] += c * in[i]; });
    return out;
}

QuasiPeriodicGrid discrete_twisted_convolve_adjoint(const DiscreteDDFilter& h,
                                                    const QuasiPeriodicGrid& y) {
    QuasiPeriodicGrid out(y.dims());
    auto in = y.cells();
    auto dst = out.cells();
    for_each_twisted_term(h, y.dims(),
                          [&](size_t o, size_t i, cplx c) { dst[i] += std::conj(c) * in[o]; });
    return out;
}

DiscreteDDFilter compose_filters(const DiscreteDDFilter& h1, const DiscreteDDFilter& h2,
                                 const FrameDims& dims) {
    const PhaseTable twist(static_cast<long long>(dims.M) * dims.N);
    DiscreteDDFilter out;
    for (const auto& [kl1, v1] : h1.taps) {
        for (const auto& [kl2, v2] : h2.taps) {
            const cplx c = v1 * v2 * twist(static_cast<long long>(kl1.second) * kl2.first);
            out.add(kl1.first + kl2.first, kl1.second + kl2.second, c);
        }
    }
    return out;
}

}  // namespace otfsim
