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

// Discrete delay-Doppler machinery: frame dimensions, quasi-periodic grids,
// the discrete Zak transform pair and discrete twisted convolution.
//
// Conventions
//   - A grid holds x[k,l] for delay bin k in [0,M) and Doppler bin l in [0,N),
//     stored delay-major: cells[k*N + l].
//   - Outside the fundamental domain the grid is quasi-periodic:
//       x[k + nM, l + mN] = exp(j2pi n l / N) x[k, l]
//   - The DZT is unitary:
//       X[k,l] = 1/sqrt(N) sum_n td[k + nM] exp(-j2pi n l / N)

#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace otfsim {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr double kPi = 3.14159265358979323846;

/// Integer floor division and non-negative modulo.
constexpr long long floor_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}
constexpr long long pos_mod(long long a, long long b) {
    long long r = a % b;
    return r < 0 ? r + b : r;
}

/// Period and lattice parameters of a Zak-OTFS frame.
///
/// M = B*tau_p delay bins, N = T*nu_p Doppler bins, tau_p*nu_p = 1.
struct FrameDims {
    int M = 1;
    int N = 1;
    double bandwidth = 0.0;  // B [Hz]
    double duration = 0.0;   // T [s]

    double tau_p() const { return static_cast<double>(M) / bandwidth; }
    double nu_p() const { return static_cast<double>(N) / duration; }
    int size() const { return M * N; }

    /// Builds dims from (B, T, nu_p); throws if B*tau_p or T*nu_p is not integral.
    static FrameDims from_doppler_period(double bandwidth, double duration, double nu_p);
    /// Builds dims from integer (M, N) and bandwidth B; T = M*N/B.
    static FrameDims from_bins(int M, int N, double bandwidth);

    void validate() const;
};

bool operator==(const FrameDims& a, const FrameDims& b);

/// M x N complex grid with quasi-periodic extension.
class QuasiPeriodicGrid {
public:
    QuasiPeriodicGrid() = default;
    explicit QuasiPeriodicGrid(const FrameDims& dims);
    QuasiPeriodicGrid(const FrameDims& dims, CVec cells);

    const FrameDims& dims() const { return dims_; }
    int M() const { return dims_.M; }
    int N() const { return dims_.N; }

    /// Fundamental-domain access, k in [0,M), l in [0,N).
    cplx& operator()(int k, int l) { return cells_[static_cast<size_t>(k) * dims_.N + l]; }
    const cplx& operator()(int k, int l) const {
        return cells_[static_cast<size_t>(k) * dims_.N + l];
    }

    /// Quasi-periodic extension for arbitrary integer (k,l).
    cplx at(long long k, long long l) const;

    std::span<const cplx> cells() const { return cells_; }
    std::span<cplx> cells() { return cells_; }

    double energy() const;

    QuasiPeriodicGrid& operator+=(const QuasiPeriodicGrid& other);
    QuasiPeriodicGrid& operator-=(const QuasiPeriodicGrid& other);
    QuasiPeriodicGrid& operator*=(cplx s);

private:
    FrameDims dims_;
    CVec cells_;
};

/// Sparse discrete DD filter h[k,l] with integer tap coordinates.
struct DiscreteDDFilter {
    std::map<std::pair<int, int>, cplx> taps;

    static DiscreteDDFilter identity() { return DiscreteDDFilter{{{{0, 0}, cplx{1.0, 0.0}}}}; }

    void add(int k, int l, cplx v) { taps[{k, l}] += v; }
    cplx get(int k, int l) const;

    /// Bounding box of nonzero taps: (k_min, k_max, l_min, l_max). Empty -> zeros.
    struct Box {
        int k_min = 0, k_max = 0, l_min = 0, l_max = 0;
    };
    Box support() const;

    double energy() const;
    /// Drops taps with |h| <= rel * max|h|.
    void prune(double rel);
};

/// exp(j 2 pi r / period) for integer r, exact table lookup when cached.
class PhaseTable {
public:
    explicit PhaseTable(long long period);
    cplx operator()(long long r) const { return table_[static_cast<size_t>(pos_mod(r, period_))]; }

private:
    long long period_;
    CVec table_;
};

QuasiPeriodicGrid discrete_zak_transform(std::span<const cplx> td, const FrameDims& dims);
CVec inverse_discrete_zak_transform(const QuasiPeriodicGrid& grid);

/// out[k,l] = sum h[k',l'] x_ext[k-k', l-l'] exp(j2pi l'(k-k')/(MN))
QuasiPeriodicGrid discrete_twisted_convolve(const DiscreteDDFilter& h, const QuasiPeriodicGrid& x);

/// Adjoint of x -> discrete_twisted_convolve(h, x) under the standard inner product.
QuasiPeriodicGrid discrete_twisted_convolve_adjoint(const DiscreteDDFilter& h,
                                                    const QuasiPeriodicGrid& y);

/// Twisted convolution of two filters without periodic wrap.
DiscreteDDFilter compose_filters(const DiscreteDDFilter& h1, const DiscreteDDFilter& h2,
                                 const FrameDims& dims);

}  // namespace otfsim
