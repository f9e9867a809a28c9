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

#pragma once

#include "otfsim/dd_core.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <span>

namespace otfsim::test {

inline CVec random_cvec(size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CVec v(n);
    for (auto& c : v) c = cplx(g(rng), g(rng));
    return v;
}

inline QuasiPeriodicGrid random_grid(const FrameDims& d, std::mt19937_64& rng) {
    return QuasiPeriodicGrid(d, random_cvec(static_cast<size_t>(d.size()), rng));
}

inline double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
    double m = 0.0;
    for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double rel_err(std::span<const cplx> a, std::span<const cplx> ref) {
    double e = 0.0, r = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        e += std::norm(a[i] - ref[i]);
        r += std::norm(ref[i]);
    }
    return std::sqrt(e / r);
}

inline cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
    cplx s{};
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

}  // namespace otfsim::test
