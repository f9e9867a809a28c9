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

// Matrix-free complex LSMR (Fong & Saunders, 2011) for
//   min ||A x - b||^2 + damp^2 ||x||^2

#pragma once

#include "otfsim/dd_core.hpp"

#include <functional>

namespace otfsim {

struct LsmrOptions {
    int max_iter = 100;
    double atol = 1e-8;
    double btol = 1e-8;
    double conlim = 1e8;
};

struct LsmrResult {
    CVec x;
    int iterations = 0;
    int istop = 0;  // 0: x = 0 solves, 1/2: tolerances met, 3: conlim, 7: iteration cap
    bool hit_iteration_cap = false;
    double residual_norm = 0.0;
};

using LinearOp = std::function<CVec(const CVec&)>;

/// A maps C^n -> C^m, AH is its adjoint; b has length m; n is the unknown count.
LsmrResult lsmr(const LinearOp& A, const LinearOp& AH, const CVec& b, size_t n, double damp,
                const LsmrOptions& opts = {});

}  // namespace otfsim
