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

#include "otfsim/lsmr.hpp"
#include "test_util.hpp"

#include <Eigen/Dense>

using namespace otfsim;
using namespace otfsim::test;

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

LinearOp as_op(const Mat& A) {
    return [A](const CVec& x) {
        const Vec y = A * Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size()));
        return CVec(y.data(), y.data() + y.size());
    };
}

Mat random_mat(int m, int n, std::mt19937_64& rng) {
    const CVec v = random_cvec(static_cast<size_t>(m * n), rng);
    return Eigen::Map<const Mat>(v.data(), m, n);
}

}  // namespace

TEST_CASE("LSMR matches dense least squares") {
    std::mt19937_64 rng(12);
    for (double damp : {0.0, 0.3}) {
        const Mat A = random_mat(40, 15, rng);
        const CVec b = random_cvec(40, rng);
        const Vec bv = Eigen::Map<const Vec>(b.data(), 40);
        const Mat AH = A.adjoint();
        const Mat G = AH * A + damp * damp * Mat::Identity(15, 15);
        const Vec ref = G.ldlt().solve(AH * bv);

        LsmrOptions opts;
        opts.atol = opts.btol = 1e-12;
        opts.max_iter = 200;
        const auto r = lsmr(as_op(A), as_op(AH), b, 15, damp, opts);
        CHECK_FALSE(r.hit_iteration_cap);
        CHECK(max_abs_diff(r.x, CVec(ref.data(), ref.data() + 15)) < 1e-8);
    }
}

TEST_CASE("LSMR on a consistent square system and edge cases") {
    std::mt19937_64 rng(13);
    const Mat A = random_mat(10, 10, rng) + 10.0 * Mat::Identity(10, 10);
    const CVec x0 = random_cvec(10, rng);
    const Vec b = A * Eigen::Map<const Vec>(x0.data(), 10);
    const auto r = lsmr(as_op(A), as_op(A.adjoint()), CVec(b.data(), b.data() + 10), 10, 0.0);
    CHECK(max_abs_diff(r.x, x0) < 1e-6);

    const auto z = lsmr(as_op(A), as_op(A.adjoint()), CVec(10), 10, 0.0);
    CHECK(z.istop == 0);
    CHECK(max_abs_diff(z.x, CVec(10)) == 0.0);

    LsmrOptions capped;
    capped.max_iter = 2;
    capped.atol = capped.btol = 1e-15;
    const Mat B = random_mat(30, 20, rng);
    const auto c = lsmr(as_op(B), as_op(B.adjoint()), random_cvec(30, rng), 20, 0.0, capped);
    CHECK(c.hit_iteration_cap);
    CHECK(c.iterations == 2);
}
