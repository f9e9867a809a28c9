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

#include "otfsim/lsmr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace otfsim {

namespace {

double norm2(const CVec& v) {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return std::sqrt(s);
}

void scale(CVec& v, double s) {
    for (auto& c : v) c *= s;
}

// Stable Givens rotation: returns (c, s, r) with [c s; -s c] [a; b] = [r; 0].
std::tuple<double, double, double> sym_ortho(double a, double b) {
    if (b == 0.0) return {a >= 0 ? 1.0 : -1.0, 0.0, std::abs(a)};
    if (a == 0.0) return {0.0, b >= 0 ? 1.0 : -1.0, std::abs(b)};
    if (std::abs(b) > std::abs(a)) {
        const double tau = a / b;
        const double s = (b >= 0 ? 1.0 : -1.0) / std::sqrt(1.0 + tau * tau);
        const double c = s * tau;
        return {c, s, b / s};
    }
    const double tau = b / a;
    const double c = (a >= 0 ? 1.0 : -1.0) / std::sqrt(1.0 + tau * tau);
    const double s = c * tau;
    return {c, s, a / c};
}

}  // namespace

LsmrResult lsmr(const LinearOp& A, const LinearOp& AH, const CVec& b, size_t n, double damp,
                const LsmrOptions& opts) {
    LsmrResult res;
    res.x.assign(n, cplx{});
    CVec& x = res.x;

    CVec u = b;
    const double normb = norm2(b);
    double beta = normb;
    if (beta > 0) scale(u, 1.0 / beta);

    CVec v = beta > 0 ? AH(u) : CVec(n, cplx{});
    if (v.size() != n) throw std::invalid_argument("lsmr: adjoint operator returned wrong size");
    double alpha = norm2(v);
    if (alpha > 0) scale(v, 1.0 / alpha);

    double zetabar = alpha * beta, alphabar = alpha;
    double rho = 1, rhobar = 1, cbar = 1, sbar = 0;
    CVec h = v, hbar(n, cplx{});

    double betadd = beta, betad = 0, rhodold = 1, tautildeold = 0, thetatilde = 0, zeta = 0, d = 0;
    double normA2 = alpha * alpha, maxrbar = 0, minrbar = 1e100;
    double normA = std::sqrt(normA2), condA = 1, normx = 0;
    double normr = beta;
    res.residual_norm = normr;

    if (alpha * beta == 0.0) return res;
    const double ctol = opts.conlim > 0 ? 1.0 / opts.conlim : 0.0;

    while (res.iterations < opts.max_iter) {
        ++res.iterations;

        CVec Av = A(v);
        for (size_t i = 0; i < u.size(); ++i) u[i] = Av[i] - alpha * u[i];
        beta = norm2(u);
        if (beta > 0) {
            scale(u, 1.0 / beta);
            CVec Au = AH(u);
            for (size_t i = 0; i < n; ++i) v[i] = Au[i] - beta * v[i];
            alpha = norm2(v);
            if (alpha > 0) scale(v, 1.0 / alpha);
        }

        const auto [chat, shat, alphahat] = sym_ortho(alphabar, damp);

        const double rhoold = rho;
        const auto [c, s, rho_new] = sym_ortho(alphahat, beta);
        rho = rho_new;
        const double thetanew = s * alpha;
        alphabar = c * alpha;

        const double rhobarold = rhobar;
        const double zetaold = zeta;
        const double thetabar = sbar * rho;
        const double rhotemp = cbar * rho;
        std::tie(cbar, sbar, rhobar) = sym_ortho(cbar * rho, thetanew);
        zeta = cbar * zetabar;
        zetabar = -sbar * zetabar;

        const double hbar_coef = thetabar * rho / (rhoold * rhobarold);
        const double x_coef = zeta / (rho * rhobar);
        const double h_coef = thetanew / rho;
        for (size_t i = 0; i < n; ++i) {
            hbar[i] = h[i] - hbar_coef * hbar[i];
            x[i] += x_coef * hbar[i];
            h[i] = v[i] - h_coef * h[i];
        }

        // Residual norm estimate.
        const double betaacute = chat * betadd;
        const double betacheck = -shat * betadd;
        const double betahat = c * betaacute;
        betadd = -s * betaacute;

        const double thetatildeold = thetatilde;
        const auto [ctildeold, stildeold, rhotildeold] = sym_ortho(rhodold, thetabar);
        thetatilde = stildeold * rhobar;
        rhodold = ctildeold * rhobar;
        betad = -stildeold * betad + ctildeold * betahat;

        tautildeold = (zetaold - thetatildeold * tautildeold) / rhotildeold;
        const double taud = (zeta - thetatilde * tautildeold) / rhodold;
        d += betacheck * betacheck;
        normr = std::sqrt(d + (betad - taud) * (betad - taud) + betadd * betadd);

        normA2 += beta * beta;
        normA = std::sqrt(normA2);
        normA2 += alpha * alpha;

        maxrbar = std::max(maxrbar, rhobarold);
        if (res.iterations > 1) minrbar = std::min(minrbar, rhobarold);
        condA = std::max(maxrbar, rhotemp) / std::min(minrbar, rhotemp);

        const double normar = std::abs(zetabar);
        normx = norm2(x);
        res.residual_norm = normr;

        const double test1 = normr / normb;
        const double test2 = (normA * normr) != 0 ? normar / (normA * normr)
                                                 : std::numeric_limits<double>::infinity();
        const double test3 = 1.0 / condA;
        const double t1 = test1 / (1.0 + normA * normx / normb);
        const double rtol = opts.btol + opts.atol * normA * normx / normb;

        if (1.0 + test3 <= 1.0 || test3 <= ctol) { res.istop = 3; break; }
        if (1.0 + test2 <= 1.0 || test2 <= opts.atol) { res.istop = 2; break; }
        if (1.0 + t1 <= 1.0 || test1 <= rtol) { res.istop = 1; break; }
    }
    if (res.istop == 0 && res.iterations >= opts.max_iter) {
        res.istop = 7;
        res.hit_iteration_cap = true;
    }
    return res;
}

}  // namespace otfsim
