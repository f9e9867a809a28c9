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

// Factorizable DD transmit pulses w_tx(tau, nu) = W1(tau) W2(nu).
//
// Each factor is described in lattice units: W1(tau) = sqrt(B) p1(B tau) and
// W2(nu) = sqrt(T) p2(T nu), where p is real, even, compactly supported on
// [-S, S] and has unit energy. Truncation is at 1e-6 of the envelope peak.

#pragma once

#include <string>
#include <vector>

namespace otfsim {

enum class PulseKind { Sinc, Gauss, GaussSinc };

std::string to_string(PulseKind kind);
PulseKind pulse_kind_from_string(const std::string& name);

/// One-dimensional unit-energy profile in lattice units.
class PulseProfile {
public:
    static constexpr double kTruncation = 1e-6;
    /// Envelope of the sinc pulse: wide Gaussian window, std in lattice units.
    static constexpr double kSincWindowStd = 16.0;
    /// Gaussian window of the Gauss-sinc pulse, std in lattice units.
    static constexpr double kGaussSincWindowStd = 2.0;

    /// alpha scales the Gauss width (std = alpha / 2 lattice units).
    PulseProfile(PulseKind kind, double alpha = 1.0);

    PulseKind kind() const { return kind_; }
    int half_width() const { return half_width_; }
    double envelope_std() const { return env_std_; }

    /// p(x), zero for |x| > S.
    double operator()(double x) const;

    /// P(f) = integral p(y) cos(2 pi f y) dy.
    double spectrum(double f) const;

    /// Samples p(j / step_den) for j in [-S*step_den, S*step_den].
    std::vector<double> sampled(int step_den) const;

private:
    double raw(double x) const;

    PulseKind kind_;
    double env_std_;
    int half_width_;
    double scale_ = 1.0;
    std::vector<double> spec_grid_;  // p sampled at step 1/16 on [0, S]
};

struct PulseShape {
    PulseKind kind = PulseKind::Sinc;
    double alpha_tau = 1.0;
    double alpha_nu = 1.0;

    static PulseShape sinc() { return {PulseKind::Sinc, 1.0, 1.0}; }
    static PulseShape gauss(double a_tau = 1.0, double a_nu = 1.0) { return {PulseKind::Gauss, a_tau, a_nu}; }
    static PulseShape gauss_sinc() { return {PulseKind::GaussSinc, 1.0, 1.0}; }

    PulseProfile delay_profile() const { return PulseProfile(kind, alpha_tau); }
    PulseProfile doppler_profile() const { return PulseProfile(kind, alpha_nu); }

    std::string name() const { return to_string(kind); }
};

}  // namespace otfsim
