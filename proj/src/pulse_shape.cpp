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

#include "otfsim/pulse_shape.hpp"

#include "otfsim/dd_core.hpp"

#include <cmath>
#include <stdexcept>

namespace otfsim {

namespace {

constexpr int kSpecDen = 16;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

}  // namespace

std::string to_string(PulseKind kind) {
    switch (kind) {
        case PulseKind::Sinc: return "sinc";
        case PulseKind::Gauss: return "gauss";
        case PulseKind::GaussSinc: return "gauss_sinc";
    }
    return "unknown";
}

PulseKind pulse_kind_from_string(const std::string& name) {
    if (name == "sinc") return PulseKind::Sinc;
    if (name == "gauss") return PulseKind::Gauss;
    if (name == "gauss_sinc" || name == "gausssinc" || name == "gauss-sinc") return PulseKind::GaussSinc;
    throw std::invalid_argument("unknown pulse shape: " + name);
}

PulseProfile::PulseProfile(PulseKind kind, double alpha) : kind_(kind) {
    if (!(alpha > 0.0)) throw std::invalid_argument("PulseProfile: alpha must be positive");
    switch (kind) {
        case PulseKind::Sinc: env_std_ = kSincWindowStd; break;
        case PulseKind::Gauss: env_std_ = alpha / 2.0; break;
        case PulseKind::GaussSinc: env_std_ = kGaussSincWindowStd; break;
    }
    half_width_ = static_cast<int>(std::ceil(env_std_ * std::sqrt(-2.0 * std::log(kTruncation))));

    // Unit energy by trapezoidal quadrature (the profile is smooth and
    // negligible at the truncation edges).
    constexpr int den = 64;
    double e = 0.0;
    for (int j = -half_width_ * den; j <= half_width_ * den; ++j) {
        const double v = raw(static_cast<double>(j) / den);
        e += v * v;
    }
    scale_ = 1.0 / std::sqrt(e / den);

    spec_grid_.resize(static_cast<size_t>(half_width_) * kSpecDen + 1);
    for (size_t j = 0; j < spec_grid_.size(); ++j)
        spec_grid_[j] = (*this)(static_cast<double>(j) / kSpecDen);
}

double PulseProfile::raw(double x) const {
    if (std::abs(x) > half_width_) return 0.0;
    const double env = std::exp(-x * x / (2.0 * env_std_ * env_std_));
    return kind_ == PulseKind::Gauss ? env : sinc(x) * env;
}

double PulseProfile::operator()(double x) const { return scale_ * raw(x); }

double PulseProfile::spectrum(double f) const {
    double acc = spec_grid_[0];
    for (size_t j = 1; j < spec_grid_.size(); ++j)
        acc += 2.0 * spec_grid_[j] * std::cos(2.0 * kPi * f * static_cast<double>(j) / kSpecDen);
    return acc / kSpecDen;
}

std::vector<double> PulseProfile::sampled(int step_den) const {
    std::vector<double> out(static_cast<size_t>(2 * half_width_ * step_den + 1));
    for (int j = -half_width_ * step_den; j <= half_width_ * step_den; ++j)
        out[static_cast<size_t>(j + half_width_ * step_den)] = (*this)(static_cast<double>(j) / step_den);
    return out;
}

}  // namespace otfsim
