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

// Monte-Carlo link simulation of one operating point per waveform.
//
// Frame f of a run uses channel seed base_seed ^ f for both waveforms and all
// operating points (common random numbers). Noise and payload seeds are
// derived from the channel seed. The Zak receiver sees the effective DD
// channel h_eff *s x plus white time-domain noise passed through the matched
// filter; CP-OFDM sees the per-symbol I/O matrices plus white noise per
// resource element.

#pragma once

#include "otfsim/channel_model.hpp"
#include "otfsim/link_layer.hpp"
#include "otfsim/ofdm_modem.hpp"
#include "otfsim/zak_modem.hpp"

#include <map>
#include <memory>
#include <optional>
#include <tuple>

namespace otfsim {

struct ZakOperatingPoint {
    double nu_p = 12e3;
    PulseShape pulse = PulseShape::gauss();
    Allocation allocation = Allocation::IV;
    double pdr_db = 0.0;
};

struct OfdmOperatingPoint {
    double scs = 15e3;
    bool extended_cp = false;
    std::vector<int> dmrs_positions{2};
    double boost_db = 0.0;

    std::string scs_label() const;
};

struct ZakReceiverSettings {
    double bandwidth = 672e3;
    double duration = 1e-3;
    int oversampling = 4;
    AcquisitionOptions acquisition{0.0, 2, 2, -1.0};
    LsmrOptions lsmr{40, 1e-6, 1e-6, 1e8};
};

struct SimSettings {
    double snr_db = 12.0;
    int max_frames = 200;
    int max_errors = 20;
    std::uint64_t base_seed = 1;
    double nu_max = 0.0;
    double tau_s = 0.0;
    ZakReceiverSettings zak;
};

struct PointResult {
    double se = 0.0;
    std::optional<int> mcs;
    std::vector<double> bler;  // per ladder entry, NaN when not evaluated
    long long n_info_bits = 0;
    double overhead = 0.0;
    int frames_simulated = 0;
    std::optional<double> est_nmse_db;  // mean channel-estimate NMSE (Zak) or per-RE NMSE (OFDM)
};

/// Channel realization for frame f.
DDSpreadingFunction frame_channel(const SimSettings& s, int frame);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Per-frame quantities shared by operating points with the same (pulse, nu_p)
/// or numerology: effective channels and unit-variance noise realizations.
class FrameCache {
public:
    struct ZakFrame {
        DiscreteDDFilter heff;
        QuasiPeriodicGrid unit_noise;
    };
    struct OfdmFrame {
        std::vector<OfdmIoMatrix> io;
        OfdmGrid unit_noise;
    };

    const ZakFrame& zak(const SimSettings& s, const ZakOperatingPoint& op, int frame);
    const OfdmFrame& ofdm(const SimSettings& s, const OfdmOperatingPoint& op, int frame);
    void clear() {
        zak_.clear();
        ofdm_.clear();
    }

private:
    std::map<std::tuple<int, double, double, double, int>, std::unique_ptr<ZakFrame>> zak_;
    std::map<std::tuple<double, bool, int>, std::unique_ptr<OfdmFrame>> ofdm_;
};

/// Runs the MCS ladder from the top down and stops at the first entry with
/// BLER < 0.1, which is the entry select_mcs would return.
PointResult evaluate_zak_point(const SimSettings& s, const ZakOperatingPoint& op, FrameCache* cache = nullptr);
PointResult evaluate_ofdm_point(const SimSettings& s, const OfdmOperatingPoint& op, FrameCache* cache = nullptr);

/// One Zak frame at a given MCS; returns the number of information bit errors.
struct ZakFrameOutcome {
    long long n_info = 0;
    long long bit_errors = 0;
    double est_nmse_db = 0.0;
    bool lsmr_cap = false;
};
ZakFrameOutcome simulate_zak_frame(const SimSettings& s, const ZakOperatingPoint& op, const McsEntry& mcs, int frame,
                                   FrameCache& cache);

struct OfdmFrameOutcome {
    long long n_info = 0;
    long long bit_errors = 0;
    double est_nmse_db = 0.0;
};
OfdmFrameOutcome simulate_ofdm_frame(const SimSettings& s, const OfdmOperatingPoint& op, const McsEntry& mcs,
                                     int frame, FrameCache& cache);

FrameDims zak_dims(const SimSettings& s, double nu_p);

}  // namespace otfsim
