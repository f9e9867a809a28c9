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

// Bits to symbols and back: Gray QAM, punctured K=7 convolutional code with
// soft Viterbi decoding, MCS ladder and spectral-efficiency accounting.

#pragma once

#include "otfsim/dd_core.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace otfsim {

using Bits = std::vector<std::uint8_t>;

// ----- QAM -----------------------------------------------------------------

int bits_per_symbol(int qam_order);

/// Gray-mapped square QAM with unit average energy. Bits alternate I/Q
/// halves: the first log2(M)/2 bits select the in-phase level.
CVec map_qam(std::span<const std::uint8_t> bits, int qam_order);

/// Max-log LLRs, positive favours bit 0. noise_var is the complex noise
/// variance per symbol (one value, or one per symbol).
std::vector<double> demap_qam(std::span<const cplx> symbols, int qam_order, double noise_var);
std::vector<double> demap_qam(std::span<const cplx> symbols, int qam_order, std::span<const double> noise_var);

Bits hard_decision(std::span<const double> llrs);

// ----- Convolutional code --------------------------------------------------

struct CodeRate {
    int num = 1;
    int den = 2;
    double value() const { return static_cast<double>(num) / den; }
    std::string to_string() const { return std::to_string(num) + "/" + std::to_string(den); }
};

bool operator==(const CodeRate& a, const CodeRate& b);

/// K=7, generators (133, 171) octal, 6 tail bits, puncturing for
/// rates 1/2, 2/3, 3/4, 5/6.
class ConvolutionalCode {
public:
    static constexpr int kConstraint = 7;
    static constexpr int kTail = kConstraint - 1;

    explicit ConvolutionalCode(CodeRate rate);

    CodeRate rate() const { return rate_; }

    /// Coded length for n_info information bits (tail included).
    size_t coded_length(size_t n_info) const;
    /// Largest information length whose coded length fits in capacity bits.
    size_t max_info_bits(size_t capacity) const;

    Bits encode(std::span<const std::uint8_t> info) const;
    /// llrs has coded_length(n_info) entries.
    Bits decode(std::span<const double> llrs, size_t n_info) const;

private:
    CodeRate rate_;
    std::vector<std::uint8_t> pattern_;  // keep flags over one period of (A, B) pairs
};

Bits fec_encode(std::span<const std::uint8_t> info, CodeRate rate);
Bits fec_decode(std::span<const double> llrs, CodeRate rate, size_t n_info);

// ----- Interleaver --------------------------------------------------------

/// Fixed pseudo-random permutation of n positions (Fisher-Yates on a
/// splitmix64 stream); perm[i] is the source index of output position i.
std::vector<size_t> interleaver_permutation(size_t n);

Bits interleave(std::span<const std::uint8_t> bits);
std::vector<double> deinterleave(std::span<const double> llrs);

// ----- MCS -----------------------------------------------------------------

struct McsEntry {
    int index = 0;
    int qam_order = 4;
    CodeRate rate;

    int bits_per_symbol() const { return otfsim::bits_per_symbol(qam_order); }
    double info_rate() const { return bits_per_symbol() * rate.value(); }
    std::string label() const;
};

/// 12 entries {4, 16, 64}-QAM x {1/2, 2/3, 3/4, 5/6}, sorted by information
/// rate; ties go to the lower QAM order.
const std::vector<McsEntry>& mcs_ladder();

inline constexpr double kTargetBler = 0.1;

/// Index of the highest entry with BLER < 0.1, none if all fail.
std::optional<int> select_mcs(std::span<const double> per_mcs_bler);

// ----- Metrics -------------------------------------------------------------

struct LinkResult {
    long long n_info_bits = 0;
    double bler = 1.0;
    double ber = 0.5;
    double se = 0.0;
    double overhead_fraction = 0.0;
    std::optional<int> mcs_chosen;
};

enum class Waveform { ZakOtfs, CpOfdm };

/// (1 - BLER) N_I / (B (T + tau_s))
double zak_spectral_efficiency(double bler, double n_info, double bandwidth, double duration, double tau_s);
/// (1 - BLER) N_I / 720, N_I per slot of 720 kHz x ms resource
double ofdm_spectral_efficiency(double bler, double n_info);

/// tau_s / (T + tau_s)
double zak_guard_overhead(double tau_s, double duration);

/// Monte-Carlo stopping rule: at least min_frames or max_errors block errors.
struct BlerCounter {
    int max_frames = 200;
    int max_errors = 20;
    int frames = 0;
    int errors = 0;
    long long bit_errors = 0;
    long long bits = 0;

    bool done() const { return frames >= max_frames || errors >= max_errors; }
    void add(long long n_bit_errors, long long n_bits);
    double bler() const { return frames ? static_cast<double>(errors) / frames : 1.0; }
    double ber() const { return bits ? static_cast<double>(bit_errors) / bits : 0.5; }
};

}  // namespace otfsim
