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

#include "otfsim/link_layer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace otfsim {

// ----- QAM -----------------------------------------------------------------

int bits_per_symbol(int qam_order) {
    switch (qam_order) {
        case 4: return 2;
        case 16: return 4;
        case 64: return 6;
        default: throw std::invalid_argument("unsupported QAM order " + std::to_string(qam_order));
    }
}

namespace {

struct PamTable {
    int levels = 2;
    int bits = 1;
    double scale = 1.0;
    std::vector<double> amp_of_label;  // label (Gray bits as integer, MSB first) -> amplitude
};

const PamTable& pam_table(int qam_order) {
    static const std::array<PamTable, 3> tables = [] {
        std::array<PamTable, 3> t;
        for (int i = 0; i < 3; ++i) {
            const int order = 4 << (2 * i);
            PamTable& p = t[static_cast<size_t>(i)];
            p.bits = bits_per_symbol(order) / 2;
            p.levels = 1 << p.bits;
            p.scale = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
            p.amp_of_label.resize(static_cast<size_t>(p.levels));
            // Level index i (0 = most positive) carries Gray label i ^ (i >> 1).
            for (int lv = 0; lv < p.levels; ++lv) {
                const int label = lv ^ (lv >> 1);
                p.amp_of_label[static_cast<size_t>(label)] = (p.levels - 1 - 2 * lv) * p.scale;
            }
        }
        return t;
    }();
    switch (qam_order) {
        case 4: return tables[0];
        case 16: return tables[1];
        case 64: return tables[2];
        default: throw std::invalid_argument("unsupported QAM order " + std::to_string(qam_order));
    }
}

}  // namespace

CVec map_qam(std::span<const std::uint8_t> bits, int qam_order) {
    const int bps = bits_per_symbol(qam_order);
    if (bits.size() % static_cast<size_t>(bps) != 0)
        throw std::invalid_argument("map_qam: bit count not divisible by bits per symbol");
    const PamTable& p = pam_table(qam_order);
    CVec out(bits.size() / static_cast<size_t>(bps));
    for (size_t s = 0; s < out.size(); ++s) {
        int li = 0, lq = 0;
        for (int b = 0; b < p.bits; ++b) {
            li = (li << 1) | (bits[s * bps + b] & 1);
            lq = (lq << 1) | (bits[s * bps + p.bits + b] & 1);
        }
        out[s] = {p.amp_of_label[static_cast<size_t>(li)], p.amp_of_label[static_cast<size_t>(lq)]};
    }
    return out;
}

std::vector<double> demap_qam(std::span<const cplx> symbols, int qam_order, std::span<const double> noise_var) {
    if (noise_var.size() != symbols.size() && noise_var.size() != 1)
        throw std::invalid_argument("demap_qam: noise variance count mismatch");
    const int bps = bits_per_symbol(qam_order);
    const PamTable& p = pam_table(qam_order);
    std::vector<double> llr(symbols.size() * static_cast<size_t>(bps));
    for (size_t s = 0; s < symbols.size(); ++s) {
        const double nv = std::max(noise_var.size() == 1 ? noise_var[0] : noise_var[s], 1e-12);
        for (int axis = 0; axis < 2; ++axis) {
            const double y = axis == 0 ? symbols[s].real() : symbols[s].imag();
            for (int b = 0; b < p.bits; ++b) {
                const int mask = 1 << (p.bits - 1 - b);
                double d0 = std::numeric_limits<double>::infinity(), d1 = d0;
                for (int label = 0; label < p.levels; ++label) {
                    const double e = y - p.amp_of_label[static_cast<size_t>(label)];
                    double& d = (label & mask) ? d1 : d0;
                    d = std::min(d, e * e);
                }
                llr[s * bps + axis * p.bits + b] = (d1 - d0) / nv;
            }
        }
    }
    return llr;
}

std::vector<double> demap_qam(std::span<const cplx> symbols, int qam_order, double noise_var) {
    const double nv[1] = {noise_var};
    return demap_qam(symbols, qam_order, std::span<const double>(nv, 1));
}

Bits hard_decision(std::span<const double> llrs) {
    Bits out(llrs.size());
    for (size_t i = 0; i < llrs.size(); ++i) out[i] = llrs[i] < 0.0 ? 1 : 0;
    return out;
}

// ----- Convolutional code --------------------------------------------------

bool operator==(const CodeRate& a, const CodeRate& b) { return a.num * b.den == b.num * a.den; }

namespace {

constexpr unsigned kG0 = 0133, kG1 = 0171;
constexpr int kStates = 64;

inline int parity(unsigned v) { return __builtin_parity(v); }

// Register layout: bit 6 = current input, bits 5..0 = previous inputs (newest first).
inline void branch_output(int state, int input, int& c0, int& c1) {
    const unsigned reg = (static_cast<unsigned>(input) << 6) | static_cast<unsigned>(state);
    c0 = parity(reg & kG0);
    c1 = parity(reg & kG1);
}

}  // namespace

ConvolutionalCode::ConvolutionalCode(CodeRate rate) : rate_(rate) {
    if (rate == CodeRate{1, 2}) pattern_ = {1, 1};
    else if (rate == CodeRate{2, 3}) pattern_ = {1, 1, 1, 0};
    else if (rate == CodeRate{3, 4}) pattern_ = {1, 1, 1, 0, 0, 1};
    else if (rate == CodeRate{5, 6}) pattern_ = {1, 1, 1, 0, 0, 1, 1, 0, 0, 1};
    else throw std::invalid_argument("unsupported code rate " + rate.to_string());
}

size_t ConvolutionalCode::coded_length(size_t n_info) const {
    const size_t steps = n_info + kTail;
    const size_t period = pattern_.size() / 2;
    size_t per_period = 0;
    for (auto k : pattern_) per_period += k;
    size_t n = (steps / period) * per_period;
    for (size_t i = 0; i < 2 * (steps % period); ++i) n += pattern_[i];
    return n;
}

size_t ConvolutionalCode::max_info_bits(size_t capacity) const {
    if (coded_length(0) > capacity) return 0;
    size_t lo = 0, hi = capacity;  // coded_length(k) >= k
    while (lo < hi) {
        const size_t mid = (lo + hi + 1) / 2;
        if (coded_length(mid) <= capacity) lo = mid;
        else hi = mid - 1;
    }
    return lo;
}

Bits ConvolutionalCode::encode(std::span<const std::uint8_t> info) const {
    Bits out;
    out.reserve(coded_length(info.size()));
    int state = 0;
    const size_t steps = info.size() + kTail;
    const size_t period = pattern_.size() / 2;
    for (size_t t = 0; t < steps; ++t) {
        const int in = t < info.size() ? (info[t] & 1) : 0;
        int c0, c1;
        branch_output(state, in, c0, c1);
        const size_t ph = 2 * (t % period);
        if (pattern_[ph]) out.push_back(static_cast<std::uint8_t>(c0));
        if (pattern_[ph + 1]) out.push_back(static_cast<std::uint8_t>(c1));
        state = ((in << 6) | state) >> 1;
    }
    return out;
}

Bits ConvolutionalCode::decode(std::span<const double> llrs, size_t n_info) const {
    if (llrs.size() != coded_length(n_info)) throw std::invalid_argument("ConvolutionalCode::decode: length mismatch");
    const size_t steps = n_info + kTail;
    const size_t period = pattern_.size() / 2;

    // Precomputed branch outputs for (state, input).
    static const auto outputs = [] {
        std::array<std::array<std::uint8_t, 2>, kStates> o{};
        for (int s = 0; s < kStates; ++s)
            for (int in = 0; in < 2; ++in) {
                int c0, c1;
                branch_output(s, in, c0, c1);
                o[static_cast<size_t>(s)][static_cast<size_t>(in)] = static_cast<std::uint8_t>(c0 | (c1 << 1));
            }
        return o;
    }();

    constexpr double kNeg = -1e300;
    std::array<double, kStates> metric, next;
    metric.fill(kNeg);
    metric[0] = 0.0;
    std::vector<std::uint8_t> decision(steps * kStates);  // chosen predecessor low bit

    size_t pos = 0;
    for (size_t t = 0; t < steps; ++t) {
        const size_t ph = 2 * (t % period);
        const double l0 = pattern_[ph] ? llrs[pos++] : 0.0;
        const double l1 = pattern_[ph + 1] ? llrs[pos++] : 0.0;
        // Correlation metric: +llr for coded bit 0, -llr for coded bit 1.
        const double bm[4] = {l0 + l1, -l0 + l1, l0 - l1, -l0 - l1};
        next.fill(kNeg);
        std::uint8_t* dec = decision.data() + t * kStates;
        for (int ns = 0; ns < kStates; ++ns) {
            const int in = ns >> 5;
            const int base = (ns << 1) & (kStates - 1);
            // Predecessors: state = base | lsb, with ((in<<6)|state)>>1 == ns.
            const int s0 = base, s1 = base | 1;
            const double m0 = metric[static_cast<size_t>(s0)] + bm[outputs[static_cast<size_t>(s0)][static_cast<size_t>(in)]];
            const double m1 = metric[static_cast<size_t>(s1)] + bm[outputs[static_cast<size_t>(s1)][static_cast<size_t>(in)]];
            if (m1 > m0) {
                next[static_cast<size_t>(ns)] = m1;
                dec[ns] = 1;
            } else {
                next[static_cast<size_t>(ns)] = m0;
                dec[ns] = 0;
            }
        }
        metric = next;
    }

    Bits info(n_info);
    int state = 0;  // terminated
    for (size_t t = steps; t-- > 0;) {
        const int in = state >> 5;
        if (t < n_info) info[t] = static_cast<std::uint8_t>(in);
        state = ((state << 1) & (kStates - 1)) | decision[t * kStates + static_cast<size_t>(state)];
    }
    return info;
}

Bits fec_encode(std::span<const std::uint8_t> info, CodeRate rate) { return ConvolutionalCode(rate).encode(info); }

Bits fec_decode(std::span<const double> llrs, CodeRate rate, size_t n_info) {
    return ConvolutionalCode(rate).decode(llrs, n_info);
}

// ----- Interleaver --------------------------------------------------------

std::vector<size_t> interleaver_permutation(size_t n) {
    std::vector<size_t> perm(n);
    for (size_t i = 0; i < n; ++i) perm[i] = i;
    std::uint64_t state = 0x5DEECE66DULL ^ n;
    for (size_t i = n; i > 1; --i) {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z ^= z >> 31;
        std::swap(perm[i - 1], perm[static_cast<size_t>(z % i)]);
    }
    return perm;
}

Bits interleave(std::span<const std::uint8_t> bits) {
    const auto perm = interleaver_permutation(bits.size());
    Bits out(bits.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = bits[perm[i]];
    return out;
}

std::vector<double> deinterleave(std::span<const double> llrs) {
    const auto perm = interleaver_permutation(llrs.size());
    std::vector<double> out(llrs.size());
    for (size_t i = 0; i < out.size(); ++i) out[perm[i]] = llrs[i];
    return out;
}

// ----- MCS -----------------------------------------------------------------

std::string McsEntry::label() const {
    const std::string mod = qam_order == 4 ? "QPSK" : std::to_string(qam_order) + "QAM";
    return mod + " r=" + rate.to_string();
}

const std::vector<McsEntry>& mcs_ladder() {
    static const std::vector<McsEntry> ladder = [] {
        std::vector<McsEntry> l;
        for (int q : {4, 16, 64})
            for (CodeRate r : {CodeRate{1, 2}, CodeRate{2, 3}, CodeRate{3, 4}, CodeRate{5, 6}})
                l.push_back({0, q, r});
        std::stable_sort(l.begin(), l.end(), [](const McsEntry& a, const McsEntry& b) {
            if (a.info_rate() != b.info_rate()) return a.info_rate() < b.info_rate();
            return a.qam_order < b.qam_order;
        });
        for (size_t i = 0; i < l.size(); ++i) l[i].index = static_cast<int>(i);
        return l;
    }();
    return ladder;
}

std::optional<int> select_mcs(std::span<const double> per_mcs_bler) {
    if (per_mcs_bler.empty()) throw std::invalid_argument("select_mcs: empty ladder");
    std::optional<int> best;
    for (size_t i = 0; i < per_mcs_bler.size(); ++i)
        if (per_mcs_bler[i] < kTargetBler) best = static_cast<int>(i);
    return best;
}

// ----- Metrics -------------------------------------------------------------

double zak_spectral_efficiency(double bler, double n_info, double bandwidth, double duration, double tau_s) {
    if (!(bandwidth > 0.0) || !(duration > 0.0)) throw std::invalid_argument("zak_spectral_efficiency: invalid frame");
    return (1.0 - bler) * n_info / (bandwidth * (duration + tau_s));
}

double ofdm_spectral_efficiency(double bler, double n_info) { return (1.0 - bler) * n_info / 720.0; }

double zak_guard_overhead(double tau_s, double duration) {
    if (!(duration > 0.0)) throw std::invalid_argument("zak_guard_overhead: T must be positive");
    return tau_s / (duration + tau_s);
}

void BlerCounter::add(long long n_bit_errors, long long n_bits) {
    ++frames;
    if (n_bit_errors > 0) ++errors;
    bit_errors += n_bit_errors;
    bits += n_bits;
}

}  // namespace otfsim
