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

#include "otfsim/ofdm_modem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace otfsim {

namespace {

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

cplx expj(double ang) { return {std::cos(ang), std::sin(ang)}; }

// sum_{d = K+1}^{inf} 1 / (d + c)^2 by Euler-Maclaurin
double tail_inverse_squares(int K, double c) {
    const double u = K + 1 + c;
    return 1.0 / u + 1.0 / (2 * u * u) + 1.0 / (6 * u * u * u) - 1.0 / (30 * std::pow(u, 5));
}

}  // namespace

// ----- Numerology ----------------------------------------------------------

OfdmNumerology OfdmNumerology::standard(double scs, bool extended, int oversampling) {
    if (!(scs > 0.0)) throw std::invalid_argument("OfdmNumerology: scs must be positive");
    OfdmNumerology num;
    num.scs = scs;
    num.oversampling = oversampling;
    num.extended_cp = extended;
    if (extended) {
        num.n_symbols = 12;
        const double slot = 1e-3 * 15e3 / scs;
        num.t_cp = slot / 12.0 - 1.0 / scs;
    } else {
        num.n_symbols = 14;
        num.t_cp = 4.7e-6 * 15e3 / scs;
    }
    num.validate();
    return num;
}

int OfdmNumerology::cp_samples() const {
    return static_cast<int>(std::ceil(t_cp * sample_rate() - 1e-9));
}

double OfdmNumerology::symbol_start_time(int j) const {
    return static_cast<double>(j * samples_per_symbol() + cp_samples()) / sample_rate();
}

void OfdmNumerology::validate() const {
    if (!(scs > 0.0) || n_subcarriers <= 0 || n_symbols <= 0 || oversampling < 1)
        throw std::invalid_argument("OfdmNumerology: invalid dimensions");
    if (!(t_cp > 0.0)) throw std::invalid_argument("OfdmNumerology: t_cp must be positive");
    if (slot_duration() > 1e-3 + 1e-9) throw std::invalid_argument("OfdmNumerology: slot exceeds 1 ms");
}

// ----- Modulation ----------------------------------------------------------

TimeSignal modulate_ofdm(const OfdmGrid& symbols, const OfdmNumerology& num) {
    num.validate();
    if (symbols.n_symbols != num.n_symbols || symbols.n_subcarriers != num.n_subcarriers)
        throw std::invalid_argument("modulate_ofdm: grid does not match numerology");
    const int Nf = num.fft_size(), cp = num.cp_samples(), sps = num.samples_per_symbol();
    const PhaseTable phase(2 * Nf);
    const double scale = 1.0 / std::sqrt(static_cast<double>(Nf));

    TimeSignal x;
    x.sample_rate = num.sample_rate();
    x.t0 = 0.5 / x.sample_rate;
    x.samples.assign(static_cast<size_t>(num.slot_samples()), cplx{});
    CVec body(static_cast<size_t>(Nf));
    for (int j = 0; j < num.n_symbols; ++j) {
        for (int n = 0; n < Nf; ++n) {
            cplx acc{};
            for (int k = 0; k < num.n_subcarriers; ++k) acc += symbols(j, k) * phase(static_cast<long long>(k) * (2 * n + 1));
            body[static_cast<size_t>(n)] = acc * scale;
        }
        cplx* dst = x.samples.data() + static_cast<size_t>(j) * sps;
        for (int n = 0; n < cp; ++n) dst[n] = body[static_cast<size_t>(pos_mod(n - cp, Nf))];
        for (int n = 0; n < Nf; ++n) dst[cp + n] = body[static_cast<size_t>(n)];
    }
    return x;
}

OfdmGrid demodulate_ofdm(const TimeSignal& y, const OfdmNumerology& num) {
    num.validate();
    if (std::abs(y.sample_rate - num.sample_rate()) > 1e-9 * num.sample_rate())
        throw std::invalid_argument("demodulate_ofdm: sample rate mismatch");
    if (y.samples.size() < static_cast<size_t>(num.slot_samples()))
        throw std::invalid_argument("demodulate_ofdm: signal shorter than one slot");
    if (std::abs(y.t0 * num.sample_rate() - 0.5) > 1e-6)
        throw std::invalid_argument("demodulate_ofdm: signal is not on the slot sample grid");
    const int Nf = num.fft_size(), cp = num.cp_samples(), sps = num.samples_per_symbol();
    const PhaseTable phase(2 * Nf);
    const double scale = 1.0 / std::sqrt(static_cast<double>(Nf));
    OfdmGrid out(num);
    for (int j = 0; j < num.n_symbols; ++j) {
        const cplx* src = y.samples.data() + static_cast<size_t>(j) * sps + cp;
        for (int m = 0; m < num.n_subcarriers; ++m) {
            cplx acc{};
            for (int n = 0; n < Nf; ++n) acc += src[n] * phase(-static_cast<long long>(m) * (2 * n + 1));
            out(j, m) = acc * scale;
        }
    }
    return out;
}

// ----- I/O relation --------------------------------------------------------

cplx ofdm_io_coefficient(const DDSpreadingFunction& chan, const OfdmNumerology& num, double t_start, int m, int k) {
    const double T = num.symbol_duration();
    cplx acc{};
    for (const auto& p : chan.paths) {
        const double a = p.doppler * T + k - m;
        const double ang = 2.0 * kPi * p.doppler * t_start - 2.0 * kPi * (p.delay / T) * (p.doppler * T + k) + kPi * a;
        acc += p.gain * expj(ang) * sinc(a);
    }
    return acc;
}

OfdmIoMatrix compute_ofdm_io_matrix(const DDSpreadingFunction& chan, const OfdmNumerology& num, int symbol_index) {
    chan.validate();
    if (symbol_index < 0 || symbol_index >= num.n_symbols)
        throw std::invalid_argument("compute_ofdm_io_matrix: symbol index out of range");
    OfdmIoMatrix H;
    H.n = num.n_subcarriers;
    H.symbol_start = num.symbol_start_time(symbol_index);
    H.h.resize(static_cast<size_t>(H.n) * H.n);
    for (int m = 0; m < H.n; ++m)
        for (int k = 0; k < H.n; ++k)
            H.h[static_cast<size_t>(m) * H.n + k] = ofdm_io_coefficient(chan, num, H.symbol_start, m, k);
    return H;
}

OfdmGrid apply_ofdm_io(const DDSpreadingFunction& chan, const OfdmGrid& x, const OfdmNumerology& num) {
    OfdmGrid y(num);
    for (int j = 0; j < num.n_symbols; ++j) {
        const OfdmIoMatrix H = compute_ofdm_io_matrix(chan, num, j);
        for (int m = 0; m < H.n; ++m) {
            cplx acc{};
            for (int k = 0; k < H.n; ++k) acc += H(m, k) * x(j, k);
            y(j, m) = acc;
        }
    }
    return y;
}

double ici_off_diagonal_fraction(double nu_T) {
    constexpr int K = 1000;
    DDSpreadingFunction one;
    one.paths.push_back({cplx{1.0, 0.0}, 0.0, nu_T});
    OfdmNumerology num;
    num.scs = 1.0;  // T = 1 so that nu = nu_T
    double diag = std::norm(ofdm_io_coefficient(one, num, 0.0, 0, 0));
    double off = 0.0;
    for (int d = -K; d <= K; ++d)
        if (d != 0) off += std::norm(ofdm_io_coefficient(one, num, 0.0, 0, d));
    const double s = std::sin(kPi * nu_T) / kPi;
    off += s * s * (tail_inverse_squares(K, nu_T) + tail_inverse_squares(K, -nu_T));
    return off / (diag + off);
}

double ofdm_sir_db(const OfdmIoMatrix& H) {
    double s = 0.0, i = 0.0;
    for (int m = 0; m < H.n; ++m)
        for (int k = 0; k < H.n; ++k) (m == k ? s : i) += std::norm(H(m, k));
    if (i <= 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(s / i);
}

std::vector<double> ofdm_expected_sir_db(const DDSpreadingFunction& chan, const OfdmNumerology& num) {
    const double T = num.symbol_duration();
    std::vector<double> out(static_cast<size_t>(num.n_subcarriers));
    for (int m = 0; m < num.n_subcarriers; ++m) {
        double s = 0.0, i = 0.0;
        for (const auto& p : chan.paths) {
            const double pw = std::norm(p.gain);
            for (int k = 0; k < num.n_subcarriers; ++k) {
                const double v = pw * std::pow(sinc(p.doppler * T + k - m), 2);
                (k == m ? s : i) += v;
            }
        }
        out[static_cast<size_t>(m)] = i > 0.0 ? 10.0 * std::log10(s / i) : std::numeric_limits<double>::infinity();
    }
    return out;
}

// ----- DMRS ----------------------------------------------------------------

void DmrsConfig::validate(const OfdmNumerology& num) const {
    if (positions.empty()) throw std::invalid_argument("DmrsConfig: no pilot symbols configured");
    if (comb < 1 || num.n_subcarriers % comb != 0)
        throw std::invalid_argument("DmrsConfig: comb must divide the subcarrier count");
    if (comb_offset < 0 || comb_offset >= comb) throw std::invalid_argument("DmrsConfig: invalid comb offset");
    for (int p : positions)
        if (p < 0 || p >= num.n_symbols)
            throw std::invalid_argument("DmrsConfig: pilot symbol " + std::to_string(p) + " outside slot");
}

bool DmrsConfig::is_pilot(int j, int m) const {
    if ((m - comb_offset) % comb != 0) return false;
    return std::find(positions.begin(), positions.end(), j) != positions.end();
}

int DmrsConfig::pilot_count(const OfdmNumerology& num) const {
    int c = 0;
    for (int j = 0; j < num.n_symbols; ++j)
        for (int m = 0; m < num.n_subcarriers; ++m) c += is_pilot(j, m);
    return c;
}

cplx dmrs_value(const DmrsConfig& dmrs, int j, int m) {
    const int idx = (j * 131 + m * 17 + (m * m) % 7) % 4;
    return std::pow(10.0, dmrs.boost_db / 20.0) * expj(kPi / 4 + kPi / 2 * idx);
}

std::vector<int> ofdm_data_indices(const OfdmNumerology& num, const DmrsConfig& dmrs) {
    std::vector<int> out;
    for (int j = 0; j < num.n_symbols; ++j)
        for (int m = 0; m < num.n_subcarriers; ++m)
            if (!dmrs.is_pilot(j, m)) out.push_back(j * num.n_subcarriers + m);
    return out;
}

OfdmGrid make_ofdm_grid(const OfdmNumerology& num, const DmrsConfig& dmrs, std::span<const cplx> data) {
    dmrs.validate(num);
    const std::vector<int> idx = ofdm_data_indices(num, dmrs);
    if (data.size() != idx.size()) throw std::invalid_argument("make_ofdm_grid: data count mismatch");
    OfdmGrid g(num);
    for (int j = 0; j < num.n_symbols; ++j)
        for (int m = 0; m < num.n_subcarriers; ++m)
            if (dmrs.is_pilot(j, m)) g(j, m) = dmrs_value(dmrs, j, m);
    for (size_t i = 0; i < idx.size(); ++i) g.re[static_cast<size_t>(idx[i])] = data[i];
    return g;
}

namespace {

// Linear interpolation over known abscissae xs (sorted) with linear
// extrapolation outside; a single point gives a constant.
cplx interp_linear(const std::vector<int>& xs, const CVec& ys, int x) {
    if (xs.size() == 1) return ys[0];
    size_t hi = static_cast<size_t>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
    if (hi < xs.size() && xs[hi] == x) return ys[hi];
    if (hi == 0) hi = 1;
    if (hi >= xs.size()) hi = xs.size() - 1;
    const size_t lo = hi - 1;
    const double w = static_cast<double>(x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + w * (ys[hi] - ys[lo]);
}

}  // namespace

OfdmGrid estimate_channel_dmrs(const OfdmGrid& rx, const DmrsConfig& dmrs, const OfdmNumerology& num) {
    dmrs.validate(num);
    if (rx.n_symbols != num.n_symbols || rx.n_subcarriers != num.n_subcarriers)
        throw std::invalid_argument("estimate_channel_dmrs: grid does not match numerology");
    std::vector<int> sym = dmrs.positions;
    std::sort(sym.begin(), sym.end());
    sym.erase(std::unique(sym.begin(), sym.end()), sym.end());

    std::vector<int> carriers;
    for (int m = dmrs.comb_offset; m < num.n_subcarriers; m += dmrs.comb) carriers.push_back(m);

    // Frequency interpolation on every DMRS symbol.
    std::vector<CVec> per_symbol;
    for (int j : sym) {
        CVec ls(carriers.size());
        for (size_t i = 0; i < carriers.size(); ++i)
            ls[i] = rx(j, carriers[i]) / dmrs_value(dmrs, j, carriers[i]);
        CVec full(static_cast<size_t>(num.n_subcarriers));
        for (int m = 0; m < num.n_subcarriers; ++m) full[static_cast<size_t>(m)] = interp_linear(carriers, ls, m);
        per_symbol.push_back(std::move(full));
    }

    OfdmGrid est(num);
    CVec col(sym.size());
    for (int m = 0; m < num.n_subcarriers; ++m) {
        for (size_t s = 0; s < sym.size(); ++s) col[s] = per_symbol[s][static_cast<size_t>(m)];
        for (int j = 0; j < num.n_symbols; ++j) est(j, m) = interp_linear(sym, col, j);
    }
    return est;
}

OfdmGrid mmse_equalize_per_carrier(const OfdmGrid& rx, const OfdmGrid& est, double noise_var) {
    if (rx.n_symbols != est.n_symbols || rx.n_subcarriers != est.n_subcarriers)
        throw std::invalid_argument("mmse_equalize_per_carrier: dims mismatch");
    OfdmGrid out(rx.n_symbols, rx.n_subcarriers);
    for (size_t i = 0; i < rx.re.size(); ++i) {
        const cplx h = est.re[i];
        const double den = std::norm(h) + noise_var;
        out.re[i] = den > 0.0 ? std::conj(h) * rx.re[i] / den : cplx{};
    }
    return out;
}

// ----- Overheads -----------------------------------------------------------

OfdmOverheads ofdm_overheads(const OfdmNumerology& num, const DmrsConfig& dmrs) {
    OfdmOverheads o;
    o.cp_fraction = num.t_cp / (num.symbol_duration() + num.t_cp);
    o.pilot_fraction = dmrs.positions.empty()
                           ? 0.0
                           : static_cast<double>(dmrs.pilot_count(num)) / num.resource_elements();
    o.total_fraction = o.cp_fraction + o.pilot_fraction;
    return o;
}

OverheadPolicyPoint ofdm_overhead_policy(double tau_s, double nu_s) {
    if (tau_s < 0.0 || nu_s < 0.0) throw std::invalid_argument("ofdm_overhead_policy: negative spread");
    OverheadPolicyPoint p;
    p.scs = 120e3;
    for (double s : {15e3, 30e3, 60e3, 120e3})
        if (s >= 30.0 * nu_s) {
            p.scs = s;
            break;
        }
    p.n_dmrs = std::min(4, std::max(1, static_cast<int>(std::ceil(nu_s / 1e3 - 1e-9))));
    const double T = 1.0 / p.scs;
    p.overheads.cp_fraction = tau_s / (T + tau_s);
    p.overheads.pilot_fraction = p.n_dmrs * 24.0 / (14.0 * 48.0);
    p.overheads.total_fraction = p.overheads.cp_fraction + p.overheads.pilot_fraction;
    return p;
}

}  // namespace otfsim
