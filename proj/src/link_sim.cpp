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

#include "otfsim/link_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace otfsim {

namespace {

enum SeedStream : std::uint64_t { kZakNoise = 1, kOfdmNoise = 2, kPayload = 16 };

Bits random_bits(size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Bits b(n);
    for (size_t i = 0; i < n; i += 64) {
        std::uint64_t w = rng();
        for (size_t j = i; j < std::min(n, i + 64); ++j, w >>= 1) b[j] = static_cast<std::uint8_t>(w & 1);
    }
    return b;
}

long long count_errors(const Bits& a, const Bits& b) {
    long long e = 0;
    for (size_t i = 0; i < a.size(); ++i) e += a[i] != b[i];
    return e;
}

// Coded bits padded with zeros up to the symbol capacity, then interleaved.
struct Payload {
    Bits info;
    CVec symbols;
    size_t coded = 0;
};

Payload make_payload(const ConvolutionalCode& code, const McsEntry& mcs, size_t n_symbols, std::uint64_t seed) {
    const size_t capacity = n_symbols * static_cast<size_t>(mcs.bits_per_symbol());
    Payload p;
    p.info = random_bits(code.max_info_bits(capacity), seed);
    Bits coded = code.encode(p.info);
    p.coded = coded.size();
    coded.resize(capacity, 0);
    p.symbols = map_qam(interleave(coded), mcs.qam_order);
    return p;
}

double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

std::string OfdmOperatingPoint::scs_label() const {
    std::string s = std::to_string(static_cast<int>(std::lround(scs / 1e3)));
    return extended_cp ? s + "ext" : s;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

DDSpreadingFunction frame_channel(const SimSettings& s, int frame) {
    ChannelDrawConfig cfg;
    cfg.nu_max = s.nu_max;
    cfg.delay_scale = veh_a_delay_scale(s.tau_s);
    cfg.rng_seed = s.base_seed ^ static_cast<std::uint64_t>(frame);
    return draw_veh_a(cfg);
}

FrameDims zak_dims(const SimSettings& s, double nu_p) {
    return FrameDims::from_doppler_period(s.zak.bandwidth, s.zak.duration, nu_p);
}

// ----- Cache ---------------------------------------------------------------

const FrameCache::ZakFrame& FrameCache::zak(const SimSettings& s, const ZakOperatingPoint& op, int frame) {
    const auto key = std::make_tuple(static_cast<int>(op.pulse.kind), op.pulse.alpha_tau, op.pulse.alpha_nu, op.nu_p, frame);
    auto it = zak_.find(key);
    if (it != zak_.end()) return *it->second;

    const FrameDims dims = zak_dims(s, op.nu_p);
    const DDSpreadingFunction chan = frame_channel(s, frame);
    auto zf = std::make_unique<ZakFrame>();
    zf->heff = ground_truth_heff(chan, op.pulse, dims);

    const ZakModem modem(dims, op.pulse, s.zak.oversampling);
    TimeSignal noise;
    noise.sample_rate = modem.sample_rate();
    noise.t0 = modem.t0();
    const size_t len = modem.tx_length() +
                       static_cast<size_t>(std::ceil(chan.max_delay() * noise.sample_rate)) + FractionalDelay::kHalfTaps;
    noise.samples = add_noise_variance(CVec(len), 1.0, derive_seed(s.base_seed ^ static_cast<std::uint64_t>(frame), kZakNoise));
    zf->unit_noise = modem.demodulate(noise);
    return *zak_.emplace(key, std::move(zf)).first->second;
}

const FrameCache::OfdmFrame& FrameCache::ofdm(const SimSettings& s, const OfdmOperatingPoint& op, int frame) {
    const auto key = std::make_tuple(op.scs, op.extended_cp, frame);
    auto it = ofdm_.find(key);
    if (it != ofdm_.end()) return *it->second;

    const OfdmNumerology num = OfdmNumerology::standard(op.scs, op.extended_cp);
    const DDSpreadingFunction chan = frame_channel(s, frame);
    auto of = std::make_unique<OfdmFrame>();
    for (int j = 0; j < num.n_symbols; ++j) of->io.push_back(compute_ofdm_io_matrix(chan, num, j));
    of->unit_noise = OfdmGrid(num);
    of->unit_noise.re =
        add_noise_variance(CVec(of->unit_noise.re.size()), 1.0, derive_seed(s.base_seed ^ static_cast<std::uint64_t>(frame), kOfdmNoise));
    return *ofdm_.emplace(key, std::move(of)).first->second;
}

// ----- Zak -----------------------------------------------------------------

ZakFrameOutcome simulate_zak_frame(const SimSettings& s, const ZakOperatingPoint& op, const McsEntry& mcs, int frame,
                                   FrameCache& cache) {
    const FrameDims dims = zak_dims(s, op.nu_p);
    const FrameLayout layout = build_layout(dims, s.tau_s, op.allocation);
    const ConvolutionalCode code(mcs.rate);
    const std::uint64_t chan_seed = s.base_seed ^ static_cast<std::uint64_t>(frame);
    const Payload pay = make_payload(code, mcs, layout.data_cells.size(), derive_seed(chan_seed, kPayload + mcs.index));

    const QuasiPeriodicGrid pilot = make_pilot_grid(layout, op.pdr_db);
    QuasiPeriodicGrid x = place_data(layout, pay.symbols);
    x += pilot;

    const double energy = static_cast<double>(layout.data_count()) + pilot_energy(layout, op.pdr_db);
    const double noise_var = energy / (dims.size() * db_to_lin(s.snr_db));

    const FrameCache::ZakFrame& fr = cache.zak(s, op, frame);
    QuasiPeriodicGrid y = discrete_twisted_convolve(fr.heff, x);
    QuasiPeriodicGrid n = fr.unit_noise;
    n *= std::sqrt(noise_var);
    y += n;

    AcquisitionOptions acq = s.zak.acquisition;
    if (acq.nu_s < 0.0) acq.nu_s = 2.0 * s.nu_max;
    const EffectiveChannelEstimate est = acquire_channel(y, layout, pilot(layout.k_p, layout.l_p), acq);

    const EqualizerResult eq = lsmr_equalize(y, est, layout, pilot, noise_var, s.zak.lsmr);

    // Unit-energy data and lambda = noise_var make the regularized solution
    // an LMMSE estimate, whose mean output energy equals its bias.
    double g = 0.0;
    for (const auto& v : eq.symbols) g += std::norm(v);
    g = std::clamp(g / std::max<size_t>(eq.symbols.size(), 1), 0.02, 0.999);
    CVec xd(eq.symbols.size());
    for (size_t i = 0; i < xd.size(); ++i) xd[i] = eq.symbols[i] / g;

    const std::vector<double> llr = deinterleave(demap_qam(xd, mcs.qam_order, (1.0 - g) / g));
    const Bits dec = code.decode(std::span<const double>(llr.data(), pay.coded), pay.info.size());

    ZakFrameOutcome out;
    out.n_info = static_cast<long long>(pay.info.size());
    out.bit_errors = count_errors(dec, pay.info);
    out.est_nmse_db = filter_nmse_db(est.filter, fr.heff);
    out.lsmr_cap = eq.hit_iteration_cap;
    return out;
}

PointResult evaluate_zak_point(const SimSettings& s, const ZakOperatingPoint& op, FrameCache* cache) {
    FrameCache local;
    FrameCache& c = cache ? *cache : local;
    const auto& ladder = mcs_ladder();
    const FrameDims dims = zak_dims(s, op.nu_p);
    const FrameLayout layout = build_layout(dims, s.tau_s, op.allocation);

    PointResult r;
    r.bler.assign(ladder.size(), std::numeric_limits<double>::quiet_NaN());
    r.overhead = layout.overhead();
    double nmse_sum = 0.0;
    int nmse_n = 0;
    for (int m = static_cast<int>(ladder.size()) - 1; m >= 0; --m) {
        BlerCounter ctr{s.max_frames, s.max_errors};
        long long n_info = 0;
        for (int f = 0; !ctr.done(); ++f) {
            const ZakFrameOutcome o = simulate_zak_frame(s, op, ladder[static_cast<size_t>(m)], f, c);
            ctr.add(o.bit_errors, o.n_info);
            n_info = o.n_info;
            if (std::isfinite(o.est_nmse_db)) {
                nmse_sum += o.est_nmse_db;
                ++nmse_n;
            }
        }
        r.frames_simulated += ctr.frames;
        r.bler[static_cast<size_t>(m)] = ctr.bler();
        if (ctr.bler() < kTargetBler) {
            r.mcs = m;
            r.n_info_bits = n_info;
            r.se = zak_spectral_efficiency(ctr.bler(), static_cast<double>(n_info), dims.bandwidth, dims.duration, s.tau_s);
            break;
        }
    }
    if (nmse_n) r.est_nmse_db = nmse_sum / nmse_n;
    return r;
}

// ----- CP-OFDM -------------------------------------------------------------

OfdmFrameOutcome simulate_ofdm_frame(const SimSettings& s, const OfdmOperatingPoint& op, const McsEntry& mcs,
                                     int frame, FrameCache& cache) {
    const OfdmNumerology num = OfdmNumerology::standard(op.scs, op.extended_cp);
    DmrsConfig dmrs;
    dmrs.positions = op.dmrs_positions;
    dmrs.boost_db = op.boost_db;
    const ConvolutionalCode code(mcs.rate);
    const std::vector<int> data_idx = ofdm_data_indices(num, dmrs);
    const std::uint64_t chan_seed = s.base_seed ^ static_cast<std::uint64_t>(frame);
    const Payload pay = make_payload(code, mcs, data_idx.size(), derive_seed(chan_seed, kPayload + mcs.index));

    const OfdmGrid x = make_ofdm_grid(num, dmrs, pay.symbols);
    double e = 0.0;
    for (const auto& v : x.re) e += std::norm(v);
    // SNR is signal power averaged over the slot, CP time included, over the
    // noise power in the occupied band.
    const double useful = 1.0 - ofdm_overheads(num, dmrs).cp_fraction;
    const double noise_var = e / static_cast<double>(x.re.size()) * useful / db_to_lin(s.snr_db);
    const double sd = std::sqrt(noise_var);

    const FrameCache::OfdmFrame& fr = cache.ofdm(s, op, frame);
    OfdmGrid y(num);
    double nmse_num = 0.0, nmse_den = 0.0;
    for (int j = 0; j < num.n_symbols; ++j) {
        const OfdmIoMatrix& H = fr.io[static_cast<size_t>(j)];
        for (int m = 0; m < H.n; ++m) {
            cplx acc{};
            for (int k = 0; k < H.n; ++k) acc += H(m, k) * x(j, k);
            y(j, m) = acc + sd * fr.unit_noise(j, m);
        }
    }
    const OfdmGrid est = estimate_channel_dmrs(y, dmrs, num);
    for (int j = 0; j < num.n_symbols; ++j)
        for (int m = 0; m < num.n_subcarriers; ++m) {
            const cplx h = fr.io[static_cast<size_t>(j)](m, m);
            nmse_num += std::norm(est(j, m) - h);
            nmse_den += std::norm(h);
        }

    const OfdmGrid eq = mmse_equalize_per_carrier(y, est, noise_var);
    CVec xd(data_idx.size());
    std::vector<double> nv(data_idx.size());
    for (size_t i = 0; i < data_idx.size(); ++i) {
        const size_t re = static_cast<size_t>(data_idx[i]);
        const double h2 = std::max(std::norm(est.re[re]), 1e-12);
        const double g = h2 / (h2 + noise_var);
        xd[i] = eq.re[re] / g;
        nv[i] = noise_var / h2;
    }
    const std::vector<double> llr = deinterleave(demap_qam(xd, mcs.qam_order, nv));
    const Bits dec = code.decode(std::span<const double>(llr.data(), pay.coded), pay.info.size());

    OfdmFrameOutcome out;
    out.n_info = static_cast<long long>(pay.info.size());
    out.bit_errors = count_errors(dec, pay.info);
    out.est_nmse_db = 10.0 * std::log10(std::max(nmse_num / std::max(nmse_den, 1e-300), 1e-300));
    return out;
}

PointResult evaluate_ofdm_point(const SimSettings& s, const OfdmOperatingPoint& op, FrameCache* cache) {
    FrameCache local;
    FrameCache& c = cache ? *cache : local;
    const auto& ladder = mcs_ladder();
    const OfdmNumerology num = OfdmNumerology::standard(op.scs, op.extended_cp);
    DmrsConfig dmrs;
    dmrs.positions = op.dmrs_positions;
    dmrs.boost_db = op.boost_db;
    dmrs.validate(num);

    PointResult r;
    r.bler.assign(ladder.size(), std::numeric_limits<double>::quiet_NaN());
    r.overhead = ofdm_overheads(num, dmrs).total_fraction;
    double nmse_sum = 0.0;
    int nmse_n = 0;
    for (int m = static_cast<int>(ladder.size()) - 1; m >= 0; --m) {
        BlerCounter ctr{s.max_frames, s.max_errors};
        long long n_info = 0;
        for (int f = 0; !ctr.done(); ++f) {
            const OfdmFrameOutcome o = simulate_ofdm_frame(s, op, ladder[static_cast<size_t>(m)], f, c);
            ctr.add(o.bit_errors, o.n_info);
            n_info = o.n_info;
            nmse_sum += o.est_nmse_db;
            ++nmse_n;
        }
        r.frames_simulated += ctr.frames;
        r.bler[static_cast<size_t>(m)] = ctr.bler();
        if (ctr.bler() < kTargetBler) {
            r.mcs = m;
            r.n_info_bits = n_info;
            r.se = ofdm_spectral_efficiency(ctr.bler(), static_cast<double>(n_info));
            break;
        }
    }
    if (nmse_n) r.est_nmse_db = nmse_sum / nmse_n;
    return r;
}

}  // namespace otfsim
