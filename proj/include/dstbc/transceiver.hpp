#pragma once

// End-to-end waveform pipeline: source OFDM encoding, relay
// amplify/process/forward, destination front end, and the analytic
// per-subcarrier model the decoders consume. The pipeline and the model are
// developed independently so each can serve as the other's oracle.
//
// Reversed-slot emission: the relay strips the CP, cyclically reverses the
// body, advances it by cp_len, and rebuilds the CP. The emitted block is then
// the plain periodic extension of the reversed body starting at index 0, so
// after a delay tau the destination's remove_cp -> dest_shift -> dft chain
// yields exactly u_k^tau times the reversed spectrum, the same phase law as
// the unreversed path. Rebuilding without the advance would leave a stray
// u_k^cp_len on every reversed slot.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "channel.hpp"
#include "linalg.hpp"
#include "ofdm.hpp"
#include "rng.hpp"
#include "schedule.hpp"

namespace dstbc {

// Decoding interface for one subcarrier: y = signal_scale * X(s) h + n,
// with n zero-mean complex Gaussian of covariance noise_cov.
struct SubcarrierSystem {
    ConjugateLinearCode code;
    cvec h_k;             // length R: u_k^tau_i * f_i * g_i, f conjugated for conjugating relays
    double signal_scale = 0.0;
    CMat noise_cov;       // T x T Hermitian positive definite
};

// One block per source symbol block: transform per the schedule's modulation
// assignment, scale to average power pi1*P, prepend the cyclic prefix.
// subcarrier_symbols[k] holds the K symbols riding subcarrier k.
inline std::vector<CpBlock> source_encode(const std::vector<cvec>& subcarrier_symbols,
                                          const RelaySchedule& schedule, const PowerConfig& cfg,
                                          std::size_t cp_len) {
    const std::size_t n = subcarrier_symbols.size();
    const std::size_t k = schedule.code.symbols;
    for (const cvec& s : subcarrier_symbols)
        if (s.size() != k)
            throw std::invalid_argument("source_encode: every subcarrier must carry one symbol per block");
    const double amp = std::sqrt(cfg.pi1 * cfg.total_power);

    std::vector<CpBlock> blocks;
    blocks.reserve(k);
    cvec x(n);
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t kk = 0; kk < n; ++kk) x[kk] = subcarrier_symbols[kk][p];
        cvec body = schedule.source_modulation[p] == BlockTransform::idft ? idft(x) : dft(x);
        for (auto& v : body) v *= amp;
        blocks.push_back(add_cp(body, cp_len));
    }
    return blocks;
}

// Broadcast phase: relay i stores f_i * block + noise for every source block.
// Noise is drawn relay-major then block-major so the draw order is fixed.
inline std::vector<std::vector<CpBlock>> relay_receive(const std::vector<CpBlock>& blocks,
                                                       const ChannelRealization& ch, Rng& rng,
                                                       double noise_variance) {
    std::vector<std::vector<CpBlock>> received(ch.relays());
    for (std::size_t i = 0; i < ch.relays(); ++i) {
        received[i].reserve(blocks.size());
        for (const CpBlock& blk : blocks) {
            CpBlock r = blk;
            for (auto& v : r.samples) v *= ch.f[i];
            r.samples = awgn(rng, r.samples, noise_variance);
            received[i].push_back(std::move(r));
        }
    }
    return received;
}

// Cooperation phase, one relay: emit rho * (+/- r), (+/- r*), or the
// reversed forms per the schedule; silent slots emit zeros. Conjugation and
// reversal act on the CP-stripped body and the CP is rebuilt, so every
// emitted block stays a valid cyclic-prefixed symbol.
inline std::vector<CpBlock> relay_process(const std::vector<CpBlock>& received, const RelaySchedule& schedule,
                                          std::size_t relay, const PowerConfig& cfg) {
    check_schedule_legality(schedule);
    if (relay >= schedule.code.relays) throw std::invalid_argument("relay_process: relay index out of range");
    if (received.size() != schedule.code.symbols)
        throw std::invalid_argument("relay_process: expected one received block per source block");

    const double rho = relay_amplify_gain(cfg);
    const std::size_t cp_len = received.empty() ? 0 : received.front().cp_len;
    const std::size_t n = received.empty() ? 0 : received.front().body_len();
    const bool conj = schedule.relay_conjugates(relay);

    std::vector<CpBlock> out;
    out.reserve(schedule.code.slots);
    for (std::size_t m = 0; m < schedule.code.slots; ++m) {
        const RelayAction& act = schedule.actions[relay][m];
        if (act.silent) {
            out.push_back(CpBlock{cvec(n + cp_len, cx(0.0, 0.0)), cp_len});
            continue;
        }
        cvec body = remove_cp(received[act.block]);
        if (conj)
            for (auto& v : body) v = std::conj(v);
        if (schedule.reversed_slot[m]) body = cyclic_delay(zeta(body), -static_cast<long>(cp_len));
        const double s = rho * act.sign;
        for (auto& v : body) v *= s;
        out.push_back(add_cp(body, cp_len));
    }
    return out;
}

// Destination front end: slice the stream into slots, drop each CP, undo the
// reversal's residual rotation on reversed slots, transform, and regroup by
// subcarrier. Returns fft_size vectors y_k of length T.
inline std::vector<cvec> destination_frontend(const ReceivedStream& stream, const RelaySchedule& schedule,
                                              std::size_t fft_size, std::size_t cp_len) {
    const std::size_t t = schedule.code.slots;
    const std::size_t slot_len = fft_size + cp_len;
    if (stream.samples.size() < t * slot_len)
        throw std::invalid_argument("destination_frontend: stream shorter than the frame");

    std::vector<cvec> y(fft_size, cvec(t, cx(0.0, 0.0)));
    cvec slot(slot_len);
    for (std::size_t m = 0; m < t; ++m) {
        std::copy(stream.samples.begin() + static_cast<std::ptrdiff_t>(m * slot_len),
                  stream.samples.begin() + static_cast<std::ptrdiff_t>((m + 1) * slot_len), slot.begin());
        cvec body = remove_cp(CpBlock{slot, cp_len});
        if (schedule.reversed_slot[m]) body = dest_shift(body, cp_len);
        const cvec spec = dft(body);
        for (std::size_t k = 0; k < fft_size; ++k) y[k][m] = spec[k];
    }
    return y;
}

// Analytic per-subcarrier system. The equivalent channel entry for relay i is
// u_k^{tau_i} f_i g_i (f conjugated when the relay conjugates); the noise
// covariance is noise_variance * (I + rho^2 sum_i |g_i|^2 D_i) with D_i
// marking relay i's active slots. A relay forwarding one stored block in two
// slots makes those slots' noise identical up to sign, adding off-diagonal
// terms; in a legal schedule such slots always share the same reversal
// treatment, so the correlation is exactly sign_m * sign_m'.
inline SubcarrierSystem build_subcarrier_model(const ChannelRealization& ch, const RelaySchedule& schedule,
                                               const PowerConfig& cfg, std::size_t fft_size, std::size_t k,
                                               double noise_variance = 1.0) {
    const ConjugateLinearCode& code = schedule.code;
    if (ch.relays() != code.relays)
        throw std::invalid_argument("build_subcarrier_model: channel and code disagree on relay count");
    if (k >= fft_size) throw std::invalid_argument("build_subcarrier_model: subcarrier index out of range");

    SubcarrierSystem sys;
    sys.code = code;
    sys.signal_scale = signal_scale(cfg);
    sys.h_k.resize(code.relays);
    for (std::size_t i = 0; i < code.relays; ++i) {
        const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) * static_cast<double>(ch.tau[i]) /
                             static_cast<double>(fft_size);
        const cx u_tau = std::polar(1.0, phase);
        const cx f = code.columns[i].conjugated ? std::conj(ch.f[i]) : ch.f[i];
        sys.h_k[i] = u_tau * f * ch.g[i];
    }

    const double rho2 = relay_amplify_gain(cfg) * relay_amplify_gain(cfg);
    const std::size_t t = code.slots;
    CMat omega = CMat::identity(t);
    for (std::size_t i = 0; i < code.relays; ++i) {
        const double w = rho2 * std::norm(ch.g[i]);
        for (std::size_t m = 0; m < t; ++m) {
            const RelayAction& am = schedule.actions[i][m];
            if (am.silent) continue;
            omega(m, m) += w;
            for (std::size_t m2 = m + 1; m2 < t; ++m2) {
                const RelayAction& a2 = schedule.actions[i][m2];
                if (a2.silent || a2.block != am.block) continue;
                if (schedule.reversed_slot[m2] != schedule.reversed_slot[m]) continue;  // uncorrelated spectra
                const cx c(w * am.sign * a2.sign, 0.0);
                omega(m, m2) += c;
                omega(m2, m) += c;
            }
        }
    }
    omega *= noise_variance;
    sys.noise_cov = std::move(omega);
    return sys;
}

// Full chain for one frame: encode, broadcast to relays, process, superpose
// at the destination, front end. Zero noise_variance gives the noiseless
// chain used by the model-equivalence oracle.
struct FrameOutput {
    std::vector<cvec> y;  // per subcarrier, length T
    bool cp_exceeded = false;
};

inline FrameOutput transmit_frame(const std::vector<cvec>& subcarrier_symbols, const RelaySchedule& schedule,
                                  const ChannelRealization& ch, const PowerConfig& cfg, std::size_t fft_size,
                                  std::size_t cp_len, Rng& rng, double noise_variance) {
    if (subcarrier_symbols.size() != fft_size)
        throw std::invalid_argument("transmit_frame: one symbol vector per subcarrier required");
    const std::vector<CpBlock> broadcast = source_encode(subcarrier_symbols, schedule, cfg, cp_len);
    const auto at_relays = relay_receive(broadcast, ch, rng, noise_variance);
    std::vector<std::vector<CpBlock>> emissions(ch.relays());
    for (std::size_t i = 0; i < ch.relays(); ++i) emissions[i] = relay_process(at_relays[i], schedule, i, cfg);
    const ReceivedStream stream = superpose_at_destination(emissions, ch, rng, noise_variance);
    FrameOutput out;
    out.cp_exceeded = stream.cp_exceeded;
    out.y = destination_frontend(stream, schedule, fft_size, cp_len);
    return out;
}

// Debug dump of per-relay emissions, one sample per row.
inline void dump_frame_csv(std::ostream& os, const std::vector<std::vector<CpBlock>>& emissions) {
    os << "slot,relay,sample,re,im\n";
    if (emissions.empty()) return;
    const std::size_t slots = emissions.front().size();
    os.precision(17);
    for (std::size_t m = 0; m < slots; ++m)
        for (std::size_t i = 0; i < emissions.size(); ++i) {
            const CpBlock& blk = emissions[i][m];
            for (std::size_t j = 0; j < blk.samples.size(); ++j)
                os << m + 1 << ',' << i + 1 << ',' << j << ',' << blk.samples[j].real() << ','
                   << blk.samples[j].imag() << '\n';
        }
}

}  // namespace dstbc
