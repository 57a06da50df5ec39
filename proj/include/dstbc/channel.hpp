#pragma once

// Quasi-static flat-fading two-hop links with integer relative delays, AWGN,
// and the two-phase power bookkeeping. Both hop gains are unit-variance
// complex Gaussians; delays are whole samples, relay 1 defining t = 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ofdm.hpp"
#include "rng.hpp"

namespace dstbc {

struct PowerConfig {
    double total_power = 1.0;  // P, linear
    double pi1 = 0.5;          // source-phase fraction
    double pi2 = 0.25;         // relay-phase fraction (per relay)
};

inline void require_valid(const PowerConfig& cfg) {
    if (!(cfg.total_power > 0.0)) throw std::invalid_argument("PowerConfig: total power must be positive");
    if (!(cfg.pi1 > 0.0) || !(cfg.pi2 > 0.0)) throw std::invalid_argument("PowerConfig: power fractions must be positive");
}

// Half the power to the source phase, the other half split across R relays.
inline PowerConfig default_power_config(double total_power, std::size_t relays) {
    if (relays == 0) throw std::invalid_argument("default_power_config: need at least one relay");
    return PowerConfig{total_power, 0.5, 0.5 / static_cast<double>(relays)};
}

// rho = sqrt(pi2*P / (pi1*P + 1)): the amplification each relay applies so its
// average transmit power is pi2*P given unit-variance relay noise.
inline double relay_amplify_gain(const PowerConfig& cfg) {
    require_valid(cfg);
    return std::sqrt(cfg.pi2 * cfg.total_power / (cfg.pi1 * cfg.total_power + 1.0));
}

// Composite source->destination coefficient sqrt(pi1*pi2*P^2 / (pi1*P + 1)):
// the scale multiplying the codeword in the per-subcarrier model.
inline double signal_scale(const PowerConfig& cfg) {
    return std::sqrt(cfg.pi1 * cfg.total_power) * relay_amplify_gain(cfg);
}

struct ChannelRealization {
    cvec f;                        // source -> relay gains
    cvec g;                        // relay -> destination gains
    std::vector<std::size_t> tau;  // arrival offsets in samples, tau[0] == 0, nondecreasing

    std::size_t relays() const { return f.size(); }
};

// f_i, g_i i.i.d. CN(0,1); tau_1 = 0 and the remaining delays i.i.d. uniform
// on {0..tau_max}, sorted nondecreasing.
inline ChannelRealization sample_channel(Rng& rng, std::size_t relays, std::size_t tau_max) {
    if (relays == 0) throw std::invalid_argument("sample_channel: need at least one relay");
    ChannelRealization ch;
    ch.f.reserve(relays);
    ch.g.reserve(relays);
    for (std::size_t i = 0; i < relays; ++i) ch.f.push_back(rng.cnormal(1.0));
    for (std::size_t i = 0; i < relays; ++i) ch.g.push_back(rng.cnormal(1.0));
    ch.tau.assign(relays, 0);
    for (std::size_t i = 1; i < relays; ++i) ch.tau[i] = static_cast<std::size_t>(rng.uniform_int(tau_max));
    std::sort(ch.tau.begin() + 1, ch.tau.end());
    return ch;
}

// Adds circularly symmetric complex Gaussian noise, per-sample variance
// noise_variance split equally between real and imaginary parts.
inline cvec awgn(Rng& rng, const cvec& block, double noise_variance) {
    if (noise_variance < 0.0) throw std::invalid_argument("awgn: negative noise variance");
    cvec out = block;
    if (noise_variance == 0.0) return out;
    for (auto& v : out) v += rng.cnormal(noise_variance);
    return out;
}

struct ReceivedStream {
    cvec samples;
    bool cp_exceeded = false;  // some delay landed beyond the cyclic prefix
};

// Sum of all relays' slot transmissions, each delayed by its relay's tau,
// plus destination noise over the whole observation window. Samples outside
// a relay's transmission window contribute nothing.
inline ReceivedStream superpose_at_destination(const std::vector<std::vector<CpBlock>>& transmissions,
                                               const ChannelRealization& ch, Rng& rng, double noise_variance) {
    if (transmissions.size() != ch.relays())
        throw std::invalid_argument("superpose_at_destination: one transmission sequence per relay required");
    if (transmissions.empty() || transmissions.front().empty())
        throw std::invalid_argument("superpose_at_destination: no transmissions");
    const std::size_t slots = transmissions.front().size();
    const std::size_t slot_len = transmissions.front().front().samples.size();
    const std::size_t cp_len = transmissions.front().front().cp_len;
    for (const auto& relay_tx : transmissions) {
        if (relay_tx.size() != slots) throw std::invalid_argument("superpose_at_destination: unequal frame lengths");
        for (const auto& b : relay_tx)
            if (b.samples.size() != slot_len || b.cp_len != cp_len)
                throw std::invalid_argument("superpose_at_destination: unequal slot framing");
    }

    std::size_t max_tau = 0;
    for (std::size_t t : ch.tau) max_tau = std::max(max_tau, t);

    ReceivedStream out;
    out.cp_exceeded = max_tau > cp_len;
    out.samples.assign(slots * slot_len + max_tau, cx(0.0, 0.0));
    for (std::size_t i = 0; i < ch.relays(); ++i) {
        const std::size_t base = ch.tau[i];
        for (std::size_t m = 0; m < slots; ++m) {
            const cvec& s = transmissions[i][m].samples;
            const std::size_t off = base + m * slot_len;
            for (std::size_t n = 0; n < slot_len; ++n) out.samples[off + n] += ch.g[i] * s[n];
        }
    }
    if (noise_variance > 0.0)
        for (auto& v : out.samples) v += rng.cnormal(noise_variance);
    else if (noise_variance < 0.0)
        throw std::invalid_argument("superpose_at_destination: negative noise variance");
    return out;
}

}  // namespace dstbc
