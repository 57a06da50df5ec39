#pragma once

// Deterministic randomness. The engine (mt19937_64) and every bit-to-variate
// mapping below are pinned so that a given seed reproduces exactly the same
// stream on any platform. Parallel sweeps rely on this: each frame gets its
// own Rng seeded from (master, point, frame), so results are independent of
// how frames are distributed over workers.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace dstbc {

// splitmix64 step, the usual seed expander.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Collapse (master, a, b) into one well-mixed 64-bit seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    s ^= a;
    h ^= splitmix64(s);
    s ^= b;
    h ^= splitmix64(s);
    return h;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on (0, 1]; never 0, so log(u) below is safe.
    double uniform() { return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double ang = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(ang);
        have_spare_ = true;
        return r * std::cos(ang);
    }

    // Circularly symmetric complex Gaussian with total variance var
    // (var/2 per real component). Real part is drawn first.
    std::complex<double> cnormal(double var = 1.0) {
        double s = std::sqrt(var / 2.0);
        double re = normal();
        double im = normal();
        return {s * re, s * im};
    }

    // Uniform integer in {0, ..., hi}, rejection sampled to avoid modulo bias.
    std::uint64_t uniform_int(std::uint64_t hi) {
        const std::uint64_t range = hi + 1;
        if (range == 0) return eng_();  // hi == UINT64_MAX
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % range;
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace dstbc
