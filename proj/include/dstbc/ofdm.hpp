#pragma once

// Unitary DFT/IDFT, cyclic time reversal, cyclic delay and cyclic-prefix
// framing for OFDM blocks. Both transforms carry the 1/sqrt(N) factor, so
// dft(idft(x)) == x and both preserve energy. The time reversal fixes index 0
// and mirrors the rest; together with the unitary scaling this gives the
// identities the rest of the library leans on:
//
//   conj(dft(x))  == idft(conj(x))
//   dft(dft(x))   == zeta(x)
//   dft(zeta(x))  == idft(x)
//   dft(cyclic_delay(x, d))[k] == exp(-i*2*pi*k*d/N) * dft(x)[k]

#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace dstbc {

using cx = std::complex<double>;
using cvec = std::vector<cx>;

inline bool is_power_of_two(std::size_t n) { return n >= 1 && (n & (n - 1)) == 0; }

namespace detail {

struct FftPlan {
    std::size_t n = 0;
    std::vector<std::size_t> bitrev;
    cvec twiddle;  // exp(-i*2*pi*j/n), j < n/2
};

inline const FftPlan& fft_plan(std::size_t n) {
    thread_local std::map<std::size_t, FftPlan> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    FftPlan plan;
    plan.n = n;
    plan.bitrev.resize(n);
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < log2n; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
        plan.bitrev[i] = r;
    }
    plan.twiddle.resize(n / 2);
    for (std::size_t j = 0; j < n / 2; ++j) {
        double ang = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
        plan.twiddle[j] = cx(std::cos(ang), std::sin(ang));
    }
    return cache.emplace(n, std::move(plan)).first->second;
}

// In-place radix-2, unscaled. inverse=true conjugates the twiddles.
inline void fft_inplace(cvec& a, bool inverse) {
    const std::size_t n = a.size();
    const FftPlan& plan = fft_plan(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = plan.bitrev[i];
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        for (std::size_t base = 0; base < n; base += len) {
            for (std::size_t j = 0; j < half; ++j) {
                cx w = plan.twiddle[j * step];
                if (inverse) w = std::conj(w);
                cx u = a[base + j];
                cx v = a[base + j + half] * w;
                a[base + j] = u + v;
                a[base + j + half] = u - v;
            }
        }
    }
}

inline void require_transform_size(std::size_t n, const char* op) {
    if (!is_power_of_two(n) || n < 2)
        throw std::invalid_argument(std::string(op) + ": block length must be a power of two >= 2, got " +
                                    std::to_string(n));
}

}  // namespace detail

// Forward transform, unitary: X[k] = (1/sqrt(N)) sum_n x[n] exp(-i*2*pi*k*n/N).
inline cvec dft(const cvec& x) {
    detail::require_transform_size(x.size(), "dft");
    cvec a = x;
    detail::fft_inplace(a, false);
    const double s = 1.0 / std::sqrt(static_cast<double>(a.size()));
    for (auto& v : a) v *= s;
    return a;
}

// Inverse transform, same 1/sqrt(N) scaling, so idft(dft(x)) == x.
inline cvec idft(const cvec& x) {
    detail::require_transform_size(x.size(), "idft");
    cvec a = x;
    detail::fft_inplace(a, true);
    const double s = 1.0 / std::sqrt(static_cast<double>(a.size()));
    for (auto& v : a) v *= s;
    return a;
}

// Cyclic time reversal: out[m] = x[(N - m) mod N]. Fixes index 0.
inline cvec zeta(const cvec& x) {
    if (x.empty()) throw std::invalid_argument("zeta: empty block");
    const std::size_t n = x.size();
    cvec out(n);
    out[0] = x[0];
    for (std::size_t m = 1; m < n; ++m) out[m] = x[n - m];
    return out;
}

// Cyclic right shift by d samples: out[m] = x[(m - d) mod N]. Negative d shifts left.
inline cvec cyclic_delay(const cvec& x, long d) {
    if (x.empty()) throw std::invalid_argument("cyclic_delay: empty block");
    const long n = static_cast<long>(x.size());
    long r = d % n;
    if (r < 0) r += n;
    cvec out(x.size());
    for (long m = 0; m < n; ++m) out[static_cast<std::size_t>(m)] = x[static_cast<std::size_t>((m - r + n) % n)];
    return out;
}

// A time-domain block of N + cp_len samples whose first cp_len samples, at
// construction via add_cp, replicate the tail of the body. Blocks that have
// passed through noise keep the same framing but not the replication.
struct CpBlock {
    cvec samples;
    std::size_t cp_len = 0;

    std::size_t body_len() const { return samples.size() - cp_len; }

    cvec body() const {
        if (samples.size() < cp_len) throw std::runtime_error("CpBlock: framing shorter than its prefix");
        return cvec(samples.begin() + static_cast<std::ptrdiff_t>(cp_len), samples.end());
    }
};

// Prepend the last l samples of the body. 0 <= l <= N.
inline CpBlock add_cp(const cvec& body, std::size_t l) {
    if (body.empty()) throw std::invalid_argument("add_cp: empty body");
    if (l > body.size())
        throw std::invalid_argument("add_cp: prefix length " + std::to_string(l) + " exceeds block length " +
                                    std::to_string(body.size()));
    CpBlock b;
    b.cp_len = l;
    b.samples.reserve(body.size() + l);
    b.samples.insert(b.samples.end(), body.end() - static_cast<std::ptrdiff_t>(l), body.end());
    b.samples.insert(b.samples.end(), body.begin(), body.end());
    return b;
}

// Drop the prefix, keep the N-sample body.
inline cvec remove_cp(const CpBlock& block) {
    if (block.samples.size() <= block.cp_len)
        throw std::runtime_error("remove_cp: block of " + std::to_string(block.samples.size()) +
                                 " samples cannot carry a prefix of " + std::to_string(block.cp_len));
    return block.body();
}

// Cyclic right rotation of a body by the prefix length; the receiver applies
// this to slots that carry time-reversed blocks so their delay phases line up
// with the unreversed slots. out[m] = x[(m - l) mod N], 0 <= l <= N.
inline cvec dest_shift(const cvec& body, std::size_t l) {
    if (body.empty()) throw std::invalid_argument("dest_shift: empty block");
    if (l > body.size())
        throw std::invalid_argument("dest_shift: shift " + std::to_string(l) + " exceeds block length " +
                                    std::to_string(body.size()));
    return cyclic_delay(body, static_cast<long>(l));
}

// True when the first cp_len samples replicate the body tail to within tol.
inline bool has_valid_prefix(const CpBlock& block, double tol = 1e-12) {
    if (block.samples.size() < 2 * block.cp_len) return false;
    const std::size_t body_tail = block.samples.size() - block.cp_len;  // == cp_len + (N - cp_len)
    for (std::size_t j = 0; j < block.cp_len; ++j)
        if (std::abs(block.samples[j] - block.samples[body_tail + j]) > tol) return false;
    return true;
}

}  // namespace dstbc
