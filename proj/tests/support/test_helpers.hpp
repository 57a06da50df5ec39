#pragma once

// Shared test utilities. The direct-summation transforms below are the
// independent oracle for the FFT-based implementations: same definition,
// different algorithm, no shared code.

#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "dstbc/ofdm.hpp"

namespace testsupport {

using dstbc::cvec;
using dstbc::cx;

// O(N^2) forward transform straight from the definition.
inline cvec naive_dft(const cvec& x) {
    const std::size_t n = x.size();
    cvec out(n, cx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t m = 0; m < n; ++m) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * m) / static_cast<double>(n);
            out[k] += x[m] * cx(std::cos(ang), std::sin(ang));
        }
        out[k] /= std::sqrt(static_cast<double>(n));
    }
    return out;
}

inline cvec naive_idft(const cvec& x) {
    const std::size_t n = x.size();
    cvec out(n, cx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t m = 0; m < n; ++m) {
            const double ang = 2.0 * std::numbers::pi * static_cast<double>(k * m) / static_cast<double>(n);
            out[k] += x[m] * cx(std::cos(ang), std::sin(ang));
        }
        out[k] /= std::sqrt(static_cast<double>(n));
    }
    return out;
}

// Test data generator, independent of the library's pinned generator.
inline cvec random_block(std::size_t n, unsigned seed) {
    std::mt19937 eng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    cvec out(n);
    for (auto& v : out) v = cx(dist(eng), dist(eng));
    return out;
}

inline double max_abs_diff(const cvec& a, const cvec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace testsupport
