#pragma once

// Differential transmission: data picks a scaled-unitary matrix C from a
// finite codebook and the transmitted symbol vector evolves as
// s^t = (1/a_{t-1}) C_t s^{t-1} from a fixed reference s^0. Because every
// codebook matrix commutes with the code columns (plainly, or through a
// conjugate for conjugated columns), the received vectors obey
// y^t = (1/a_{t-1}) C_t y^{t-1} + noise and the channel never needs to be
// estimated. Decoding searches the codebook for the best predictor of y^t
// from y^{t-1}, with a per-digit fast path when the prediction basis stays
// orthogonal across digits.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "code.hpp"
#include "decoder.hpp"
#include "linalg.hpp"
#include "ofdm.hpp"

namespace dstbc {

// Codewords are indexed by a fixed-radix digit string, digit 0 most
// significant. Each digit picks one point of `signal_set`; the matrix is the
// real-linear combination of per-digit basis matrices.
struct DifferentialCodebook {
    std::size_t dims = 0;                          // square matrix side
    std::vector<std::vector<double>> signal_set;   // shared per-digit point set
    std::vector<std::vector<CMat>> bases;          // [digit][coordinate] unit-value matrices
    std::vector<CMat> matrices;                    // all codewords, digit-odometer order
    std::vector<double> scales;                    // a with C C^H = a^2 I

    std::size_t size() const { return matrices.size(); }
    std::size_t digit_count() const { return bases.size(); }
    std::size_t radix() const { return signal_set.size(); }

    std::size_t digit_of(std::size_t index, std::size_t pos) const {
        std::size_t shift = digit_count() - 1 - pos;
        for (std::size_t s = 0; s < shift; ++s) index /= radix();
        return index % radix();
    }

    std::size_t index_of(const std::vector<std::size_t>& digits) const {
        if (digits.size() != digit_count())
            throw std::invalid_argument("differential codebook: wrong digit count");
        std::size_t idx = 0;
        for (std::size_t d : digits) {
            if (d >= radix()) throw std::invalid_argument("differential codebook: digit out of range");
            idx = idx * radix() + d;
        }
        return idx;
    }
};

// 4x4 codebook for the four-relay coordinate-interleaved code. Entries are
// built from four complex values z1..z4 laid out as
//   (1/2) [ z1   z2  -z3* -z4* ]
//         [ z2   z1  -z4* -z3* ]
//         [ z3   z4   z1*  z2* ]
//         [ z4   z3   z2*  z1* ]
// with the real and imaginary coordinate pairs (z1I,z2I), (z1Q,z2Q),
// (z3I,z4I), (z3Q,z4Q) each drawn from a common 4-point set. One coordinate
// of every pair is always zero, which keeps the rows orthogonal.
inline DifferentialCodebook build_fourgroup_diff_r4() {
    auto make = [](cx z1, cx z2, cx z3, cx z4) {
        CMat c(4, 4);
        c(0, 0) = z1; c(0, 1) = z2; c(0, 2) = -std::conj(z3); c(0, 3) = -std::conj(z4);
        c(1, 0) = z2; c(1, 1) = z1; c(1, 2) = -std::conj(z4); c(1, 3) = -std::conj(z3);
        c(2, 0) = z3; c(2, 1) = z4; c(2, 2) = std::conj(z1);  c(2, 3) = std::conj(z2);
        c(3, 0) = z4; c(3, 1) = z3; c(3, 2) = std::conj(z2);  c(3, 3) = std::conj(z1);
        c *= cx(0.5, 0.0);
        return c;
    };

    DifferentialCodebook cb;
    cb.dims = 4;
    const double lo = 1.0 / std::sqrt(3.0);
    const double hi = std::sqrt(5.0 / 3.0);
    cb.signal_set = {{lo, 0.0}, {-lo, 0.0}, {0.0, hi}, {0.0, -hi}};

    const cx one(1.0, 0.0), im(0.0, 1.0), zero(0.0, 0.0);
    cb.bases = {{make(one, zero, zero, zero), make(zero, one, zero, zero)},
                {make(im, zero, zero, zero), make(zero, im, zero, zero)},
                {make(zero, zero, one, zero), make(zero, zero, zero, one)},
                {make(zero, zero, im, zero), make(zero, zero, zero, im)}};

    const std::size_t radix = cb.signal_set.size();
    std::size_t total = 1;
    for (std::size_t p = 0; p < cb.bases.size(); ++p) total *= radix;
    cb.matrices.reserve(total);
    cb.scales.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        CMat c(4, 4);
        double energy = 0.0;
        for (std::size_t p = 0; p < cb.bases.size(); ++p) {
            const auto& pt = cb.signal_set[cb.digit_of(idx, p)];
            for (std::size_t coord = 0; coord < 2; ++coord) {
                if (pt[coord] == 0.0) continue;
                CMat part = cb.bases[p][coord];
                part *= cx(pt[coord], 0.0);
                c += part;
            }
            energy += pt[0] * pt[0] + pt[1] * pt[1];
        }
        cb.matrices.push_back(c);
        cb.scales.push_back(std::sqrt(energy / 4.0));
    }
    return cb;
}

// Checks that every codeword slides through the code columns: for plain
// columns C A_i = A_i C, for conjugated ones C A_i = A_i conj(C).
struct CommutationReport {
    bool pass = true;
    std::size_t witness_codeword = 0;
    std::size_t witness_relay = 0;
    double max_error = 0.0;

    static constexpr double tolerance = 1e-10;
};

inline CommutationReport check_commutation(const DifferentialCodebook& cb, const ConjugateLinearCode& code) {
    if (code.slots != cb.dims || code.symbols != cb.dims)
        throw std::invalid_argument("check_commutation: code shape does not match the codebook");
    std::vector<CMat> columns;
    columns.reserve(code.relays);
    for (std::size_t j = 0; j < code.relays; ++j) {
        CMat a(code.slots, code.symbols);
        for (std::size_t m = 0; m < code.slots; ++m)
            for (std::size_t p = 0; p < code.symbols; ++p) a(m, p) = cx(code.a(j, m, p), 0.0);
        columns.push_back(a);
    }

    CommutationReport report;
    for (std::size_t idx = 0; idx < cb.size(); ++idx)
        for (std::size_t j = 0; j < code.relays; ++j) {
            const CMat& c = cb.matrices[idx];
            const CMat rhs = code.columns[j].conjugated ? columns[j] * c.conjugate() : columns[j] * c;
            const double err = (c * columns[j] - rhs).max_abs();
            if (err > report.max_error) report.max_error = err;
            if (err > CommutationReport::tolerance && report.pass) {
                report.pass = false;
                report.witness_codeword = idx;
                report.witness_relay = j;
            }
        }
    return report;
}

// Reference vector plus one step per codeword index; a_0 = 1.
inline std::vector<cvec> diff_encode(const std::vector<std::size_t>& indices, const DifferentialCodebook& cb,
                                     std::size_t relays) {
    if (relays == 0) throw std::invalid_argument("diff_encode: no relays");
    if (cb.size() == 0) throw std::invalid_argument("diff_encode: empty codebook");
    std::vector<cvec> out;
    out.reserve(indices.size() + 1);
    cvec s(cb.dims, cx(0.0, 0.0));
    s[0] = cx(std::sqrt(static_cast<double>(relays)), 0.0);
    out.push_back(s);
    double prev_scale = 1.0;
    for (std::size_t idx : indices) {
        if (idx >= cb.size()) throw std::invalid_argument("diff_encode: codeword index outside the codebook");
        cvec next = cb.matrices[idx] * out.back();
        for (auto& v : next) v /= prev_scale;
        out.push_back(std::move(next));
        prev_scale = cb.scales[idx];
    }
    return out;
}

namespace detail {

inline void validate_diff_inputs(const cvec& y_t, const cvec& y_prev, const DifferentialCodebook& cb,
                                 double prev_scale) {
    if (cb.size() == 0) throw std::invalid_argument("diff_decode: empty codebook");
    if (y_t.size() != cb.dims || y_prev.size() != cb.dims)
        throw std::invalid_argument("diff_decode: observation length mismatch");
    if (!(prev_scale > 0.0)) throw std::invalid_argument("diff_decode: previous scale must be positive");
}

}  // namespace detail

// Full codebook search for argmin_C || y_t - (1/prev_scale) C y_prev ||^2;
// ties break to the lowest index.
inline std::size_t diff_decode(const cvec& y_t, const cvec& y_prev, const DifferentialCodebook& cb,
                               double prev_scale = 1.0, DecodeStats* stats = nullptr) {
    detail::validate_diff_inputs(y_t, y_prev, cb, prev_scale);
    cvec w = y_prev;
    for (auto& v : w) v /= prev_scale;

    DecodeStats local;
    DecodeStats& st = stats ? *stats : local;
    double best = 0.0;
    std::size_t best_idx = 0;
    for (std::size_t idx = 0; idx < cb.size(); ++idx) {
        const cvec v = cb.matrices[idx] * w;
        double metric = 0.0;
        for (std::size_t m = 0; m < v.size(); ++m) metric += std::norm(y_t[m] - v[m]);
        ++st.metric_evaluations;
        if (idx == 0 || metric < best) {
            best = metric;
            best_idx = idx;
        }
    }
    return best_idx;
}

// Digit-by-digit search. The per-digit prediction bases must be orthogonal
// under the real inner product on the actual y_prev probe; otherwise the
// decoder falls back to the full search and flags it.
inline std::size_t diff_decode_grouped(const cvec& y_t, const cvec& y_prev, const DifferentialCodebook& cb,
                                       double prev_scale = 1.0, DecodeStats* stats = nullptr) {
    detail::validate_diff_inputs(y_t, y_prev, cb, prev_scale);
    cvec w = y_prev;
    for (auto& v : w) v /= prev_scale;

    const std::size_t digits = cb.digit_count();
    std::vector<std::vector<cvec>> u(digits);
    double ref = 0.0;
    for (std::size_t p = 0; p < digits; ++p) {
        u[p].reserve(cb.bases[p].size());
        for (const CMat& b : cb.bases[p]) {
            cvec v = b * w;
            double e = 0.0;
            for (const auto& x : v) e += std::norm(x);
            ref = std::max(ref, e);
            u[p].push_back(std::move(v));
        }
    }

    bool separable = true;
    for (std::size_t p = 0; p < digits && separable; ++p)
        for (std::size_t q = p + 1; q < digits && separable; ++q)
            for (const cvec& a : u[p])
                for (const cvec& b : u[q]) {
                    double cross = 0.0;
                    for (std::size_t m = 0; m < cb.dims; ++m) cross += (std::conj(a[m]) * b[m]).real();
                    if (std::abs(cross) > 1e-9 * ref) {
                        separable = false;
                        break;
                    }
                }

    DecodeStats local;
    DecodeStats& st = stats ? *stats : local;
    if (!separable) {
        const std::size_t idx = diff_decode(y_t, y_prev, cb, prev_scale, &st);
        st.fell_back_to_full = true;
        return idx;
    }

    st.used_group_path = true;
    std::vector<std::size_t> chosen(digits, 0);
    cvec v(cb.dims);
    for (std::size_t p = 0; p < digits; ++p) {
        double best = 0.0;
        for (std::size_t c = 0; c < cb.radix(); ++c) {
            const auto& pt = cb.signal_set[c];
            for (std::size_t m = 0; m < cb.dims; ++m) v[m] = pt[0] * u[p][0][m] + pt[1] * u[p][1][m];
            double metric = 0.0;
            for (std::size_t m = 0; m < cb.dims; ++m)
                metric += std::norm(v[m]) - 2.0 * (std::conj(y_t[m]) * v[m]).real();
            ++st.metric_evaluations;
            if (c == 0 || metric < best) {
                best = metric;
                chosen[p] = c;
            }
        }
    }
    return cb.index_of(chosen);
}

// Decision-directed chain: tracks the running codeword scale so callers only
// ever hand over consecutive received vectors.
class DifferentialDecoder {
  public:
    explicit DifferentialDecoder(const DifferentialCodebook& cb, bool grouped = true)
        : cb_(&cb), grouped_(grouped) {}

    void reset() { scale_ = 1.0; }

    std::size_t decode_step(const cvec& y_t, const cvec& y_prev, DecodeStats* stats = nullptr) {
        const std::size_t idx = grouped_ ? diff_decode_grouped(y_t, y_prev, *cb_, scale_, stats)
                                         : diff_decode(y_t, y_prev, *cb_, scale_, stats);
        scale_ = cb_->scales[idx];
        return idx;
    }

    double running_scale() const { return scale_; }

  private:
    const DifferentialCodebook* cb_;
    bool grouped_;
    double scale_ = 1.0;
};

}  // namespace dstbc
