#pragma once

// Coherent decoding of one subcarrier's observation y = scale * X(s) h + n
// with colored Gaussian noise. The metric is the whitened distance
// ||W(y - scale X(s) h)||^2. Because X is linear over the 2K real symbol
// coordinates, the candidate signal is sum_a r_a phi_a with per-coordinate
// basis vectors phi_a = W * scale * X(e_a) h; decoding is nearest-point
// search in that real span. When the whitened basis is orthogonal across the
// declared coordinate groups (checked, not assumed), each group is searched
// independently; otherwise the decoder falls back to the full search and
// flags it.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "builtin_codes.hpp"
#include "code.hpp"
#include "constellation.hpp"
#include "linalg.hpp"
#include "transceiver.hpp"

namespace dstbc {

// W with W Omega W^H = I; rejects near-singular input.
inline CMat whitener(const CMat& omega) { return inverse_sqrt(omega); }

struct DecodeStats {
    std::size_t metric_evaluations = 0;
    bool used_group_path = false;
    bool fell_back_to_full = false;  // groups declared but the whitened basis was not separable
};

// Reusable decoder for one code/constellation under a fixed whitener; the
// channel vector is swapped per subcarrier. Searches are capped at 2^16
// codewords.
class CoherentDecoder {
  public:
    CoherentDecoder(const ConjugateLinearCode& code, const GroupedConstellation& cons, const CMat& white,
                    double scale)
        : code_(code), cons_(cons), white_(white), scale_(scale) {
        require_valid(code_);
        if (cons_.complex_symbols != code_.symbols)
            throw std::invalid_argument("CoherentDecoder: constellation does not match the code");
        if (cons_.codebook_size() == 0) throw std::invalid_argument("CoherentDecoder: empty codebook");
        if (cons_.codebook_size() > search_cap)
            throw std::invalid_argument("CoherentDecoder: codebook larger than the search cap");
        if (white_.rows() != code_.slots || white_.cols() != code_.slots)
            throw std::invalid_argument("CoherentDecoder: whitener has the wrong shape");
        basis_.assign(2 * code_.symbols, cvec(code_.slots));
        choices_.assign(cons_.group_count(), 0);
    }

    // Rebuild the whitened real-coordinate basis for a channel vector and
    // re-test group separability on it.
    void set_channel(const cvec& h) {
        if (h.size() != code_.relays) throw std::invalid_argument("CoherentDecoder: channel length mismatch");
        const std::size_t t = code_.slots;
        cvec raw(t);
        for (std::size_t p = 0; p < code_.symbols; ++p)
            for (std::size_t im = 0; im < 2; ++im) {
                for (std::size_t m = 0; m < t; ++m) {
                    cx acc(0.0, 0.0);
                    for (std::size_t j = 0; j < code_.relays; ++j) {
                        const double a = code_.a(j, m, p);
                        if (a == 0.0) continue;
                        // Basis symbol i in a conjugated column contributes -i.
                        cx unit = im == 0 ? cx(1.0, 0.0) : (code_.columns[j].conjugated ? cx(0.0, -1.0) : cx(0.0, 1.0));
                        acc += a * unit * h[j];
                    }
                    raw[m] = scale_ * acc;
                }
                cvec& phi = basis_[2 * p + im];
                for (std::size_t m = 0; m < t; ++m) {
                    cx acc(0.0, 0.0);
                    for (std::size_t m2 = 0; m2 < t; ++m2) acc += white_(m, m2) * raw[m2];
                    phi[m] = acc;
                }
            }

        // Candidate vectors contributed by each group's points.
        partials_.assign(cons_.group_count(), {});
        for (std::size_t g = 0; g < cons_.group_count(); ++g) {
            partials_[g].assign(cons_.points[g].size(), cvec(t, cx(0.0, 0.0)));
            for (std::size_t c = 0; c < cons_.points[g].size(); ++c)
                for (std::size_t pos = 0; pos < cons_.groups[g].size(); ++pos) {
                    const cvec& phi = basis_[cons_.groups[g][pos]];
                    const double w = cons_.points[g][c][pos];
                    for (std::size_t m = 0; m < t; ++m) partials_[g][c][m] += w * phi[m];
                }
        }

        separable_ = check_separability();
    }

    bool separable() const { return separable_; }

    // Per-group point indices of the decoded codeword (ties -> lowest index).
    const std::vector<std::size_t>& decode_choices(const cvec& y, DecodeStats* stats = nullptr) {
        if (y.size() != code_.slots) throw std::invalid_argument("CoherentDecoder: observation length mismatch");
        const std::size_t t = code_.slots;
        cvec z(t);
        for (std::size_t m = 0; m < t; ++m) {
            cx acc(0.0, 0.0);
            for (std::size_t m2 = 0; m2 < t; ++m2) acc += white_(m, m2) * y[m2];
            z[m] = acc;
        }

        DecodeStats local;
        DecodeStats& st = stats ? *stats : local;
        const bool group_path = separable_ && cons_.group_count() > 1;
        st.used_group_path = group_path;
        st.fell_back_to_full = !separable_ && cons_.group_count() > 1;
        if (group_path)
            decode_grouped(z, st);
        else
            decode_full(z, st);
        return choices_;
    }

    cvec decode(const cvec& y, DecodeStats* stats = nullptr) { return cons_.assemble(decode_choices(y, stats)); }

    const GroupedConstellation& constellation() const { return cons_; }

    static constexpr std::size_t search_cap = std::size_t{1} << 16;

  private:
    // The group metric splits iff cross-group real inner products of the
    // whitened basis vanish; tested relative to the largest basis energy.
    bool check_separability() const {
        double ref = 0.0;
        for (const cvec& phi : basis_) {
            double e = 0.0;
            for (const auto& v : phi) e += std::norm(v);
            ref = std::max(ref, e);
        }
        if (ref == 0.0) return true;
        for (std::size_t g = 0; g < cons_.group_count(); ++g)
            for (std::size_t g2 = g + 1; g2 < cons_.group_count(); ++g2)
                for (std::size_t a : cons_.groups[g])
                    for (std::size_t b : cons_.groups[g2]) {
                        double cross = 0.0;
                        for (std::size_t m = 0; m < code_.slots; ++m)
                            cross += (std::conj(basis_[a][m]) * basis_[b][m]).real();
                        if (std::abs(cross) > 1e-9 * ref) return false;
                    }
        return true;
    }

    void decode_grouped(const cvec& z, DecodeStats& st) {
        for (std::size_t g = 0; g < cons_.group_count(); ++g) {
            double best = 0.0;
            std::size_t best_c = 0;
            for (std::size_t c = 0; c < partials_[g].size(); ++c) {
                const cvec& v = partials_[g][c];
                double metric = 0.0;
                for (std::size_t m = 0; m < z.size(); ++m)
                    metric += std::norm(v[m]) - 2.0 * (std::conj(z[m]) * v[m]).real();
                ++st.metric_evaluations;
                if (c == 0 || metric < best) {
                    best = metric;
                    best_c = c;
                }
            }
            choices_[g] = best_c;
        }
    }

    void decode_full(const cvec& z, DecodeStats& st) {
        const std::size_t n = cons_.codebook_size();
        const std::size_t t = z.size();
        std::vector<std::size_t> choice(cons_.group_count(), 0);
        cvec v(t);
        double best = 0.0;
        bool first = true;
        for (std::size_t idx = 0; idx < n; ++idx) {
            std::size_t rem = idx;
            for (std::size_t g = cons_.group_count(); g-- > 0;) {
                choice[g] = rem % partials_[g].size();
                rem /= partials_[g].size();
            }
            std::fill(v.begin(), v.end(), cx(0.0, 0.0));
            for (std::size_t g = 0; g < cons_.group_count(); ++g)
                for (std::size_t m = 0; m < t; ++m) v[m] += partials_[g][choice[g]][m];
            double metric = 0.0;
            for (std::size_t m = 0; m < t; ++m) {
                const cx d = z[m] - v[m];
                metric += std::norm(d);
            }
            ++st.metric_evaluations;
            if (first || metric < best) {
                best = metric;
                choices_ = choice;
                first = false;
            }
        }
    }

    ConjugateLinearCode code_;
    GroupedConstellation cons_;
    CMat white_;
    double scale_;
    std::vector<cvec> basis_;                      // 2K whitened basis vectors
    std::vector<std::vector<cvec>> partials_;      // [group][point] candidate contributions
    std::vector<std::size_t> choices_;
    bool separable_ = false;
};

// Whitened ML over an explicit codeword list; ties break to the lowest index.
inline cvec ml_decode(const cvec& y, const SubcarrierSystem& sys, const std::vector<cvec>& codebook,
                      DecodeStats* stats = nullptr) {
    if (codebook.empty()) throw std::invalid_argument("ml_decode: empty codebook");
    const CMat w = whitener(sys.noise_cov);
    const std::size_t t = sys.code.slots;
    cvec z(t);
    for (std::size_t m = 0; m < t; ++m) {
        cx acc(0.0, 0.0);
        for (std::size_t m2 = 0; m2 < t; ++m2) acc += w(m, m2) * y[m2];
        z[m] = acc;
    }

    DecodeStats local;
    DecodeStats& st = stats ? *stats : local;
    double best = 0.0;
    std::size_t best_idx = 0;
    cvec model(t);
    for (std::size_t idx = 0; idx < codebook.size(); ++idx) {
        const CMat x = codeword(sys.code, codebook[idx]);
        for (std::size_t m = 0; m < t; ++m) {
            cx acc(0.0, 0.0);
            for (std::size_t j = 0; j < sys.code.relays; ++j) acc += x(m, j) * sys.h_k[j];
            model[m] = sys.signal_scale * acc;
        }
        double metric = 0.0;
        for (std::size_t m = 0; m < t; ++m) {
            cx wm(0.0, 0.0);
            for (std::size_t m2 = 0; m2 < t; ++m2) wm += w(m, m2) * model[m2];
            metric += std::norm(z[m] - wm);
        }
        ++st.metric_evaluations;
        if (idx == 0 || metric < best) {
            best = metric;
            best_idx = idx;
        }
    }
    return codebook[best_idx];
}

// Group decoding over an explicit coordinate partition.
inline cvec group_decode(const cvec& y, const SubcarrierSystem& sys, const GroupedConstellation& cons,
                         DecodeStats* stats = nullptr) {
    CoherentDecoder dec(sys.code, cons, whitener(sys.noise_cov), sys.signal_scale);
    dec.set_channel(sys.h_k);
    return dec.decode(y, stats);
}

// Convenience form driven by the code's own partition and signal sets.
inline cvec group_decode(const cvec& y, const SubcarrierSystem& sys, DecodeStats* stats = nullptr) {
    return group_decode(y, sys, constellation_for(sys.code), stats);
}

}  // namespace dstbc
