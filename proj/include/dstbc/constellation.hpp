#pragma once

// Signal sets over the real coordinates of a codeword's complex symbols.
// A constellation partitions the 2K real coordinates (r[2j] = Re s_j,
// r[2j+1] = Im s_j) into groups, each group drawing jointly from its own
// finite point set. Groups are the unit of both bit mapping and reduced
// complexity decoding. Point lists are ordered so that Gray-coded indices
// give geometrically adjacent points one differing bit.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "ofdm.hpp"

namespace dstbc {

inline std::uint32_t gray_encode(std::uint32_t i) { return i ^ (i >> 1); }

inline std::uint32_t gray_decode(std::uint32_t g) {
    std::uint32_t i = g;
    for (std::uint32_t shift = 1; shift < 32; shift <<= 1) i ^= i >> shift;
    return i;
}

struct GroupedConstellation {
    std::size_t complex_symbols = 0;                        // K; coordinate space has 2K reals
    std::vector<std::vector<std::size_t>> groups;           // partition of {0 .. 2K-1}
    std::vector<std::vector<std::vector<double>>> points;   // per group: point list, each point sized like the group

    std::size_t group_count() const { return groups.size(); }

    std::size_t codebook_size() const {
        std::size_t n = 1;
        for (const auto& p : points) n *= p.size();
        return n;
    }

    std::size_t bits_in_group(std::size_t g) const {
        std::size_t n = points[g].size(), b = 0;
        while ((std::size_t{1} << b) < n) ++b;
        return b;
    }

    std::size_t bits_per_codeword() const {
        std::size_t b = 0;
        for (std::size_t g = 0; g < groups.size(); ++g) b += bits_in_group(g);
        return b;
    }

    // Real coordinate vector for one point choice per group.
    std::vector<double> assemble_real(const std::vector<std::size_t>& choice) const {
        if (choice.size() != groups.size())
            throw std::invalid_argument("GroupedConstellation: one point choice per group required");
        std::vector<double> r(2 * complex_symbols, 0.0);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (choice[g] >= points[g].size())
                throw std::invalid_argument("GroupedConstellation: point index out of range in group " +
                                            std::to_string(g));
            const auto& pt = points[g][choice[g]];
            for (std::size_t c = 0; c < groups[g].size(); ++c) r[groups[g][c]] = pt[c];
        }
        return r;
    }

    cvec assemble(const std::vector<std::size_t>& choice) const {
        std::vector<double> r = assemble_real(choice);
        cvec s(complex_symbols);
        for (std::size_t j = 0; j < complex_symbols; ++j) s[j] = cx(r[2 * j], r[2 * j + 1]);
        return s;
    }

    // All codewords, group 0 most significant. Guarded by cap.
    std::vector<cvec> enumerate_codebook(std::size_t cap = (std::size_t{1} << 16)) const {
        const std::size_t n = codebook_size();
        if (n == 0) throw std::invalid_argument("GroupedConstellation: empty codebook");
        if (n > cap) throw std::invalid_argument("GroupedConstellation: codebook larger than cap");
        std::vector<cvec> book;
        book.reserve(n);
        std::vector<std::size_t> choice(groups.size(), 0);
        for (std::size_t idx = 0; idx < n; ++idx) {
            std::size_t rem = idx;
            for (std::size_t g = groups.size(); g-- > 0;) {
                choice[g] = rem % points[g].size();
                rem /= points[g].size();
            }
            book.push_back(assemble(choice));
        }
        return book;
    }
};

inline std::vector<std::string> validate_constellation(const GroupedConstellation& cons) {
    std::vector<std::string> bad;
    if (cons.complex_symbols == 0) bad.push_back("no complex symbols");
    if (cons.groups.size() != cons.points.size()) bad.push_back("group/point-set count mismatch");
    std::vector<int> seen(2 * cons.complex_symbols, 0);
    for (std::size_t g = 0; g < cons.groups.size(); ++g) {
        if (cons.groups[g].empty()) bad.push_back("group " + std::to_string(g) + " is empty");
        for (std::size_t c : cons.groups[g]) {
            if (c >= seen.size()) {
                bad.push_back("group " + std::to_string(g) + " references coordinate " + std::to_string(c) +
                              " outside 0.." + std::to_string(seen.size() - 1));
                continue;
            }
            if (seen[c]++) bad.push_back("coordinate " + std::to_string(c) + " appears in more than one group");
        }
        if (g < cons.points.size()) {
            if (cons.points[g].empty()) bad.push_back("group " + std::to_string(g) + " has no points");
            for (const auto& pt : cons.points[g])
                if (pt.size() != cons.groups[g].size())
                    bad.push_back("group " + std::to_string(g) + " has a point of wrong dimension");
        }
    }
    for (std::size_t c = 0; c < seen.size(); ++c)
        if (!seen[c]) bad.push_back("coordinate " + std::to_string(c) + " not covered by any group");
    return bad;
}

// Unit-energy QPSK point set in Gray order: consecutive (and wraparound)
// points are geometric neighbors.
inline std::vector<std::vector<double>> qpsk_points() {
    const double a = 1.0 / std::sqrt(2.0);
    return {{a, a}, {-a, a}, {-a, -a}, {a, -a}};
}

// One group per complex symbol, QPSK in each.
inline GroupedConstellation qpsk_per_symbol(std::size_t symbols) {
    GroupedConstellation cons;
    cons.complex_symbols = symbols;
    for (std::size_t j = 0; j < symbols; ++j) {
        cons.groups.push_back({2 * j, 2 * j + 1});
        cons.points.push_back(qpsk_points());
    }
    return cons;
}

// Minimum over distinct point pairs of |dx * dy| for a 2-D point set: the
// coordinate product distance that governs coding gain when the two
// coordinates of a point ride through independently faded symbols.
inline double min_coordinate_product_distance(const std::vector<std::vector<double>>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double dx = pts[i][0] - pts[j][0];
            const double dy = pts[i][1] - pts[j][1];
            best = std::min(best, std::abs(dx * dy));
        }
    return best;
}

inline std::vector<std::vector<double>> rotated_qpsk_points(double theta_deg) {
    const double th = theta_deg * std::numbers::pi / 180.0;
    const double c = std::cos(th), s = std::sin(th);
    std::vector<std::vector<double>> pts = qpsk_points();
    for (auto& p : pts) {
        const double x = p[0], y = p[1];
        p[0] = c * x - s * y;
        p[1] = s * x + c * y;
    }
    return pts;
}

// Grid search 0..45 degrees in 0.5-degree steps for the rotation maximizing
// the minimum coordinate product distance of QPSK. Unrotated QPSK has product
// distance zero (axis-aligned differences), so some rotation is necessary.
inline double optimal_rotation_deg() {
    double best_theta = 0.0, best = -1.0;
    for (int step = 0; step <= 90; ++step) {
        const double theta = 0.5 * step;
        const double d = min_coordinate_product_distance(rotated_qpsk_points(theta));
        if (d > best + 1e-15) {
            best = d;
            best_theta = theta;
        }
    }
    return best_theta;
}

// Coordinate-interleaved rotated QPSK for the four-relay, four-symbol code:
// groups pair the in-phase coordinates of (s1,s2), the quadrature coordinates
// of (s1,s2), and likewise for (s3,s4). Each group's two coordinates are one
// rotated QPSK point, so the two halves of a point fade independently.
inline GroupedConstellation rotated_coordinate_interleaved_r4(double theta_deg) {
    GroupedConstellation cons;
    cons.complex_symbols = 4;
    cons.groups = {{0, 2}, {1, 3}, {4, 6}, {5, 7}};
    const auto pts = rotated_qpsk_points(theta_deg);
    cons.points = {pts, pts, pts, pts};
    return cons;
}

}  // namespace dstbc
