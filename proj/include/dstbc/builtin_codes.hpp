#pragma once

// The four built-in code instances, each with its decoding group partition
// and default signal set where one is defined.

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "code.hpp"
#include "constellation.hpp"

namespace dstbc {

namespace detail {

struct Entry {
    std::size_t row, col;
    double val;
};

inline CodeColumn make_column(std::size_t slots, std::size_t symbols, bool conj, std::initializer_list<Entry> entries) {
    CodeColumn c;
    c.conjugated = conj;
    c.a.assign(slots * symbols, 0.0);
    for (const Entry& e : entries) c.a[e.row * symbols + e.col] = e.val;
    return c;
}

}  // namespace detail

// X(s) = [[s1, -s2*], [s2, s1*]]: one plain and one conjugating relay.
inline ConjugateLinearCode builtin_alamouti() {
    ConjugateLinearCode code;
    code.name = "alamouti";
    code.relays = 2;
    code.slots = 2;
    code.symbols = 2;
    code.columns = {
        detail::make_column(2, 2, false, {{0, 0, 1.0}, {1, 1, 1.0}}),
        detail::make_column(2, 2, true, {{0, 1, -1.0}, {1, 0, 1.0}}),
    };
    code.groups = {{0, 1}, {2, 3}};
    code.signal_sets = {qpsk_points(), qpsk_points()};
    return code;
}

// Five relays, six slots, six symbols: two Alamouti-style pairs stacked over
// slots 1-4 plus a single uncoded column over slots 5-6. Rows 5 and 6 have
// empty conjugate sets, so this code shows why the balanced row condition is
// informational rather than a gate.
inline ConjugateLinearCode builtin_example1_r5() {
    ConjugateLinearCode code;
    code.name = "example1_r5";
    code.relays = 5;
    code.slots = 6;
    code.symbols = 6;
    code.columns = {
        detail::make_column(6, 6, false, {{0, 0, 1.0}, {1, 1, 1.0}}),
        detail::make_column(6, 6, true, {{0, 1, -1.0}, {1, 0, 1.0}}),
        detail::make_column(6, 6, false, {{2, 2, 1.0}, {3, 3, 1.0}}),
        detail::make_column(6, 6, true, {{2, 3, -1.0}, {3, 2, 1.0}}),
        detail::make_column(6, 6, false, {{4, 4, 1.0}, {5, 5, 1.0}}),
    };
    return code;
}

// Four relays, rate one, four-group decodable. Columns 1-2 forward plain
// blocks, columns 3-4 conjugated ones.
inline ConjugateLinearCode builtin_fourgroup_r4() {
    ConjugateLinearCode code;
    code.name = "fourgroup_r4";
    code.relays = 4;
    code.slots = 4;
    code.symbols = 4;
    code.columns = {
        detail::make_column(4, 4, false, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}, {3, 3, 1.0}}),
        detail::make_column(4, 4, false, {{0, 1, 1.0}, {1, 0, 1.0}, {2, 3, 1.0}, {3, 2, 1.0}}),
        detail::make_column(4, 4, true, {{0, 2, -1.0}, {1, 3, -1.0}, {2, 0, 1.0}, {3, 1, 1.0}}),
        detail::make_column(4, 4, true, {{0, 3, -1.0}, {1, 2, -1.0}, {2, 1, 1.0}, {3, 0, 1.0}}),
    };
    // In-phase coordinates of (s1,s2), quadratures of (s1,s2), then the same
    // for (s3,s4): each group is one coordinate-interleaved rotated QPSK point.
    code.groups = {{0, 2}, {1, 3}, {4, 6}, {5, 7}};
    const auto pts = rotated_qpsk_points(optimal_rotation_deg());
    code.signal_sets = {pts, pts, pts, pts};
    return code;
}

// R/2 independent Alamouti clusters on disjoint slot pairs: simple to build
// for any even R but its codeword differences can confine to one cluster, so
// diversity saturates at 2.
inline ConjugateLinearCode builtin_clustered_alamouti(std::size_t relays) {
    if (relays < 2 || relays % 2 != 0)
        throw std::invalid_argument("builtin_clustered_alamouti: relay count must be even and >= 2");
    ConjugateLinearCode code;
    code.name = "clustered_alamouti_r" + std::to_string(relays);
    code.relays = relays;
    code.slots = relays;
    code.symbols = relays;
    for (std::size_t c = 0; c < relays / 2; ++c) {
        const std::size_t r0 = 2 * c, r1 = 2 * c + 1;
        code.columns.push_back(detail::make_column(relays, relays, false, {{r0, r0, 1.0}, {r1, r1, 1.0}}));
        code.columns.push_back(detail::make_column(relays, relays, true, {{r0, r1, -1.0}, {r1, r0, 1.0}}));
    }
    for (std::size_t j = 0; j < relays; ++j) {
        code.groups.push_back({2 * j, 2 * j + 1});
        code.signal_sets.push_back(qpsk_points());
    }
    return code;
}

// The code's own group partition and signal sets as a constellation.
inline GroupedConstellation constellation_for(const ConjugateLinearCode& code) {
    if (code.groups.empty() || code.signal_sets.empty())
        throw std::invalid_argument("constellation_for: code '" + code.name +
                                    "' carries no group partition or signal sets");
    GroupedConstellation cons;
    cons.complex_symbols = code.symbols;
    cons.groups = code.groups;
    cons.points = code.signal_sets;
    const auto bad = validate_constellation(cons);
    if (!bad.empty()) {
        std::string msg = "constellation_for: invalid signal configuration";
        for (const auto& b : bad) msg += "; " + b;
        throw std::invalid_argument(msg);
    }
    return cons;
}

// Builtin lookup by name; returns false when the name is not a builtin.
inline bool find_builtin_code(const std::string& name, ConjugateLinearCode& out, std::size_t relays_hint = 0) {
    if (name == "alamouti") {
        out = builtin_alamouti();
    } else if (name == "example1_r5") {
        out = builtin_example1_r5();
    } else if (name == "fourgroup_r4") {
        out = builtin_fourgroup_r4();
    } else if (name == "clustered_alamouti") {
        out = builtin_clustered_alamouti(relays_hint == 0 ? 4 : relays_hint);
    } else if (name.rfind("clustered_alamouti_r", 0) == 0) {
        const std::string tail = name.substr(std::string("clustered_alamouti_r").size());
        std::size_t r = 0;
        try {
            r = static_cast<std::size_t>(std::stoul(tail));
        } catch (...) {
            return false;
        }
        out = builtin_clustered_alamouti(r);
    } else {
        return false;
    }
    return true;
}

}  // namespace dstbc
