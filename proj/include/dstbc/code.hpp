#pragma once

// Conjugate-linear space-time block codes: codeword column j is A_j s for a
// plain column or A_j s* for a conjugated one, with A_j a real T x K matrix
// holding at most one entry from {+1, -1} per row. Each column is produced by
// one relay, each row is one transmission slot. The restriction to 0/±1
// entries reflects what a relay can do to a received block: forward it,
// negate it, or stay silent; never rescale per symbol.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "constellation.hpp"
#include "linalg.hpp"
#include "ofdm.hpp"
#include "rng.hpp"

namespace dstbc {

struct CodeColumn {
    bool conjugated = false;
    std::vector<double> a;  // T x K, row-major

    double entry(std::size_t row, std::size_t col, std::size_t symbols) const { return a[row * symbols + col]; }
};

struct ConjugateLinearCode {
    std::string name;
    std::size_t relays = 0;   // R: columns of the codeword
    std::size_t slots = 0;    // T: rows of the codeword
    std::size_t symbols = 0;  // K: complex symbols per codeword
    std::vector<CodeColumn> columns;
    std::vector<std::vector<std::size_t>> groups;          // optional partition of the 2K real coordinates
    std::vector<std::vector<std::vector<double>>> signal_sets;  // optional, aligned with groups

    double a(std::size_t relay, std::size_t row, std::size_t col) const {
        return columns[relay].entry(row, col, symbols);
    }

    std::size_t plain_count() const {
        std::size_t m = 0;
        for (const auto& c : columns)
            if (!c.conjugated) ++m;
        return m;
    }
};

// Structural checks; returns human-readable violations, empty when valid.
inline std::vector<std::string> validate_code(const ConjugateLinearCode& code) {
    std::vector<std::string> bad;
    if (code.relays == 0 || code.slots == 0 || code.symbols == 0)
        bad.push_back("dimensions must all be positive");
    if (code.columns.size() != code.relays)
        bad.push_back("expected " + std::to_string(code.relays) + " columns, found " +
                      std::to_string(code.columns.size()));
    for (std::size_t j = 0; j < code.columns.size(); ++j) {
        const auto& col = code.columns[j];
        if (col.a.size() != code.slots * code.symbols) {
            bad.push_back("relay " + std::to_string(j + 1) + ": matrix is not " + std::to_string(code.slots) + "x" +
                          std::to_string(code.symbols));
            continue;
        }
        for (std::size_t m = 0; m < code.slots; ++m) {
            std::size_t nonzeros = 0;
            for (std::size_t p = 0; p < code.symbols; ++p) {
                const double v = col.entry(m, p, code.symbols);
                if (v == 0.0) continue;
                ++nonzeros;
                if (v != 1.0 && v != -1.0)
                    bad.push_back("relay " + std::to_string(j + 1) + ", row " + std::to_string(m + 1) +
                                  ": entry not in {0, +1, -1}");
            }
            if (nonzeros > 1)
                bad.push_back("relay " + std::to_string(j + 1) + ", row " + std::to_string(m + 1) +
                              ": more than one nonzero entry");
        }
    }
    if (!code.groups.empty()) {
        std::vector<int> seen(2 * code.symbols, 0);
        for (std::size_t g = 0; g < code.groups.size(); ++g) {
            if (code.groups[g].empty()) bad.push_back("group " + std::to_string(g + 1) + " is empty");
            for (std::size_t cidx : code.groups[g]) {
                if (cidx >= seen.size()) {
                    bad.push_back("group " + std::to_string(g + 1) + " references coordinate beyond 2K");
                    continue;
                }
                if (seen[cidx]++) bad.push_back("coordinate " + std::to_string(cidx) + " in more than one group");
            }
        }
        for (std::size_t cidx = 0; cidx < seen.size(); ++cidx)
            if (!seen[cidx]) bad.push_back("coordinate " + std::to_string(cidx) + " not covered by the group partition");
        if (!code.signal_sets.empty() && code.signal_sets.size() != code.groups.size())
            bad.push_back("signal sets not aligned with groups");
    }
    return bad;
}

inline void require_valid(const ConjugateLinearCode& code) {
    auto bad = validate_code(code);
    if (bad.empty()) return;
    std::string msg = "invalid code";
    if (!code.name.empty()) msg += " '" + code.name + "'";
    for (const auto& b : bad) msg += "; " + b;
    throw std::invalid_argument(msg);
}

// Codeword matrix X(s): T x R, column j = A_j s or A_j s*.
inline CMat codeword(const ConjugateLinearCode& code, const cvec& s) {
    if (s.size() != code.symbols) throw std::invalid_argument("codeword: symbol vector has wrong length");
    CMat x(code.slots, code.relays);
    for (std::size_t j = 0; j < code.relays; ++j) {
        const bool conj = code.columns[j].conjugated;
        for (std::size_t m = 0; m < code.slots; ++m)
            for (std::size_t p = 0; p < code.symbols; ++p) {
                const double v = code.a(j, m, p);
                if (v != 0.0) x(m, j) += v * (conj ? std::conj(s[p]) : s[p]);
            }
    }
    return x;
}

// Per row: which symbols appear unconjugated and which conjugated.
struct RowPartition {
    std::vector<std::vector<std::size_t>> plain;       // per row, sorted unique 0-based symbol indices
    std::vector<std::vector<std::size_t>> conjugated;
};

inline RowPartition row_partitions(const ConjugateLinearCode& code) {
    require_valid(code);
    RowPartition part;
    part.plain.assign(code.slots, {});
    part.conjugated.assign(code.slots, {});
    for (std::size_t m = 0; m < code.slots; ++m) {
        std::set<std::size_t> pl, cj;
        for (std::size_t j = 0; j < code.relays; ++j)
            for (std::size_t p = 0; p < code.symbols; ++p)
                if (code.a(j, m, p) != 0.0) (code.columns[j].conjugated ? cj : pl).insert(p);
        part.plain[m].assign(pl.begin(), pl.end());
        part.conjugated[m].assign(cj.begin(), cj.end());
    }
    return part;
}

// The three row-structure conditions. The first and third gate schedule
// derivation; the second (equal set sizes) is informational only: valid
// schedulable codes with empty conjugate sets exist, so it is reported but
// never enforced.
struct RowConditionReport {
    bool disjoint = true;   // plain and conjugated sets never share a symbol in a row
    bool balanced = true;   // |plain| == |conjugated| per row (informational)
    bool laminar = true;    // plain sets of two rows are nested or disjoint
    std::vector<std::string> notes;

    bool schedule_gates_pass() const { return disjoint && laminar; }
};

inline RowConditionReport check_row_conditions(const RowPartition& part) {
    RowConditionReport rep;
    const std::size_t t = part.plain.size();
    for (std::size_t m = 0; m < t; ++m) {
        std::vector<std::size_t> inter;
        std::set_intersection(part.plain[m].begin(), part.plain[m].end(), part.conjugated[m].begin(),
                              part.conjugated[m].end(), std::back_inserter(inter));
        if (!inter.empty()) {
            rep.disjoint = false;
            rep.notes.push_back("row " + std::to_string(m + 1) + ": a symbol appears both plain and conjugated");
        }
        if (part.plain[m].size() != part.conjugated[m].size()) {
            rep.balanced = false;
            rep.notes.push_back("row " + std::to_string(m + 1) + ": plain and conjugated sets differ in size (" +
                                std::to_string(part.plain[m].size()) + " vs " +
                                std::to_string(part.conjugated[m].size()) + ")");
        }
    }
    for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = i + 1; j < t; ++j) {
            std::vector<std::size_t> inter;
            std::set_intersection(part.plain[i].begin(), part.plain[i].end(), part.plain[j].begin(),
                                  part.plain[j].end(), std::back_inserter(inter));
            if (!inter.empty() && inter != part.plain[i] && inter != part.plain[j]) {
                rep.laminar = false;
                rep.notes.push_back("rows " + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                    ": plain sets overlap without nesting");
            }
        }
    return rep;
}

// JSON form: {"R":…, "T":…, "K":…, "columns":[{"conj":…, "A":[row-major ±1/0]}…], "groups":[[…]…]}
inline nlohmann::json code_to_json(const ConjugateLinearCode& code) {
    nlohmann::json j;
    j["R"] = code.relays;
    j["T"] = code.slots;
    j["K"] = code.symbols;
    j["columns"] = nlohmann::json::array();
    for (const auto& col : code.columns) {
        nlohmann::json c;
        c["conj"] = col.conjugated;
        nlohmann::json a = nlohmann::json::array();
        for (double v : col.a) a.push_back(static_cast<int>(v));
        c["A"] = a;
        j["columns"].push_back(c);
    }
    if (!code.groups.empty()) j["groups"] = code.groups;
    if (!code.name.empty()) j["name"] = code.name;
    return j;
}

inline ConjugateLinearCode code_from_json(const nlohmann::json& j) {
    ConjugateLinearCode code;
    try {
        code.relays = j.at("R").get<std::size_t>();
        code.slots = j.at("T").get<std::size_t>();
        code.symbols = j.at("K").get<std::size_t>();
        for (const auto& c : j.at("columns")) {
            CodeColumn col;
            col.conjugated = c.at("conj").get<bool>();
            for (const auto& v : c.at("A")) col.a.push_back(v.get<double>());
            code.columns.push_back(std::move(col));
        }
        if (j.contains("groups")) code.groups = j.at("groups").get<std::vector<std::vector<std::size_t>>>();
        if (j.contains("name")) code.name = j.at("name").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("code JSON malformed: ") + e.what());
    }
    require_valid(code);
    return code;
}

// FNV-1a over the canonical JSON text; identifies the exact code in metadata.
inline std::string code_hash(const ConjugateLinearCode& code) {
    const std::string text = code_to_json(code).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

struct RankReport {
    bool full = false;
    std::size_t min_rank = 0;
    std::size_t pair_a = 0, pair_b = 0;  // witness codeword indices for min_rank
    std::size_t pairs_checked = 0;
};

// Minimum rank of X(s) - X(s') over codeword pairs. Exhaustive when the
// codebook has at most 2^12 entries, otherwise randomized pairs.
inline RankReport check_full_rank(const ConjugateLinearCode& code, const GroupedConstellation& cons,
                                  std::size_t max_random_pairs = 4096, std::uint64_t seed = 7) {
    require_valid(code);
    if (cons.complex_symbols != code.symbols)
        throw std::invalid_argument("check_full_rank: constellation symbol count differs from code");
    const std::vector<cvec> book = cons.enumerate_codebook();
    RankReport rep;
    rep.min_rank = std::min(code.slots, code.relays);

    auto consider = [&](std::size_t i, std::size_t j) {
        cvec diff(code.symbols);
        for (std::size_t p = 0; p < code.symbols; ++p) diff[p] = book[i][p] - book[j][p];
        bool zero = true;
        for (const auto& v : diff)
            if (std::abs(v) > 0.0) zero = false;
        if (zero) return;
        const std::size_t r = matrix_rank(codeword(code, book[i]) - codeword(code, book[j]));
        ++rep.pairs_checked;
        if (r < rep.min_rank) {
            rep.min_rank = r;
            rep.pair_a = i;
            rep.pair_b = j;
        }
    };

    if (book.size() <= (std::size_t{1} << 12)) {
        for (std::size_t i = 0; i < book.size(); ++i)
            for (std::size_t j = i + 1; j < book.size(); ++j) consider(i, j);
    } else {
        std::uint64_t state = seed;
        for (std::size_t n = 0; n < max_random_pairs; ++n) {
            const std::size_t i = static_cast<std::size_t>(splitmix64(state) % book.size());
            const std::size_t j = static_cast<std::size_t>(splitmix64(state) % book.size());
            if (i != j) consider(i, j);
        }
    }
    rep.full = rep.min_rank == code.relays;
    return rep;
}

}  // namespace dstbc
