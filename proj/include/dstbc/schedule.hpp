#pragma once

// Derivation of a full transmission plan from a conjugate-linear code: which
// source blocks are IDFT- vs DFT-modulated, which slots every relay
// time-reverses, and what each relay forwards in each slot.
//
// The destination applies a DFT to every slot. Chasing one received block
// through the four possible treatments gives the legality rule. Writing c for
// the relay's stored copy of source block p and s_p for the symbols:
//   plain relay, normal slot:    dft(body)          = s_p  iff block p was IDFT-modulated
//   plain relay, reversed slot:  dft(zeta(body))    = s_p  iff block p was DFT-modulated
//   conj  relay, normal slot:    dft(conj(body))    = s_p* iff block p was DFT-modulated
//   conj  relay, reversed slot:  dft(zeta(conj(b))) = s_p* iff block p was IDFT-modulated
// i.e. a forwarded block decodes correctly iff
//   modulation(p) == IDFT  <=>  (relay conjugates) == (slot reversed).
// Every nonzero code entry is therefore a parity constraint between block p
// and slot m, and a consistent plan is a 2-coloring of the constraint graph.

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "code.hpp"

namespace dstbc {

enum class BlockTransform { idft, dft };

struct RelayAction {
    bool silent = true;
    std::size_t block = 0;  // source block index forwarded in this slot
    int sign = 1;
};

struct RelaySchedule {
    ConjugateLinearCode code;
    std::vector<BlockTransform> source_modulation;   // per source block, size K
    std::vector<bool> reversed_slot;                 // size T
    std::vector<std::vector<RelayAction>> actions;   // [relay][slot]
    std::vector<std::size_t> relay_order;            // user relay indices, plain columns first
    std::size_t plain_relays = 0;                    // M

    bool relay_conjugates(std::size_t relay) const { return code.columns[relay].conjugated; }

    std::vector<std::size_t> reversed_slots() const {
        std::vector<std::size_t> out;
        for (std::size_t m = 0; m < reversed_slot.size(); ++m)
            if (reversed_slot[m]) out.push_back(m);
        return out;
    }
};

// A relay's forwarding choice is legal exactly when the parity rule above
// holds. Throws on the first violation.
inline void check_schedule_legality(const RelaySchedule& sched) {
    const auto& code = sched.code;
    for (std::size_t j = 0; j < code.relays; ++j)
        for (std::size_t m = 0; m < code.slots; ++m) {
            const RelayAction& act = sched.actions[j][m];
            if (act.silent) continue;
            const bool want_idft = code.columns[j].conjugated == sched.reversed_slot[m];
            const BlockTransform need = want_idft ? BlockTransform::idft : BlockTransform::dft;
            if (sched.source_modulation[act.block] != need)
                throw std::runtime_error("schedule violates the relay constraint set: relay " + std::to_string(j + 1) +
                                         ", slot " + std::to_string(m + 1) + " forwards block " +
                                         std::to_string(act.block + 1) + " with the wrong modulation/reversal pairing");
        }
}

// Build the plan by 2-coloring. Nodes are the K source blocks and T slots;
// every nonzero code entry (relay j, slot m, block p) links block p and slot
// m: equal colors for a plain relay, opposite for a conjugating one (color =
// "IDFT" on blocks, "not reversed" on slots). Free components are fixed by a
// deterministic tie-break: the lowest-indexed slot in the component (lowest
// block if it has no slot) gets "not reversed"/"IDFT" when its 1-based index
// is odd, the opposite when even.
inline RelaySchedule derive_relay_schedule(const ConjugateLinearCode& code) {
    require_valid(code);
    {
        const RowConditionReport rep = check_row_conditions(row_partitions(code));
        if (!rep.schedule_gates_pass()) {
            std::string msg = "code rows do not admit a schedule:";
            for (const auto& n : rep.notes) msg += " " + n + ";";
            throw std::invalid_argument(msg);
        }
    }

    const std::size_t k = code.symbols, t = code.slots;
    const std::size_t nodes = k + t;  // blocks 0..K-1, then slots K..K+T-1

    struct Edge {
        std::size_t other;
        bool equal;  // colors must match (plain relay) or differ (conjugating relay)
    };
    std::vector<std::vector<Edge>> adj(nodes);
    for (std::size_t j = 0; j < code.relays; ++j) {
        const bool conj = code.columns[j].conjugated;
        for (std::size_t m = 0; m < t; ++m)
            for (std::size_t p = 0; p < k; ++p)
                if (code.a(j, m, p) != 0.0) {
                    adj[p].push_back({k + m, !conj});
                    adj[k + m].push_back({p, !conj});
                }
    }

    std::vector<int> color(nodes, -1);
    std::vector<std::size_t> stack, component;
    for (std::size_t start = 0; start < nodes; ++start) {
        if (color[start] != -1) continue;
        // Collect the component with a provisional coloring rooted at start.
        component.clear();
        stack.assign(1, start);
        color[start] = 1;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            component.push_back(u);
            for (const Edge& e : adj[u]) {
                const int want = e.equal ? color[u] : 1 - color[u];
                if (color[e.other] == -1) {
                    color[e.other] = want;
                    stack.push_back(e.other);
                } else if (color[e.other] != want) {
                    throw std::runtime_error("code admits no zeta-slot assignment: conflicting constraints between "
                                             "source modulation and slot reversal");
                }
            }
        }
        // Tie-break: pick the component's root and flip everything if needed.
        std::size_t root = component.front();
        for (std::size_t u : component)
            if ((u >= k && (root < k || u < root)) || (root < k && u < k && u < root)) root = u;
        const std::size_t one_based = root >= k ? root - k + 1 : root + 1;
        const int root_color = one_based % 2 == 1 ? 1 : 0;
        if (color[root] != root_color)
            for (std::size_t u : component) color[u] = 1 - color[u];
    }

    RelaySchedule sched;
    sched.code = code;
    sched.source_modulation.resize(k);
    for (std::size_t p = 0; p < k; ++p)
        sched.source_modulation[p] = color[p] == 1 ? BlockTransform::idft : BlockTransform::dft;
    sched.reversed_slot.resize(t);
    for (std::size_t m = 0; m < t; ++m) sched.reversed_slot[m] = color[k + m] == 0;

    sched.actions.assign(code.relays, std::vector<RelayAction>(t));
    for (std::size_t j = 0; j < code.relays; ++j)
        for (std::size_t m = 0; m < t; ++m)
            for (std::size_t p = 0; p < k; ++p) {
                const double v = code.a(j, m, p);
                if (v != 0.0) sched.actions[j][m] = RelayAction{false, p, v > 0.0 ? 1 : -1};
            }

    for (std::size_t j = 0; j < code.relays; ++j)
        if (!code.columns[j].conjugated) sched.relay_order.push_back(j);
    sched.plain_relays = sched.relay_order.size();
    for (std::size_t j = 0; j < code.relays; ++j)
        if (code.columns[j].conjugated) sched.relay_order.push_back(j);

    check_schedule_legality(sched);
    return sched;
}

// Human-readable plan: modulation line, reversed slots, and the slot-by-relay
// forwarding table in r_{i,p} notation (z(...) marks time reversal, * marks
// conjugation).
inline std::string format_schedule(const RelaySchedule& sched) {
    std::ostringstream os;
    os << "blocks:";
    for (std::size_t p = 0; p < sched.source_modulation.size(); ++p)
        os << " " << (p + 1) << ":" << (sched.source_modulation[p] == BlockTransform::idft ? "IDFT" : "DFT");
    os << "\nreversed slots: {";
    bool first = true;
    for (std::size_t m : sched.reversed_slots()) {
        os << (first ? "" : ", ") << (m + 1);
        first = false;
    }
    os << "}\nplain relays: " << sched.plain_relays << " of " << sched.code.relays << "\n";
    os << "slot";
    for (std::size_t j = 0; j < sched.code.relays; ++j) os << "\tU" << (j + 1);
    os << "\n";
    for (std::size_t m = 0; m < sched.code.slots; ++m) {
        os << (m + 1);
        for (std::size_t j = 0; j < sched.code.relays; ++j) {
            const RelayAction& act = sched.actions[j][m];
            os << "\t";
            if (act.silent) {
                os << "0";
                continue;
            }
            std::string body = "r";
            if (sched.code.columns[j].conjugated) body += "*";
            body += "_{" + std::to_string(j + 1) + "," + std::to_string(act.block + 1) + "}";
            if (sched.reversed_slot[m]) body = "z(" + body + ")";
            os << (act.sign < 0 ? "-" : "") << body;
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace dstbc
