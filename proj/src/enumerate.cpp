#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>

#include "psim/engine.hpp"
#include "psim/match.hpp"

namespace psim {

int64_t Assignment::total_applications() const {
    int64_t total = 0;
    for (const AppliedRule& it : items) total += it.multiplicity;
    return total;
}

namespace {

uint64_t pool_key(int region, ObjId obj) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(region)) << 32) |
           static_cast<uint64_t>(obj);
}

struct EvoGroup {
    int region = 0;
    ObjId obj = 0;
    std::vector<RuleId> rules;
};

// Backtracking enumeration anchored on membrane blocks. Every membrane that
// appears as the block of some candidate decides first (one candidate or
// none), then leftover objects feed the evolution rules, which by maximality
// must consume everything they can. A "none" decision survives only if the
// finished assignment is still maximal; when no candidate charges two blocks
// it can often be rejected immediately.
struct Enumerator {
    const PSystem& sys;
    const Configuration& cfg;
    const MatchTable& table;
    size_t bound;

    std::vector<std::vector<int>> slot_matches;  // candidate indices per slot
    std::vector<int> slot_of;                    // membrane index per slot
    std::unordered_map<uint64_t, int64_t> avail;
    std::unordered_map<uint64_t, int> later_slots;
    std::unordered_set<uint64_t> evo_keys;
    std::vector<EvoGroup> groups;
    std::vector<char> busy;
    std::vector<int> chosen;
    std::vector<AppliedRule> block_items;
    std::vector<AppliedRule> evo_items;
    std::vector<Assignment> out;
    bool truncated = false;
    bool dual_blocks = false;
    size_t nodes = 0;
    static constexpr size_t node_cap = size_t(1) << 22;

    Enumerator(const PSystem& s, const Configuration& c, const MatchTable& t,
               size_t b)
        : sys(s), cfg(c), table(t), bound(b) {
        busy.assign(cfg.mems.size(), 0);
        for (size_t bi = 0; bi < table.blocks.size(); ++bi) {
            const BlockMatch& bm = table.blocks[bi];
            if (bm.slot2 >= 0) dual_blocks = true;
            if (slot_of.empty() || slot_of.back() != bm.slot) {
                slot_of.push_back(bm.slot);
                slot_matches.emplace_back();
            }
            slot_matches.back().push_back(static_cast<int>(bi));
            avail.emplace(pool_key(bm.source, bm.obj),
                          cfg.mems[bm.source].content.count(bm.obj));
        }
        chosen.assign(slot_matches.size(), -1);
        for (const auto& sm : slot_matches) {
            std::vector<uint64_t> seen;
            for (int bi : sm) {
                const BlockMatch& bm = table.blocks[bi];
                uint64_t k = pool_key(bm.source, bm.obj);
                if (std::find(seen.begin(), seen.end(), k) == seen.end()) {
                    seen.push_back(k);
                    later_slots[k] += 1;
                }
            }
        }
        for (const EvoMatch& em : table.evo) {
            uint64_t k = pool_key(em.region, em.obj);
            evo_keys.insert(k);
            avail.emplace(k, cfg.mems[em.region].content.count(em.obj));
            if (groups.empty() || groups.back().region != em.region ||
                groups.back().obj != em.obj)
                groups.push_back({em.region, em.obj, {}});
            groups.back().rules.push_back(em.rule);
        }
    }

    bool over_cap() {
        if (++nodes > node_cap) truncated = true;
        return truncated;
    }

    void run() {
        if (table.evo.empty() && table.blocks.empty()) return;
        rec_slot(0);
    }

    void rec_slot(size_t gi) {
        if (truncated || over_cap()) return;
        if (gi == slot_matches.size()) {
            finish_blocks();
            return;
        }
        std::vector<uint64_t> keys_here;
        for (int bi : slot_matches[gi]) {
            const BlockMatch& bm = table.blocks[bi];
            uint64_t k = pool_key(bm.source, bm.obj);
            if (std::find(keys_here.begin(), keys_here.end(), k) ==
                keys_here.end())
                keys_here.push_back(k);
        }
        for (uint64_t k : keys_here) later_slots[k] -= 1;
        int slot = slot_of[gi];
        if (!busy[slot]) {
            for (int bi : slot_matches[gi]) {
                const BlockMatch& bm = table.blocks[bi];
                int64_t& pool = avail[pool_key(bm.source, bm.obj)];
                if (pool < 1) continue;
                if (bm.slot2 >= 0 && busy[bm.slot2]) continue;
                pool -= 1;
                busy[slot] = 1;
                if (bm.slot2 >= 0) busy[bm.slot2] = 1;
                chosen[gi] = bi;
                rec_slot(gi + 1);
                chosen[gi] = -1;
                busy[slot] = 0;
                if (bm.slot2 >= 0) busy[bm.slot2] = 0;
                pool += 1;
                if (truncated) break;
            }
        }
        bool skip_none = false;
        if (!truncated && !busy[slot] && !dual_blocks) {
            // Leaving the block idle cannot be maximal if some candidate's
            // object is sure to survive: nothing evolves it and the other
            // undecided blocks cannot absorb every copy.
            for (int bi : slot_matches[gi]) {
                const BlockMatch& bm = table.blocks[bi];
                uint64_t k = pool_key(bm.source, bm.obj);
                if (evo_keys.count(k)) continue;
                if (avail[k] > later_slots[k]) {
                    skip_none = true;
                    break;
                }
            }
        }
        if (!truncated && !skip_none) rec_slot(gi + 1);
        for (uint64_t k : keys_here) later_slots[k] += 1;
    }

    void finish_blocks() {
        for (const BlockMatch& bm : table.blocks) {
            if (busy[bm.slot]) continue;
            if (bm.slot2 >= 0 && busy[bm.slot2]) continue;
            uint64_t k = pool_key(bm.source, bm.obj);
            if (evo_keys.count(k)) continue;  // evolution will drain it
            if (avail[k] >= 1) return;        // not maximal
        }
        block_items.clear();
        for (size_t gi = 0; gi < slot_matches.size(); ++gi) {
            if (chosen[gi] < 0) continue;
            const BlockMatch& bm = table.blocks[chosen[gi]];
            block_items.push_back({bm.slot, bm.rule, 1});
        }
        rec_group(0);
    }

    void rec_group(size_t qi) {
        if (truncated) return;
        if (qi == groups.size()) {
            emit();
            return;
        }
        rec_comp(qi, 0, avail[pool_key(groups[qi].region, groups[qi].obj)]);
    }

    // All ways to split the group's remaining copies across its rules.
    void rec_comp(size_t qi, size_t ri, int64_t rem) {
        if (truncated || over_cap()) return;
        const EvoGroup& g = groups[qi];
        if (ri + 1 == g.rules.size()) {
            bool pushed = rem > 0;
            if (pushed) evo_items.push_back({g.region, g.rules[ri], rem});
            rec_group(qi + 1);
            if (pushed) evo_items.pop_back();
            return;
        }
        for (int64_t n = rem; n >= 0; --n) {
            bool pushed = n > 0;
            if (pushed) evo_items.push_back({g.region, g.rules[ri], n});
            rec_comp(qi, ri + 1, rem - n);
            if (pushed) evo_items.pop_back();
            if (truncated) return;
        }
    }

    void emit() {
        if (out.size() >= bound) {
            truncated = true;
            return;
        }
        Assignment a;
        a.items.reserve(block_items.size() + evo_items.size());
        a.items.insert(a.items.end(), block_items.begin(), block_items.end());
        a.items.insert(a.items.end(), evo_items.begin(), evo_items.end());
        out.push_back(std::move(a));
    }
};

}  // namespace

EnumerateResult enumerate_assignments(const PSystem& sys,
                                      const Configuration& cfg,
                                      const MatchTable& table, size_t bound) {
    Enumerator e(sys, cfg, table, bound);
    e.run();
    return {std::move(e.out), e.truncated};
}

}  // namespace psim
