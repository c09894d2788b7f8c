#include <algorithm>
#include <atomic>
#include <cstdint>

#include "psim/engine.hpp"
#include "psim/match.hpp"

namespace psim {

namespace {

uint64_t pack(LabelId label, ObjId obj) {
    return (static_cast<uint64_t>(label) << 32) | static_cast<uint64_t>(obj);
}

}  // namespace

IndexedMatcher::IndexedMatcher(const PSystem& sys) : sys_(sys) {
    for (RuleId rid = 0; rid < sys.rules().size(); ++rid) {
        const Rule& r = sys.rules()[rid];
        switch (r.kind) {
            case RuleKind::Evolution:
                evo_[pack(r.label, r.lhs)].push_back(rid);
                break;
            case RuleKind::SendOut:
            case RuleKind::Dissolution:
                out_[pack(r.label, r.lhs)].push_back(rid);
                break;
            case RuleKind::SendIn:
                in_[r.lhs].push_back({rid, r.label});
                break;
        }
    }
}

MatchTable IndexedMatcher::match(const Configuration& cfg,
                                 const EngineOptions& opt) const {
    const int count = static_cast<int>(cfg.mems.size());
    std::vector<MatchTable> parts(count);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
    for (int mi = 0; mi < count; ++mi) {
        const Membrane& m = cfg.mems[mi];
        if (!m.alive) continue;
        MatchTable& part = parts[mi];
        // Children grouped by label, built only if a send-in rule wants an
        // object sitting in this region.
        std::unordered_map<LabelId, std::vector<int>> kids;
        bool kids_built = false;
        for (const auto& [obj, n] : m.content) {
            (void)n;
            if (auto it = evo_.find(pack(m.label, obj)); it != evo_.end())
                for (RuleId rid : it->second)
                    part.evo.push_back({mi, obj, rid});
            if (auto it = out_.find(pack(m.label, obj)); it != out_.end())
                for (RuleId rid : it->second) {
                    if (mi == cfg.root &&
                        sys_.rules()[rid].kind == RuleKind::Dissolution)
                        continue;
                    part.blocks.push_back({mi, -1, mi, obj, rid});
                }
            if (auto it = in_.find(obj); it != in_.end()) {
                if (!kids_built) {
                    for (int c : m.children)
                        if (cfg.mems[c].alive)
                            kids[cfg.mems[c].label].push_back(c);
                    kids_built = true;
                }
                for (const auto& [rid, target] : it->second) {
                    auto kit = kids.find(target);
                    if (kit == kids.end()) continue;
                    int slot2 = opt.send_in_blocks_source ? mi : -1;
                    for (int child : kit->second)
                        part.blocks.push_back({child, slot2, mi, obj, rid});
                }
            }
        }
    }
    MatchTable table;
    for (const MatchTable& part : parts) {
        table.evo.insert(table.evo.end(), part.evo.begin(), part.evo.end());
        table.blocks.insert(table.blocks.end(), part.blocks.begin(),
                            part.blocks.end());
    }
    sort_match_table(table, sys_, cfg);
    return table;
}

MatchTable indexed_match(const PSystem& sys, const Configuration& cfg,
                         const EngineOptions& opt) {
    return IndexedMatcher(sys).match(cfg, opt);
}

void resolve_dissolutions(Configuration& cfg, std::vector<int> dissolved) {
    if (dissolved.empty()) return;
    auto depth_of = [&](int i) {
        int d = 0;
        for (int cur = i; cur != cfg.root; cur = cfg.mems[cur].parent) ++d;
        return d;
    };
    std::sort(dissolved.begin(), dissolved.end(), [&](int a, int b) {
        int da = depth_of(a), db = depth_of(b);
        if (da != db) return da > db;
        return a < b;
    });
    for (int mi : dissolved) {
        Membrane& m = cfg.mems[mi];
        Membrane& up = cfg.mems[m.parent];
        up.content += m.content;
        m.content.clear();
        auto& pc = up.children;
        pc.erase(std::remove(pc.begin(), pc.end(), mi), pc.end());
        for (int c : m.children) {
            cfg.mems[c].parent = m.parent;
            pc.push_back(c);
        }
        m.children.clear();
        m.alive = false;
    }
}

Configuration apply_indexed(const PSystem& sys, const Configuration& cfg,
                            const Assignment& a, Multiset* emitted) {
    struct Delta {
        Multiset sub;
        Multiset add;
    };
    Configuration next = cfg;
    std::vector<Delta> deltas(next.mems.size());
    Multiset env_add;
    std::vector<int> dissolved;
    for (const AppliedRule& item : a.items) {
        const Rule& r = sys.rules().at(item.rule);
        int mi = item.membrane;
        int parent = next.mems.at(mi).parent;
        switch (r.kind) {
            case RuleKind::Evolution:
                deltas[mi].sub.add(r.lhs, item.multiplicity);
                for (const auto& [id, n] : r.rhs)
                    deltas[mi].add.add(id, n * item.multiplicity);
                break;
            case RuleKind::SendIn:
                deltas[parent].sub.add(r.lhs, 1);
                deltas[mi].add.add(r.rhs_obj, 1);
                break;
            case RuleKind::SendOut:
                deltas[mi].sub.add(r.lhs, 1);
                if (mi == next.root)
                    env_add.add(r.rhs_obj, 1);
                else
                    deltas[parent].add.add(r.rhs_obj, 1);
                break;
            case RuleKind::Dissolution:
                deltas[mi].sub.add(r.lhs, 1);
                deltas[parent].add.add(r.rhs_obj, 1);
                dissolved.push_back(mi);
                break;
        }
    }
    std::atomic<bool> underflow{false};
    const int count = static_cast<int>(next.mems.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
    for (int mi = 0; mi < count; ++mi) {
        if (deltas[mi].sub.empty() && deltas[mi].add.empty()) continue;
        try {
            next.mems[mi].content -= deltas[mi].sub;
            next.mems[mi].content += deltas[mi].add;
        } catch (const MultisetUnderflow&) {
            underflow.store(true);
        }
    }
    if (underflow.load())
        throw EngineError("assignment not applicable to configuration");
    next.environment += env_add;
    if (emitted) *emitted += env_add;
    resolve_dissolutions(next, std::move(dissolved));
    return next;
}

}  // namespace psim
