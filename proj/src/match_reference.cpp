#include <algorithm>

#include "psim/engine.hpp"
#include "psim/match.hpp"

namespace psim {

std::vector<int> membrane_ranks(const PSystem& sys, const Configuration& cfg) {
    std::vector<int> order;
    for (size_t i = 0; i < cfg.mems.size(); ++i)
        order.push_back(static_cast<int>(i));
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return label_less(sys.labels().label(cfg.mems[a].label),
                          sys.labels().label(cfg.mems[b].label));
    });
    std::vector<int> rank(cfg.mems.size(), 0);
    for (size_t pos = 0; pos < order.size(); ++pos)
        rank[order[pos]] = static_cast<int>(pos);
    return rank;
}

void sort_match_table(MatchTable& table, const PSystem& sys,
                      const Configuration& cfg) {
    std::vector<int> rank = membrane_ranks(sys, cfg);
    std::sort(table.evo.begin(), table.evo.end(),
              [&](const EvoMatch& a, const EvoMatch& b) {
                  return std::tuple(rank[a.region], a.obj, a.rule) <
                         std::tuple(rank[b.region], b.obj, b.rule);
              });
    std::sort(table.blocks.begin(), table.blocks.end(),
              [&](const BlockMatch& a, const BlockMatch& b) {
                  return std::tuple(rank[a.slot], a.rule, rank[a.source],
                                    a.obj) <
                         std::tuple(rank[b.slot], b.rule, rank[b.source],
                                    b.obj);
              });
}

// Reference matcher: walk every rule, look for membranes it can fire on.
// Deliberately simple; the indexed matcher must agree with this one.
MatchTable reference_match(const PSystem& sys, const Configuration& cfg,
                           const EngineOptions& opt) {
    MatchTable table;
    for (RuleId rid = 0; rid < sys.rules().size(); ++rid) {
        const Rule& r = sys.rules()[rid];
        for (size_t mi = 0; mi < cfg.mems.size(); ++mi) {
            const Membrane& m = cfg.mems[mi];
            if (!m.alive || m.label != r.label) continue;
            int idx = static_cast<int>(mi);
            switch (r.kind) {
                case RuleKind::Evolution:
                    if (m.content.contains(r.lhs))
                        table.evo.push_back({idx, r.lhs, rid});
                    break;
                case RuleKind::SendOut:
                    if (m.content.contains(r.lhs))
                        table.blocks.push_back({idx, -1, idx, r.lhs, rid});
                    break;
                case RuleKind::Dissolution:
                    // The outermost membrane cannot dissolve.
                    if (idx != cfg.root && m.content.contains(r.lhs))
                        table.blocks.push_back({idx, -1, idx, r.lhs, rid});
                    break;
                case RuleKind::SendIn: {
                    // The labelled membrane is the target; the object comes
                    // from the region right outside it. Objects in the
                    // environment never come back, so the skin has no
                    // applicable send-in.
                    if (idx == cfg.root) break;
                    int src = m.parent;
                    if (cfg.mems[src].content.contains(r.lhs)) {
                        int slot2 = opt.send_in_blocks_source ? src : -1;
                        table.blocks.push_back({idx, slot2, src, r.lhs, rid});
                    }
                    break;
                }
            }
        }
    }
    sort_match_table(table, sys, cfg);
    return table;
}

// Reference apply: process the assignment item by item on a copy, then
// resolve dissolutions innermost-first. Item order does not matter for the
// multiset arithmetic because consumption never exceeds the snapshot counts.
Configuration apply_reference(const PSystem& sys, const Configuration& cfg,
                              const Assignment& a, Multiset* emitted) {
    Configuration next = cfg;
    std::vector<int> dissolved;
    for (const AppliedRule& item : a.items) {
        const Rule& r = sys.rules().at(item.rule);
        Membrane& m = next.mems.at(item.membrane);
        switch (r.kind) {
            case RuleKind::Evolution:
                m.content.remove(r.lhs, item.multiplicity);
                for (const auto& [id, n] : r.rhs)
                    m.content.add(id, n * item.multiplicity);
                break;
            case RuleKind::SendIn:
                next.mems.at(m.parent).content.remove(r.lhs, 1);
                m.content.add(r.rhs_obj, 1);
                break;
            case RuleKind::SendOut:
                m.content.remove(r.lhs, 1);
                if (item.membrane == next.root) {
                    next.environment.add(r.rhs_obj, 1);
                    if (emitted) emitted->add(r.rhs_obj, 1);
                } else {
                    next.mems.at(m.parent).content.add(r.rhs_obj, 1);
                }
                break;
            case RuleKind::Dissolution:
                m.content.remove(r.lhs, 1);
                next.mems.at(m.parent).content.add(r.rhs_obj, 1);
                dissolved.push_back(item.membrane);
                break;
        }
    }
    resolve_dissolutions(next, std::move(dissolved));
    return next;
}

}  // namespace psim
