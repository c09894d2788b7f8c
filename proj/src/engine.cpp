#include <algorithm>
#include <functional>
#include <random>
#include <unordered_map>

#include "psim/engine.hpp"

namespace psim {

Engine::Engine(const PSystem& sys, EngineOptions opt)
    : sys_(sys), opt_(opt), matcher_(sys) {}

Configuration Engine::initial_configuration(const Multiset& input) const {
    return Configuration::from_system(sys_, input);
}

MatchTable Engine::matches(const Configuration& cfg) const {
    if (opt_.mode == StepMode::Reference) return reference_match(sys_, cfg, opt_);
    return matcher_.match(cfg, opt_);
}

EnumerateResult Engine::assignments(const Configuration& cfg,
                                    size_t bound) const {
    return enumerate_assignments(sys_, cfg, matches(cfg), bound);
}

Configuration Engine::step(const Configuration& cfg, const Assignment& a,
                           Multiset* emitted) const {
    if (opt_.mode == StepMode::Reference)
        return apply_reference(sys_, cfg, a, emitted);
    return apply_indexed(sys_, cfg, a, emitted);
}

RunResult Engine::run(const Multiset& input, uint64_t limit, RunPolicy policy,
                      uint64_t seed,
                      const std::function<void(const TraceRow&)>& trace) const {
    RunResult res;
    Configuration cur = initial_configuration(input);
    std::mt19937_64 rng(seed);
    res.max_depth = cur.depth();
    res.max_membranes = cur.alive_count();
    if (trace) trace({0, cur.alive_count(), cur.object_count(), 0, 0});
    uint64_t step_no = 0;
    for (;;) {
        if (step_no >= limit) break;
        EnumerateResult en = assignments(cur, opt_.assignment_bound);
        if (en.assignments.empty()) {
            res.halted = true;
            break;
        }
        if (en.assignments.size() > 1 || en.truncated)
            res.confluence_violations += 1;
        size_t pick = 0;
        if (policy == RunPolicy::SeededRandom && en.assignments.size() > 1)
            pick = static_cast<size_t>(rng() % en.assignments.size());
        const Assignment& a = en.assignments[pick];
        Multiset emitted;
        cur = step(cur, a, &emitted);
        ++step_no;
        if (opt_.log_rules) res.rule_log.push_back(a);
        if (!emitted.empty()) res.emissions.push_back({step_no, emitted});
        res.max_depth = std::max(res.max_depth, cur.depth());
        res.max_membranes = std::max(res.max_membranes, cur.alive_count());
        if (trace)
            trace({step_no, cur.alive_count(), cur.object_count(),
                   a.total_applications(),
                   static_cast<int64_t>(emitted.size())});
    }
    res.final_config = std::move(cur);
    res.steps = step_no;
    return res;
}

RecognizeResult Engine::recognize(const Multiset& input,
                                  uint64_t limit) const {
    RecognizeResult r;
    r.run = run(input, limit, RunPolicy::Deterministic);
    if (!r.run.halted)
        r.violations.push_back("run did not halt within the step budget");
    if (r.run.confluence_violations > 0)
        r.violations.push_back(
            "maximal assignment not unique at " +
            std::to_string(r.run.confluence_violations) + " step(s)");
    int64_t verdicts = 0;
    uint64_t verdict_step = 0;
    std::optional<bool> value;
    for (const auto& [at, ms] : r.run.emissions) {
        for (const auto& [id, n] : ms) {
            std::optional<bool> v = verdict_of(sys_, id);
            if (!v) continue;
            verdicts += n;
            verdict_step = at;
            value = *v;
        }
    }
    if (verdicts == 0) {
        r.violations.push_back("no verdict object was sent out");
    } else if (verdicts > 1) {
        r.violations.push_back("more than one verdict object was sent out");
    } else {
        r.accept = value;
        if (r.run.halted && verdict_step != r.run.steps)
            r.violations.push_back("verdict was sent out at step " +
                                   std::to_string(verdict_step) +
                                   " but the run halted at step " +
                                   std::to_string(r.run.steps));
    }
    return r;
}

namespace {

struct SubtreeStats {
    uint64_t branches = 0;
    uint64_t accepting = 0;
    uint64_t forks = 0;
    bool all_halted = true;
    size_t max_fanout = 0;
    uint64_t depth_used = 0;
};

}  // namespace

ExploreResult Engine::explore_hooked(const Multiset& input, uint64_t limit,
                                     uint64_t branch_bound,
                                     const ExploreHooks& hooks) const {
    ExploreResult res;
    const bool use_memo = !hooks.on_node && !hooks.on_leaf;
    std::unordered_map<std::string, SubtreeStats> memo;
    std::vector<Multiset> path_emissions;
    uint64_t completed = 0;
    bool partial = false;

    std::function<SubtreeStats(const Configuration&, uint64_t)> dfs =
        [&](const Configuration& cfg, uint64_t remaining) -> SubtreeStats {
        SubtreeStats v;
        if (partial) return v;
        std::string key;
        if (use_memo) {
            key = cfg.canonical_key();
            auto it = memo.find(key);
            if (it != memo.end() && remaining >= it->second.depth_used) {
                completed += it->second.branches;
                if (branch_bound && completed > branch_bound) partial = true;
                return it->second;
            }
        }
        EnumerateResult en = assignments(cfg, opt_.assignment_bound);
        if (en.truncated) {
            partial = true;
            return v;
        }
        size_t fanout = en.assignments.size();
        if (hooks.on_node) hooks.on_node(cfg, fanout);
        if (fanout == 0) {
            v.branches = 1;
            completed += 1;
            if (branch_bound && completed > branch_bound) {
                partial = true;
                return v;
            }
            if (hooks.on_leaf) hooks.on_leaf(cfg, path_emissions);
            if (use_memo) memo.emplace(std::move(key), v);
            return v;
        }
        if (remaining == 0) {
            v.all_halted = false;
            v.max_fanout = fanout;
            return v;
        }
        v.max_fanout = fanout;
        v.forks = fanout > 1 ? 1 : 0;
        for (const Assignment& a : en.assignments) {
            Multiset emitted;
            Configuration child = step(cfg, a, &emitted);
            bool edge_yes = false;
            for (const auto& [id, n] : emitted) {
                (void)n;
                std::optional<bool> vd = verdict_of(sys_, id);
                if (vd && *vd) edge_yes = true;
            }
            path_emissions.push_back(emitted);
            SubtreeStats cv = dfs(child, remaining - 1);
            path_emissions.pop_back();
            if (partial) return v;
            v.branches += cv.branches;
            v.accepting += edge_yes ? cv.branches : cv.accepting;
            v.forks += cv.forks;
            v.all_halted = v.all_halted && cv.all_halted;
            v.max_fanout = std::max(v.max_fanout, cv.max_fanout);
            v.depth_used = std::max(v.depth_used, cv.depth_used + 1);
        }
        if (use_memo && v.all_halted) memo.emplace(std::move(key), v);
        return v;
    };

    Configuration start = initial_configuration(input);
    SubtreeStats top = dfs(start, limit);
    res.branches = top.branches;
    res.accepting_branches = top.accepting;
    res.accepting_branch_exists = top.accepting > 0;
    res.all_halted = top.all_halted && !partial;
    res.partial = partial;
    res.forks = top.forks;
    res.max_fanout = std::max<size_t>(1, top.max_fanout);
    return res;
}

ExploreResult Engine::explore(const Multiset& input, uint64_t limit,
                              uint64_t branch_bound) const {
    return explore_hooked(input, limit, branch_bound, {});
}

std::optional<bool> verdict_of(const PSystem& sys, ObjId id) {
    const PObject& p = sys.objects().payload(id);
    if (const auto* v = std::get_if<VerdictObj>(&p)) return v->accept;
    if (const auto* o = std::get_if<OpaqueObj>(&p)) {
        if (o->name == "yes") return true;
        if (o->name == "no") return false;
    }
    return std::nullopt;
}

}  // namespace psim
