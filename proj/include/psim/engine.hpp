#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "psim/configuration.hpp"
#include "psim/match.hpp"

namespace psim {

struct ConfluenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class StepMode {
    Reference,  // naive serial matcher + serial apply; kept for testing
    Indexed,    // hash-indexed matcher + OpenMP kernels
};

struct EngineOptions {
    StepMode mode = StepMode::Indexed;
    // Off by default: a send-in charges only the target membrane's block.
    // When set, the source membrane's block is charged as well.
    bool send_in_blocks_source = false;
    bool log_rules = false;          // record applied rules per step
    size_t assignment_bound = 4096;  // enumeration cap per step
};

enum class RunPolicy {
    Deterministic,  // take the canonical first assignment, count violations
    SeededRandom,   // pick uniformly with the given seed
};

struct TraceRow {
    uint64_t step = 0;
    int membrane_count = 0;
    int64_t object_count = 0;
    int64_t rules_applied = 0;
    int64_t emissions = 0;
};

struct RunResult {
    Configuration final_config;
    uint64_t steps = 0;
    bool halted = false;  // no rule applicable (as opposed to budget exhausted)
    // (step, objects sent to the environment at that step); nonempty only.
    std::vector<std::pair<uint64_t, Multiset>> emissions;
    std::vector<Assignment> rule_log;  // per step, when log_rules is set
    uint64_t confluence_violations = 0;
    int max_depth = 0;
    int max_membranes = 0;
};

struct RecognizeResult {
    std::optional<bool> accept;
    std::vector<std::string> violations;  // recogniser-contract failures
    RunResult run;
    bool ok() const { return violations.empty() && accept.has_value(); }
};

struct ExploreResult {
    bool accepting_branch_exists = false;
    uint64_t branches = 0;       // completed root-to-halt computations
    uint64_t accepting_branches = 0;
    bool all_halted = true;      // every explored path reached a halt
    bool partial = false;        // branch bound or assignment bound exceeded
    uint64_t forks = 0;          // steps with more than one assignment
    size_t max_fanout = 1;
};

class Engine {
  public:
    explicit Engine(const PSystem& sys, EngineOptions opt = {});

    const PSystem& system() const { return sys_; }
    const EngineOptions& options() const { return opt_; }

    Configuration initial_configuration(const Multiset& input) const;

    MatchTable matches(const Configuration& cfg) const;
    EnumerateResult assignments(const Configuration& cfg, size_t bound) const;

    // One evolution step. Products are computed from the start-of-step
    // configuration; evolution products land in place, then communication
    // moves, then dissolutions resolve bottom-up (a dissolving membrane's
    // post-rewrite contents and child membranes go to its parent, cascading),
    // and skin send-outs land in the environment.
    Configuration step(const Configuration& cfg, const Assignment& a,
                       Multiset* emitted = nullptr) const;

    RunResult run(const Multiset& input, uint64_t limit, RunPolicy policy,
                  uint64_t seed = 0,
                  const std::function<void(const TraceRow&)>& trace = {}) const;

    // Runs to halt under the deterministic policy and audits the recogniser
    // contract: exactly one yes/no reaches the environment, at the final step.
    RecognizeResult recognize(const Multiset& input, uint64_t limit) const;

    // Exhaustive DFS over maximal assignments with memoization of fully
    // resolved subtrees. Branches are root-to-halt computations.
    ExploreResult explore(const Multiset& input, uint64_t limit,
                          uint64_t branch_bound) const;

    // Explore variant with callbacks, used by the verification harness.
    struct ExploreHooks {
        // called at each node before descending; fanout = assignment count
        std::function<void(const Configuration&, size_t fanout)> on_node;
        // called at each halted leaf with the leaf's emission history
        std::function<void(const Configuration&,
                           const std::vector<Multiset>&)> on_leaf;
    };
    ExploreResult explore_hooked(const Multiset& input, uint64_t limit,
                                 uint64_t branch_bound,
                                 const ExploreHooks& hooks) const;

  private:
    const PSystem& sys_;
    EngineOptions opt_;
    IndexedMatcher matcher_;
};

// Is an object id a yes/no verdict (by payload)?
std::optional<bool> verdict_of(const PSystem& sys, ObjId id);

}  // namespace psim
