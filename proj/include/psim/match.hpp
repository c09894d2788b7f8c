#pragma once

#include <unordered_map>
#include <vector>

#include "psim/assignment.hpp"
#include "psim/configuration.hpp"

namespace psim {

// Raw per-step match candidates, produced either by the reference matcher
// (per-rule scan) or the indexed matcher (per-membrane, OpenMP). Both must
// produce the same table after canonical sorting.

struct EvoMatch {
    int region = 0;  // membrane index owning the consumed object
    ObjId obj = 0;
    RuleId rule = 0;
    bool operator==(const EvoMatch&) const = default;
};

struct BlockMatch {
    int slot = 0;    // membrane whose block the rule uses (target for send-in)
    int slot2 = -1;  // extra charged membrane (send-in source, when enabled)
    int source = 0;  // membrane index of the region holding the object
    ObjId obj = 0;
    RuleId rule = 0;
    bool operator==(const BlockMatch&) const = default;
};

struct MatchTable {
    std::vector<EvoMatch> evo;
    std::vector<BlockMatch> blocks;
    bool operator==(const MatchTable&) const = default;
};

struct EngineOptions;

// Canonical membrane order: by label (label_less), ties by index. Returns
// rank per membrane index.
std::vector<int> membrane_ranks(const PSystem& sys, const Configuration& cfg);

void sort_match_table(MatchTable& table, const PSystem& sys,
                      const Configuration& cfg);

// Straightforward single-threaded matcher: walks the full rule list.
MatchTable reference_match(const PSystem& sys, const Configuration& cfg,
                           const EngineOptions& opt);

// Indexed matcher: hash indices by (label, object), parallel over membranes.
class IndexedMatcher {
  public:
    explicit IndexedMatcher(const PSystem& sys);
    MatchTable match(const Configuration& cfg, const EngineOptions& opt) const;

  private:
    const PSystem& sys_;
    std::unordered_map<uint64_t, std::vector<RuleId>> evo_;  // (label,obj)
    std::unordered_map<uint64_t, std::vector<RuleId>> out_;  // (label,obj)
    // obj -> (rule, target membrane label)
    std::unordered_map<ObjId, std::vector<std::pair<RuleId, LabelId>>> in_;
};

MatchTable indexed_match(const PSystem& sys, const Configuration& cfg,
                         const EngineOptions& opt);

struct EnumerateResult {
    std::vector<Assignment> assignments;
    bool truncated = false;
};

// All maximal assignments for the table, in canonical order, up to `bound`.
EnumerateResult enumerate_assignments(const PSystem& sys,
                                      const Configuration& cfg,
                                      const MatchTable& table, size_t bound);

// Shared structural pass: dissolved membranes release their post-rewrite
// contents and child membranes to the parent, innermost first.
void resolve_dissolutions(Configuration& cfg, std::vector<int> dissolved);

Configuration apply_reference(const PSystem& sys, const Configuration& cfg,
                              const Assignment& a, Multiset* emitted);
Configuration apply_indexed(const PSystem& sys, const Configuration& cfg,
                            const Assignment& a, Multiset* emitted);

}  // namespace psim
