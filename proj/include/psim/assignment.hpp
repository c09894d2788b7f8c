#pragma once

#include <cstdint>
#include <vector>

#include "psim/rules.hpp"

namespace psim {

// One applied rule within a step. For send-in rules `membrane` is the target
// membrane (whose block the rule uses); the consumed object comes from its
// parent region. For all other kinds `membrane` owns both the region and,
// for blocking kinds, the block.
struct AppliedRule {
    int membrane = 0;
    RuleId rule = 0;
    int64_t multiplicity = 1;
    bool operator==(const AppliedRule&) const = default;
};

// A maximal multiset of rule applications for one step: every consumable
// object is consumed, and each membrane is subject to at most one blocking
// rule application. Items are kept in canonical (label, rule id) order.
struct Assignment {
    std::vector<AppliedRule> items;
    bool operator==(const Assignment&) const = default;
    int64_t total_applications() const;
};

}  // namespace psim
