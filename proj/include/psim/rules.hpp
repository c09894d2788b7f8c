#pragma once

#include <cstdint>

#include "psim/multiset.hpp"

namespace psim {

using LabelId = uint32_t;
using RuleId = uint32_t;

enum class RuleKind : uint8_t {
    Evolution,    // a -> w, inside the labelled membrane
    SendIn,       // a -> b, a taken from the labelled membrane's outer region
    SendOut,      // a -> b, b placed in the outer region (environment for skin)
    Dissolution,  // a -> b, membrane ceases, contents released outward
};

bool is_blocking(RuleKind k);  // send-in/out and dissolution block a membrane

struct Rule {
    RuleKind kind = RuleKind::Evolution;
    LabelId label = 0;
    ObjId lhs = 0;
    Multiset rhs;        // Evolution only; may be empty (deletion)
    ObjId rhs_obj = 0;   // SendIn/SendOut/Dissolution
    bool operator==(const Rule&) const = default;
};

}  // namespace psim
