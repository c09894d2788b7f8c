#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace psim {

// Objects carried by membranes. The engine itself never looks inside a
// payload; it matches interned ids. Payloads exist so the compiler and the
// verification harness can read tape symbols, head positions and phase
// counters back out of a configuration.

struct TransitionChoice {
    int32_t state = 0;  // successor state r
    int32_t sym = 0;    // written symbol b
    int32_t dest = 0;   // destination cell i+d
    auto operator<=>(const TransitionChoice&) const = default;
};

// untagged | remembered scanned symbol | remembered nondeterministic choice
using StateTag = std::variant<std::monostate, int32_t, TransitionChoice>;

struct TapeObj {  // a[i,j,k]
    int32_t sym = 0;
    int32_t cell = 0;
    int32_t time = 0;
    int32_t phase = 0;
};

struct StateObj {  // q[i,j,k] / q[i,j,k;a] / q[i,j,k;(r,b,c)]
    int32_t state = 0;
    int32_t cell = 0;
    int32_t time = 0;
    int32_t phase = 0;
    StateTag tag;
};

struct InitTapeObj {  // a[i]
    int32_t sym = 0;
    int32_t cell = 0;
};

struct InitStateObj {  // qI
    int32_t state = 0;
};

struct TimerObj {  // T[c;yes] / T[c;no]
    int64_t remaining = 0;
    bool accept = false;
};

struct VerdictObj {  // yes / no
    bool accept = false;
};

struct OpaqueObj {  // spelled verbatim; used by engine-level systems and loads
    std::string name;
};

using PObject = std::variant<OpaqueObj, TapeObj, StateObj, InitTapeObj,
                             InitStateObj, TimerObj, VerdictObj>;

// Symbol/state names needed to render a payload's canonical spelling.
struct NameContext {
    const std::vector<std::string>* symbols = nullptr;
    const std::vector<std::string>* states = nullptr;
};

std::string spell(const PObject& obj, const NameContext& ctx);

}  // namespace psim
