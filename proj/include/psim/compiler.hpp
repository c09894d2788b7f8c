#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "psim/psystem.hpp"
#include "psim/tm.hpp"

namespace psim {

struct CompileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Timing of the compiled simulation. One TM step takes C = m+6 engine steps;
// the configuration encoding TM step j appears at global engine step
// 1 + j*C (step 1 is input unpacking). Within a cycle, relative step tau runs
// 1..C and every object's phase counter k equals tau while it is active.
struct Schedule {
    int64_t p = 0;
    int m = 0;

    int64_t cycle() const { return m + 6; }
    int64_t boundary(int64_t j) const { return 1 + j * cycle(); }
    // Global deadline: his countdown reaches zero here; the verdict leaves
    // the skin two steps later, so every admitted run takes t_end()+2 steps.
    int64_t t_end() const { return (p + 1) * cycle() + 4; }
    int64_t run_length() const { return t_end() + 2; }

    // Expected (location, phase) of objects at relative step tau of a
    // non-halting cycle; used by the verification harness.
    enum class Where { InCell, InSkin, InPrime, Erased };
    struct Expect {
        Where where;
        int64_t phase;
    };
    Expect tape_at(int tau, int phi_sym, bool head_cell) const;
    Expect state_at(int tau, int phi_scanned) const;  // where the state sits
    // Whether the state object is tagged with the scanned symbol at tau.
    bool state_tagged_at(int tau, int phi_scanned) const;
};

struct CompilerMetadata {
    int64_t p = 0;
    int m = 0;
    int64_t cycle = 0;
    int64_t t_end = 0;
    int64_t label_count = 0;
    int64_t rule_count = 0;
    int64_t n = 0;
    Schedule schedule() const { return Schedule{p, m}; }
    uint64_t default_budget() const {
        return static_cast<uint64_t>(4 * (p + 1) * cycle + 16);
    }
};

struct CompilerOutput {
    std::shared_ptr<PSystem> system;  // the family member for input length n
    CompilerMetadata meta;
};

// Label alphabet for tape bound p: skin, (i,j) for i,j in 0..p, and (i,j)'
// for i in 0..p, j in 0..p-1.
std::vector<Label> build_labels(int64_t p);

// Rule builders append to `out.system`; exposed individually for tests.
void build_initial_rules(const TMSpec& tm, CompilerOutput& out);
void build_scan_rules(const TMSpec& tm, CompilerOutput& out);
void build_handoff_rules(const TMSpec& tm, CompilerOutput& out);
void build_transition_rules(const TMSpec& tm, CompilerOutput& out);
void build_nd_transition_rules(const TMSpec& tm, CompilerOutput& out);
void build_halt_rules(const TMSpec& tm, CompilerOutput& out);

// The input-length-only family member F(1^n): depends on the machine and n,
// never on the input contents.
CompilerOutput build_family_member(const TMSpec& tm, int64_t n);

// The input encoding E(x): one object per input symbol, cells 1..|x|.
std::vector<PObject> encode_input(const TMSpec& tm,
                                  const std::vector<int>& input);

// Materializes E(x) in the family member's object table.
Multiset input_multiset(const TMSpec& tm, CompilerOutput& out,
                        const std::vector<int>& input);

// Semi-uniform composition: family member with the encoded input folded
// into the input membrane's initial multiset.
CompilerOutput assemble(const TMSpec& tm, const std::vector<int>& input);

}  // namespace psim
