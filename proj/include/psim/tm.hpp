#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psim/psystem.hpp"

namespace psim {

// Single-tape Turing machines with a fixed polynomial tape/time bound.
// The alphabet is ordered and its first symbol is the blank; the order
// defines the scan ranking phi (blank = 1). The transition relation may be
// multi-valued; an empty image means the machine halts, and it accepts iff
// the halting state is accepting. The tape has exactly p(n)+1 cells 0..p(n):
// the input occupies cells 1..n and the head starts on cell 0.

struct Transition {
    int next = 0;
    int write = 0;
    int dir = 0;  // -1 or +1
    bool operator==(const Transition&) const = default;
};

struct TMSpec {
    std::vector<std::string> states;
    std::vector<std::string> alphabet;  // index 0 = blank
    int start = 0;
    std::vector<bool> accepting;
    // delta[q][a] -> choices (empty = halt)
    std::vector<std::vector<std::vector<Transition>>> delta;
    std::vector<int64_t> poly;  // c_d ... c_0, so p(n) = sum c_t n^t

    int64_t p(int64_t n) const;
    bool deterministic() const;
    int m() const { return static_cast<int>(alphabet.size()); }
    int phi(int sym) const { return sym + 1; }  // scan rank, blank first

    std::string format() const;  // round-trips through parse_tm
};

struct TMConfig {
    std::vector<int> tape;  // p(n)+1 cells
    int64_t head = 0;
    int state = 0;
    int64_t step = 0;
    bool operator==(const TMConfig&) const = default;
};

// Line-oriented text format; errors carry line/column.
TMSpec parse_tm(const std::string& text);
TMSpec parse_tm_file(const std::string& path);

std::vector<Diagnostic> validate_tm(const TMSpec& tm);

// Input strings are sequences of single-character non-blank symbols.
std::vector<int> parse_input(const TMSpec& tm, const std::string& input);

TMConfig initial_tm_config(const TMSpec& tm, const std::vector<int>& input);

bool tm_halted(const TMSpec& tm, const TMConfig& c);

// Applies one transition. `choice` selects among multiple images and is
// required iff there are several; moving the head out of 0..p(n) is an error.
struct TMStepError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
TMConfig tm_step(const TMSpec& tm, const TMConfig& c, int choice = -1);

struct TMRunResult {
    std::vector<TMConfig> trace;  // includes the initial configuration
    bool halted = false;
    bool accepted = false;
    bool head_violation = false;  // head left 0..p(n)
    bool time_violation = false;  // still running after p(n) steps
};

// Deterministic run (errors if the machine is nondeterministic).
TMRunResult tm_run(const TMSpec& tm, const std::vector<int>& input);

struct NTMRunResult {
    bool accepted = false;       // existential over all choice sequences
    uint64_t branches = 0;       // halting choice sequences
    uint64_t accepting_branches = 0;
    bool all_halted = true;
    bool head_violation = false;
    bool time_violation = false;
    bool partial = false;        // branch bound exceeded
};

// Bounded exhaustive enumeration of choice sequences.
NTMRunResult tm_run_nd(const TMSpec& tm, const std::vector<int>& input,
                       uint64_t branch_bound);

std::string render_tape(const TMSpec& tm, const TMConfig& c);

}  // namespace psim
