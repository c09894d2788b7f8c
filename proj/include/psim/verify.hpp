#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "psim/compiler.hpp"
#include "psim/engine.hpp"
#include "psim/tm.hpp"

namespace psim {

// Reading a TM configuration back out of a compiled configuration at a cycle
// boundary. Undecodable is legal after the machine has halted (the state
// object has been consumed); at a pre-halt boundary it is a hard mismatch.
struct DecodeResult {
    enum class Status { Ok, StateAbsent, Malformed };
    Status status = Status::Malformed;
    std::string detail;
    TMConfig config;  // valid when status == Ok (step is filled by caller)
};

DecodeResult boundary_decode(const PSystem& sys, const Configuration& cfg,
                             const TMSpec& tm, int64_t j, int64_t p);

struct EquivalenceReport {
    bool verdict_match = false;
    bool oracle_accepts = false;
    bool system_accepts = false;
    int64_t boundaries_checked = 0;
    int64_t boundary_mismatches = 0;
    std::vector<int64_t> cycle_lengths;  // observed, per full cycle
    uint64_t confluence_violations = 0;
    std::vector<std::string> recogniser_violations;
    std::vector<std::string> schedule_violations;  // intra-cycle phase checks
    int max_depth = 0;
    uint64_t total_steps = 0;
    uint64_t expected_steps = 0;  // t_end + 2
    std::string error;  // nonempty if the comparison could not run

    bool ok() const {
        return error.empty() && verdict_match && boundary_mismatches == 0 &&
               confluence_violations == 0 && recogniser_violations.empty() &&
               schedule_violations.empty();
    }
};

// Lockstep comparison of the compiled system against the direct TM run:
// boundary configurations must decode to the oracle trace, intermediate
// steps must respect the schedule, and the final verdicts must agree.
EquivalenceReport compare_run(const TMSpec& tm, const std::vector<int>& input,
                              const EngineOptions& opt = {});

struct NdReport {
    bool verdict_match = false;
    bool oracle_accepts = false;
    bool system_accepts = false;
    uint64_t system_branches = 0;
    uint64_t oracle_branches = 0;
    uint64_t system_accepting = 0;
    uint64_t oracle_accepting = 0;
    bool branches_match = false;
    bool fanouts_match = true;  // each fork's fanout == |delta(q,a)| there
    std::vector<std::string> fanout_violations;
    bool partial = false;  // a branch bound was exhausted; result is partial
    std::string error;

    bool ok() const {
        return error.empty() && !partial && verdict_match && branches_match &&
               fanouts_match;
    }
};

NdReport verify_nd(const TMSpec& tm, const std::vector<int>& input,
                   uint64_t branch_bound, const EngineOptions& opt = {});

// Random admitted machines for the equivalence suite. Machines violating the
// head or time promise are rejection-sampled away using the oracle.
struct GenParams {
    int max_states = 5;
    int alphabet_size = 3;  // including blank
    int max_input_len = 5;
    int64_t max_p = 10;
    bool nondeterministic = false;
    int max_choices = 2;  // per (q,a) when nondeterministic
};

struct GeneratedCase {
    TMSpec tm;
    std::vector<int> input;
    uint64_t seed = 0;   // seed that produced this case, for replay
    int attempts = 0;
};

std::optional<GeneratedCase> generate_machine(const GenParams& params,
                                              uint64_t seed,
                                              int max_attempts = 2000);

struct SuiteCase {
    uint64_t seed = 0;
    EquivalenceReport report;
};

struct SuiteReport {
    std::vector<SuiteCase> cases;  // in case order, independent of threads
    int64_t failures = 0;
    double elapsed_seconds = 0.0;
};

// Runs `cases` independent equivalence checks; cases run concurrently when
// OpenMP is available, with results reported in case order either way.
SuiteReport run_equivalence_suite(const GenParams& params, int cases,
                                  uint64_t base_seed, const EngineOptions& opt,
                                  bool parallel = true);

}  // namespace psim
