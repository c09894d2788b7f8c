#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "psim/compiler.hpp"
#include "psim/engine.hpp"
#include "psim/psystem.hpp"
#include "psim/tm.hpp"
#include "psim/verify.hpp"

// Exit codes: 0 accept/verified, 1 reject, 2 mismatch or contract violation,
// 3 usage/parse errors.

namespace {

constexpr uint64_t kDefaultSeed = 12648430;
constexpr int kOk = 0;
constexpr int kReject = 1;
constexpr int kViolation = 2;
constexpr int kUsage = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw psim::ParseError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct CommonOpts {
    bool reference = false;
    bool block_source = false;

    psim::EngineOptions engine() const {
        psim::EngineOptions opt;
        opt.mode = reference ? psim::StepMode::Reference : psim::StepMode::Indexed;
        opt.send_in_blocks_source = block_source;
        return opt;
    }
};

void add_engine_flags(CLI::App* sub, CommonOpts& c) {
    sub->add_flag("--reference", c.reference,
                  "use the serial reference stepper instead of the indexed one");
    sub->add_flag("--send-in-blocks-source", c.block_source,
                  "a send-in also charges the source membrane's block");
}

int audit_verdict(const psim::PSystem& sys, const psim::RunResult& r,
                  bool expect_verdict) {
    int64_t verdicts = 0;
    bool accept = false;
    uint64_t vstep = 0;
    int64_t foreign = 0;
    for (const auto& [step, ms] : r.emissions)
        for (const auto& [id, n] : ms) {
            auto v = psim::verdict_of(sys, id);
            if (!v) {
                foreign += n;
            } else {
                verdicts += n;
                accept = *v;
                vstep = step;
            }
        }
    if (!expect_verdict) {
        std::cout << "emitted: " << verdicts + foreign << " object(s)\n";
        return kOk;
    }
    if (foreign > 0) {
        std::cerr << "contract violation: a non-verdict object reached the "
                     "environment\n";
        return kViolation;
    }
    if (verdicts != 1) {
        std::cerr << "contract violation: " << verdicts
                  << " verdict objects were sent out, expected exactly 1\n";
        return kViolation;
    }
    if (vstep != r.steps) {
        std::cerr << "contract violation: verdict at step " << vstep
                  << " but the run halted at step " << r.steps << "\n";
        return kViolation;
    }
    std::cout << "verdict: " << (accept ? "accept" : "reject") << "\n";
    return accept ? kOk : kReject;
}

int cmd_run_tm(const std::string& machine, const std::string& input,
               uint64_t branch_bound, bool verbose) {
    psim::TMSpec tm = psim::parse_tm_file(machine);
    std::vector<int> in = psim::parse_input(tm, input);
    if (tm.deterministic()) {
        psim::TMRunResult r = psim::tm_run(tm, in);
        if (verbose)
            for (const psim::TMConfig& c : r.trace)
                std::cout << c.step << "  "
                          << tm.states[static_cast<size_t>(c.state)] << "  "
                          << psim::render_tape(tm, c) << "\n";
        if (r.head_violation) {
            std::cerr << "machine moved its head out of 0..p(n)\n";
            return kViolation;
        }
        if (r.time_violation) {
            std::cerr << "machine ran past p(n) steps\n";
            return kViolation;
        }
        std::cout << "steps: " << r.trace.size() - 1 << "\n";
        std::cout << "verdict: " << (r.accepted ? "accept" : "reject") << "\n";
        return r.accepted ? kOk : kReject;
    }
    psim::NTMRunResult r = psim::tm_run_nd(tm, in, branch_bound);
    if (r.head_violation) {
        std::cerr << "machine moved its head out of 0..p(n)\n";
        return kViolation;
    }
    if (r.time_violation) {
        std::cerr << "machine ran past p(n) steps on some branch\n";
        return kViolation;
    }
    if (r.partial) {
        std::cerr << "enumeration exceeded --branch-bound " << branch_bound
                  << "\n";
        return kViolation;
    }
    std::cout << "branches: " << r.branches
              << "  accepting: " << r.accepting_branches << "\n";
    std::cout << "verdict: " << (r.accepted ? "accept" : "reject") << "\n";
    return r.accepted ? kOk : kReject;
}

int cmd_compile(const std::string& machine, int64_t n,
                const std::string& out_path) {
    psim::TMSpec tm = psim::parse_tm_file(machine);
    psim::CompilerOutput co = psim::build_family_member(tm, n);
    auto diags = co.system->validate();
    if (!diags.empty()) {
        for (const auto& d : diags)
            std::cerr << "invalid system: " << d.code << ": " << d.detail << "\n";
        return kViolation;
    }
    std::string doc = co.system->dump();
    if (out_path.empty()) {
        std::cout << doc << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw psim::ParseError("cannot write file: " + out_path);
        out << doc << "\n";
    }
    std::cerr << "labels: " << co.meta.label_count
              << "  rules: " << co.meta.rule_count << "  cycle: " << co.meta.cycle
              << "  run length: " << co.meta.schedule().run_length() << "\n";
    return kOk;
}

int cmd_encode(const std::string& machine, const std::string& input) {
    psim::TMSpec tm = psim::parse_tm_file(machine);
    std::vector<int> in = psim::parse_input(tm, input);
    psim::NameContext ctx{&tm.alphabet, &tm.states};
    for (const psim::PObject& o : psim::encode_input(tm, in))
        std::cout << psim::spell(o, ctx) << "\n";
    return kOk;
}

int cmd_simulate(const std::string& machine, const std::string& input,
                 const std::string& system_json, const std::string& objects,
                 const std::string& trace_path, const std::string& policy_name,
                 uint64_t seed, uint64_t budget, const CommonOpts& common) {
    psim::PSystem loaded;
    psim::CompilerOutput co;
    const psim::PSystem* sys = nullptr;
    psim::Multiset input_ms;
    bool expect_verdict = true;

    if (!system_json.empty()) {
        loaded = psim::PSystem::load(read_file(system_json));
        sys = &loaded;
        expect_verdict = false;
        std::istringstream toks(objects);
        std::string tok;
        while (toks >> tok) {
            auto id = loaded.objects().find(tok);
            if (!id) throw psim::ParseError("unknown object spelling: " + tok);
            input_ms.add(*id);
        }
        if (budget == 0) budget = 100000;
    } else {
        if (machine.empty())
            throw psim::ParseError("either a machine file or --system is needed");
        psim::TMSpec tm = psim::parse_tm_file(machine);
        std::vector<int> in = psim::parse_input(tm, input);
        co = psim::assemble(tm, in);
        sys = co.system.get();
        if (budget == 0) budget = co.meta.default_budget();
    }

    psim::Engine eng(*sys, common.engine());
    psim::RunPolicy policy = policy_name == "random"
                                 ? psim::RunPolicy::SeededRandom
                                 : psim::RunPolicy::Deterministic;
    if (policy == psim::RunPolicy::SeededRandom)
        std::cout << "seed: " << seed << "\n";

    std::ofstream csv;
    std::function<void(const psim::TraceRow&)> cb;
    if (!trace_path.empty()) {
        csv.open(trace_path);
        if (!csv) throw psim::ParseError("cannot write file: " + trace_path);
        csv << "step,membrane_count,object_count,rules_applied,emissions\n";
        cb = [&csv](const psim::TraceRow& row) {
            csv << row.step << ',' << row.membrane_count << ','
                << row.object_count << ',' << row.rules_applied << ','
                << row.emissions << "\n";
        };
    }

    psim::RunResult r = eng.run(input_ms, budget, policy, seed, cb);
    std::cout << "steps: " << r.steps << "  halted: " << (r.halted ? "yes" : "no")
              << "  max depth: " << r.max_depth
              << "  max membranes: " << r.max_membranes << "\n";
    if (!r.halted) {
        std::cerr << "run did not halt within the step budget " << budget << "\n";
        return kViolation;
    }
    if (r.confluence_violations > 0)
        std::cout << "note: maximal assignment not unique at "
                  << r.confluence_violations << " step(s)\n";
    return audit_verdict(*sys, r, expect_verdict);
}

int cmd_verify(const std::string& machine, const std::string& input,
               const CommonOpts& common) {
    psim::TMSpec tm = psim::parse_tm_file(machine);
    std::vector<int> in = psim::parse_input(tm, input);
    psim::EquivalenceReport rep = psim::compare_run(tm, in, common.engine());
    if (!rep.error.empty()) {
        std::cerr << "error: " << rep.error << "\n";
        return kViolation;
    }
    std::cout << "oracle: " << (rep.oracle_accepts ? "accept" : "reject")
              << "  system: " << (rep.system_accepts ? "accept" : "reject")
              << "\n";
    std::cout << "boundaries checked: " << rep.boundaries_checked
              << "  mismatches: " << rep.boundary_mismatches << "\n";
    std::cout << "steps: " << rep.total_steps << " of " << rep.expected_steps
              << " expected\n";
    for (const auto& v : rep.schedule_violations)
        std::cerr << "schedule: " << v << "\n";
    for (const auto& v : rep.recogniser_violations)
        std::cerr << "recogniser: " << v << "\n";
    if (rep.confluence_violations > 0)
        std::cerr << "confluence: maximal assignment not unique at "
                  << rep.confluence_violations << " step(s)\n";
    std::cout << (rep.ok() ? "VERIFIED" : "MISMATCH") << "\n";
    return rep.ok() ? kOk : kViolation;
}

int cmd_verify_nd(const std::string& machine, const std::string& input,
                  uint64_t branch_bound, const CommonOpts& common) {
    psim::TMSpec tm = psim::parse_tm_file(machine);
    std::vector<int> in = psim::parse_input(tm, input);
    psim::NdReport rep = psim::verify_nd(tm, in, branch_bound, common.engine());
    if (!rep.error.empty()) {
        std::cerr << "error: " << rep.error << "\n";
        return kViolation;
    }
    if (rep.partial) {
        std::cerr << "enumeration exceeded --branch-bound " << branch_bound
                  << "\n";
        return kViolation;
    }
    std::cout << "oracle: " << (rep.oracle_accepts ? "accept" : "reject")
              << " with " << rep.oracle_branches << " branches ("
              << rep.oracle_accepting << " accepting)\n";
    std::cout << "system: " << (rep.system_accepts ? "accept" : "reject")
              << " with " << rep.system_branches << " branches ("
              << rep.system_accepting << " accepting)\n";
    for (const auto& v : rep.fanout_violations) std::cerr << "fanout: " << v << "\n";
    std::cout << (rep.ok() ? "VERIFIED" : "MISMATCH") << "\n";
    return rep.ok() ? kOk : kViolation;
}

int cmd_fuzz(int cases, uint64_t seed, bool nd, bool serial, int max_states,
             int alphabet_size, int max_input_len, int64_t max_p,
             const CommonOpts& common) {
    psim::GenParams params;
    params.max_states = max_states;
    params.alphabet_size = alphabet_size;
    params.max_input_len = max_input_len;
    params.max_p = max_p;
    params.nondeterministic = nd;
    std::cout << "seed: " << seed << "\n";
    psim::SuiteReport rep = psim::run_equivalence_suite(params, cases, seed,
                                                        common.engine(), !serial);
    for (const psim::SuiteCase& c : rep.cases) {
        if (c.report.ok()) continue;
        std::cerr << "case seed " << c.seed << ": ";
        if (!c.report.error.empty())
            std::cerr << c.report.error << "\n";
        else if (!c.report.verdict_match)
            std::cerr << "verdict mismatch\n";
        else if (!c.report.schedule_violations.empty())
            std::cerr << c.report.schedule_violations.front() << "\n";
        else if (!c.report.recogniser_violations.empty())
            std::cerr << c.report.recogniser_violations.front() << "\n";
        else
            std::cerr << "boundary or confluence mismatch\n";
    }
    std::cout << "cases: " << rep.cases.size() << "  failures: " << rep.failures
              << "  elapsed: " << rep.elapsed_seconds << "s\n";
    return rep.failures == 0 ? kOk : kViolation;
}

int cmd_stats(const std::string& machine, int64_t n) {
    psim::TMSpec tm = psim::parse_tm_file(machine);
    psim::CompilerOutput co = psim::build_family_member(tm, n);
    const psim::Schedule s = co.meta.schedule();
    std::cout << "n: " << co.meta.n << "\n"
              << "p(n): " << co.meta.p << "\n"
              << "alphabet size m: " << co.meta.m << "\n"
              << "cycle length: " << s.cycle() << "\n"
              << "labels: " << co.meta.label_count << "\n"
              << "rules: " << co.meta.rule_count << "\n"
              << "run length: " << s.run_length() << "\n"
              << "default step budget: " << co.meta.default_budget() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shallow membrane systems: engine, compiler and verifier"};
    app.require_subcommand(1);

    std::string machine, input, out_path, system_json, objects, trace_path;
    std::string policy = "deterministic";
    uint64_t seed = kDefaultSeed;
    uint64_t branch_bound = 4096;
    uint64_t budget = 0;
    int64_t n = 0;
    int cases = 50;
    bool verbose = false, nd = false, serial = false;
    int max_states = 5, alphabet_size = 3, max_input_len = 5;
    int64_t max_p = 10;
    CommonOpts common;

    auto* run_tm = app.add_subcommand("run-tm", "run a machine directly");
    run_tm->add_option("machine", machine, "machine file")->required();
    run_tm->add_option("input", input, "input string (may be empty)");
    run_tm->add_option("--branch-bound", branch_bound,
                       "enumeration cap for nondeterministic machines");
    run_tm->add_flag("-v,--verbose", verbose, "print the whole trace");

    auto* compile = app.add_subcommand(
        "compile", "translate a machine into a membrane system");
    compile->add_option("machine", machine, "machine file")->required();
    compile->add_option("-n,--input-length", n, "input length")->required();
    compile->add_option("-o,--output", out_path, "write JSON here (default stdout)");

    auto* encode = app.add_subcommand("encode", "print the input encoding");
    encode->add_option("machine", machine, "machine file")->required();
    encode->add_option("input", input, "input string")->required();

    auto* simulate =
        app.add_subcommand("simulate", "run the compiled system in the engine");
    simulate->add_option("machine", machine, "machine file");
    simulate->add_option("input", input, "input string");
    simulate->add_option("--system", system_json,
                         "run a dumped system JSON instead of compiling");
    simulate->add_option("--objects", objects,
                         "whitespace-separated objects for --system");
    simulate->add_option("--trace", trace_path, "write a CSV trace here");
    simulate->add_option("--policy", policy, "deterministic | random")
        ->check(CLI::IsMember({"deterministic", "random"}));
    simulate->add_option("--seed", seed, "seed for --policy random");
    simulate->add_option("--budget", budget, "step budget (default: derived)");
    add_engine_flags(simulate, common);

    auto* verify = app.add_subcommand(
        "verify", "check the compiled system against the direct run");
    verify->add_option("machine", machine, "machine file")->required();
    verify->add_option("input", input, "input string")->required();
    add_engine_flags(verify, common);

    auto* verify_nd = app.add_subcommand(
        "verify-nd", "check branch counts for a nondeterministic machine");
    verify_nd->add_option("machine", machine, "machine file")->required();
    verify_nd->add_option("input", input, "input string")->required();
    verify_nd->add_option("--branch-bound", branch_bound, "enumeration cap");
    add_engine_flags(verify_nd, common);

    auto* fuzz =
        app.add_subcommand("fuzz", "random machines vs the direct oracle");
    fuzz->add_option("--cases", cases, "number of machines");
    fuzz->add_option("--seed", seed, "base seed");
    fuzz->add_flag("--nd", nd, "generate nondeterministic machines");
    fuzz->add_flag("--serial", serial, "disable the parallel outer loop");
    fuzz->add_option("--max-states", max_states, "state count cap");
    fuzz->add_option("--alphabet-size", alphabet_size, "alphabet size cap");
    fuzz->add_option("--max-input-len", max_input_len, "input length cap");
    fuzz->add_option("--max-p", max_p, "tape bound cap");
    add_engine_flags(fuzz, common);

    auto* stats =
        app.add_subcommand("stats", "sizes and timing of the compiled system");
    stats->add_option("machine", machine, "machine file")->required();
    stats->add_option("-n,--input-length", n, "input length")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (run_tm->parsed())
            return cmd_run_tm(machine, input, branch_bound, verbose);
        if (compile->parsed()) return cmd_compile(machine, n, out_path);
        if (encode->parsed()) return cmd_encode(machine, input);
        if (simulate->parsed())
            return cmd_simulate(machine, input, system_json, objects, trace_path,
                                policy, seed, budget, common);
        if (verify->parsed()) return cmd_verify(machine, input, common);
        if (verify_nd->parsed())
            return cmd_verify_nd(machine, input, branch_bound, common);
        if (fuzz->parsed())
            return cmd_fuzz(cases, seed, nd, serial, max_states, alphabet_size,
                            max_input_len, max_p, common);
        if (stats->parsed()) return cmd_stats(machine, n);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
