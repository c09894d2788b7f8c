// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "micro_systems.hpp"
#include "psim/verify.hpp"

using namespace psim;

namespace {

int failures = 0;

void report(int idx, const std::string& what, bool ok,
            const std::string& note = "") {
    std::string tail = note.empty() ? "" : " (" + note + ")";
    std::printf("[%s] criterion %d: %s%s\n", ok ? "PASS" : "FAIL", idx,
                what.c_str(), tail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

// Replays the suite's generation chain for a stored case seed.
std::optional<GeneratedCase> regen(const GenParams& params, uint64_t seed) {
    std::optional<GeneratedCase> gen;
    for (int retry = 0; retry < 4 && !gen; ++retry)
        gen = generate_machine(params,
                               seed + static_cast<uint64_t>(retry) * 1000003ULL);
    return gen;
}

const char* kSwapper =
    "states: q0 q1\nalphabet: _ a b\nstart: q0\naccept: q1\npoly: 1 2\n"
    "delta: q0 _ -> q1 _ R\ndelta: q1 a -> q1 b R\ndelta: q1 b -> q1 a R\n";
const char* kSweeper =
    "states: q0 q1\nalphabet: _ a\nstart: q0\naccept: q1\npoly: 1 2\n"
    "delta: q0 _ -> q1 _ R\ndelta: q1 a -> q1 a R\n";

}  // namespace

int main() {
    const GenParams det;  // |Q|<=5, |Sigma|<=3, n<=5, p<=10
    const uint64_t kSuiteSeed = 424242;
    SuiteReport suite = run_equivalence_suite(det, 200, kSuiteSeed, {}, true);

    {
        char note[96];
        std::snprintf(note, sizeof note, "%d cases, %lld failures, %.1fs",
                      static_cast<int>(suite.cases.size()),
                      static_cast<long long>(suite.failures),
                      suite.elapsed_seconds);
        report(1, "random deterministic machines agree with the direct runs",
               suite.cases.size() == 200 && suite.failures == 0 &&
                   suite.elapsed_seconds < 60.0,
               note);
    }

    {
        long long boundaries = 0, mismatches = 0;
        for (const SuiteCase& c : suite.cases) {
            boundaries += c.report.boundaries_checked;
            mismatches += c.report.boundary_mismatches;
        }
        report(2, "every cycle boundary decodes to the oracle configuration",
               boundaries > 0 && mismatches == 0,
               std::to_string(boundaries) + " boundaries decoded");
    }

    {
        bool ok = true;
        long long cycles = 0;
        for (const SuiteCase& c : suite.cases) {
            if (!c.report.schedule_violations.empty()) ok = false;
            auto gen = regen(det, c.seed);
            if (!gen) {
                ok = false;
                continue;
            }
            int64_t want = gen->tm.m() + 6;
            for (int64_t len : c.report.cycle_lengths) {
                ++cycles;
                if (len != want) ok = false;
            }
        }
        TMSpec two = parse_tm(kSweeper);
        EquivalenceReport r2 = compare_run(two, parse_input(two, "aa"));
        for (int64_t len : r2.cycle_lengths)
            if (len != 8) ok = false;
        TMSpec three = parse_tm(kSwapper);
        EquivalenceReport r3 = compare_run(three, parse_input(three, "ab"));
        for (int64_t len : r3.cycle_lengths)
            if (len != 9) ok = false;
        ok = ok && r2.ok() && r3.ok() && cycles > 0;
        report(3, "every simulation cycle takes exactly alphabet size + 6 steps",
               ok, std::to_string(cycles) + " cycles measured");
    }

    {
        const std::vector<size_t> frozen{7, 16, 29, 46, 67, 92};
        bool ok = true;
        for (int64_t p = 1; p <= 6; ++p) {
            std::set<std::string> brute;
            brute.insert(spell(Label(SkinLabel{})));
            for (int32_t i = 0; i <= p; ++i)
                for (int32_t j = 0; j <= p; ++j)
                    brute.insert(spell(Label(CellLabel{i, j})));
            for (int32_t i = 0; i <= p; ++i)
                for (int32_t j = 0; j < p; ++j)
                    brute.insert(spell(Label(PrimeLabel{i, j})));
            size_t want = frozen[static_cast<size_t>(p) - 1];
            if (brute.size() != want) ok = false;
            if (build_labels(p).size() != want) ok = false;
            TMSpec tm = parse_tm("states: q0\nalphabet: _ a\nstart: q0\n"
                                 "accept: q0\npoly: 1 " +
                                 std::to_string(p) + "\n");
            CompilerOutput co = build_family_member(tm, 0);
            if (co.meta.label_count != static_cast<int64_t>(want)) ok = false;
        }
        report(4, "label alphabet sizes for p=1..6 match the enumeration oracle",
               ok, "7,16,29,46,67,92");
    }

    {
        bool ok = true;
        int max_depth = 0;
        for (const SuiteCase& c : suite.cases) {
            if (c.report.max_depth > max_depth) max_depth = c.report.max_depth;
            if (c.report.max_depth > 1) ok = false;
            if (c.report.confluence_violations != 0) ok = false;
        }
        report(5,
               "compiled systems stay depth 1 with one maximal assignment "
               "per step",
               ok, "max depth " + std::to_string(max_depth));
    }

    {
        bool ok = true;
        long long audited = 0;
        for (const SuiteCase& c : suite.cases) {
            audited += static_cast<long long>(c.report.recogniser_violations.empty());
            if (!c.report.recogniser_violations.empty()) ok = false;
        }
        report(6, "exactly one verdict reaches the environment, at the last step",
               ok, std::to_string(audited) + " runs audited");
    }

    {
        GenParams nd = det;
        nd.nondeterministic = true;
        nd.max_choices = 3;
        int done = 0, good = 0;
        uint64_t min_b = ~0ULL, max_b = 0;
        for (uint64_t seed = 777000; done < 50 && seed < 777000 + 600; ++seed) {
            auto gen = generate_machine(nd, seed);
            if (!gen) continue;
            ++done;
            NdReport rep = verify_nd(gen->tm, gen->input, 256);
            if (rep.oracle_branches < min_b) min_b = rep.oracle_branches;
            if (rep.oracle_branches > max_b) max_b = rep.oracle_branches;
            if (rep.ok() && rep.oracle_branches >= 2 && rep.oracle_branches <= 64)
                ++good;
        }
        // six two-way flips in a row: the full 64-branch tree
        std::string coin6 = "states: c0 c1 c2 c3 c4 c5 h\nalphabet: _ a b\n"
                            "start: c0\naccept: h\npoly: 1 6\n";
        for (int i = 0; i < 6; ++i) {
            std::string from = "c" + std::to_string(i);
            std::string to = i == 5 ? "h" : "c" + std::to_string(i + 1);
            coin6 += "delta: " + from + " _ -> " + to + " a R\n";
            coin6 += "delta: " + from + " _ -> " + to + " b R\n";
        }
        NdReport wide = verify_nd(parse_tm(coin6), {}, 256);
        if (wide.ok() && wide.oracle_branches == 64 && max_b < 64) max_b = 64;
        char note[96];
        std::snprintf(note, sizeof note,
                      "%d machines + full tree, %llu..%llu branches", done + 1,
                      static_cast<unsigned long long>(min_b),
                      static_cast<unsigned long long>(max_b));
        report(7, "branching machines match the full computation tree",
               done >= 50 && good == done && wide.ok() &&
                   wide.oracle_branches == 64 && wide.system_branches == 64,
               note);
    }

    {
        TMSpec tm = parse_tm(kSwapper);
        bool ok = true;
        // the family member is a function of the length alone
        std::string fam = build_family_member(tm, 2).system->dump();
        if (fam != build_family_member(tm, 2).system->dump()) ok = false;
        std::vector<int> x1 = parse_input(tm, "ab");
        std::vector<int> x2 = parse_input(tm, "ba");
        if (encode_input(tm, x1).size() != x1.size()) ok = false;
        if (encode_input(tm, x2).size() != x2.size()) ok = false;
        // assembly is exactly family member plus folded-in encoding
        for (const auto& x : {x1, x2}) {
            CompilerOutput manual = build_family_member(tm, 2);
            if (manual.system->dump() != fam) ok = false;
            Multiset ms = input_multiset(tm, manual, x);
            LabelId skin = *manual.system->labels().find("0");
            for (const auto& [id, cnt] : ms)
                manual.system->add_initial(skin, id, cnt);
            if (assemble(tm, x).system->dump() != manual.system->dump())
                ok = false;
        }
        report(8, "the compiled family member depends only on the input length",
               ok);
    }

    {
        auto cases = micro::micro_cases();
        int passed = 0;
        EngineOptions opt;  // Indexed mode
        for (const auto& mc : cases)
            if (mc.run(opt)) ++passed;
        report(9, "engine semantics micro-suite passes",
               cases.size() >= 12 && passed == static_cast<int>(cases.size()),
               std::to_string(passed) + "/" + std::to_string(cases.size()));
    }

    if (failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
