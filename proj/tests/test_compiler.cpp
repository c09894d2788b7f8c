#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "psim/compiler.hpp"
#include "psim/engine.hpp"
#include "psim/tm.hpp"

using namespace psim;

namespace {

const char* kSwapper = R"(states: q0 q1
alphabet: _ a b
start: q0
accept: q1
poly: 1 2
delta: q0 _ -> q1 _ R
delta: q1 a -> q1 b R
delta: q1 b -> q1 a R
)";

const char* kCoin = R"(states: s0 s1 s2 h
alphabet: _ a b
start: s0
accept: h
poly: 1 3
delta: s0 _ -> s1 a R
delta: s0 _ -> s1 b R
delta: s1 _ -> s2 a R
delta: s1 _ -> s2 b R
delta: s2 _ -> h a R
delta: s2 _ -> h b R
)";

// Halts immediately; p(0) = c0 via poly {1, c0}.
TMSpec trivial_machine(int64_t p) {
    TMSpec tm = parse_tm("states: q0\nalphabet: _ a\nstart: q0\naccept: q0\n"
                         "poly: 1 " + std::to_string(p) + "\n");
    return tm;
}

const Rule* find_rule(const PSystem& sys, RuleKind kind,
                      const std::string& label, const std::string& lhs) {
    auto lid = sys.labels().find(label);
    auto oid = sys.objects().find(lhs);
    if (!lid || !oid) return nullptr;
    for (const Rule& r : sys.rules())
        if (r.kind == kind && r.label == *lid && r.lhs == *oid) return &r;
    return nullptr;
}

std::vector<std::string> rhs_of(const PSystem& sys, const Rule& r) {
    std::vector<std::string> out;
    if (r.kind == RuleKind::Evolution) {
        for (const auto& [id, n] : r.rhs)
            for (int64_t k = 0; k < n; ++k)
                out.push_back(sys.objects().spelling(id));
    } else {
        out.push_back(sys.objects().spelling(r.rhs_obj));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("label alphabet counts match the closed form") {
    // 1 + (p+1)^2 cells + (p+1)p handoff membranes.
    const std::vector<size_t> expected{7, 16, 29, 46, 67, 92};
    for (int64_t p = 1; p <= 6; ++p) {
        CAPTURE(p);
        std::set<std::string> brute;
        brute.insert(spell(Label(SkinLabel{})));
        for (int32_t i = 0; i <= p; ++i)
            for (int32_t j = 0; j <= p; ++j)
                brute.insert(spell(Label(CellLabel{i, j})));
        for (int32_t i = 0; i <= p; ++i)
            for (int32_t j = 0; j < p; ++j)
                brute.insert(spell(Label(PrimeLabel{i, j})));
        CHECK(brute.size() == expected[static_cast<size_t>(p) - 1]);
        CHECK(build_labels(p).size() == brute.size());

        CompilerOutput co = build_family_member(trivial_machine(p), 0);
        CHECK(co.meta.p == p);
        CHECK(co.meta.label_count ==
              static_cast<int64_t>(expected[static_cast<size_t>(p) - 1]));
    }
}

TEST_CASE("schedule timing constants") {
    Schedule s{2, 3};
    CHECK(s.cycle() == 9);
    CHECK(s.boundary(0) == 1);
    CHECK(s.boundary(2) == 19);
    CHECK(s.t_end() == 31);
    CHECK(s.run_length() == 33);

    Schedule s2{4, 2};
    CHECK(s2.cycle() == 8);
    CHECK(s2.run_length() == 5 * 8 + 4 + 2);

    CompilerOutput co = build_family_member(parse_tm(kSwapper), 2);
    CHECK(co.meta.p == 4);
    CHECK(co.meta.m == 3);
    CHECK(co.meta.cycle == 9);
    CHECK(co.meta.default_budget() == 4 * 5 * 9 + 16);
}

TEST_CASE("schedule phase table") {
    Schedule s{3, 3};  // m+1=4, m+5=8
    using W = Schedule::Where;
    auto at = [&](Schedule::Expect e, W w, int64_t phase) {
        return e.where == w && e.phase == phase;
    };
    // tape object carrying a symbol with scan rank 2
    CHECK(at(s.tape_at(0, 2, false), W::InCell, 0));
    CHECK(at(s.tape_at(2, 2, false), W::InCell, 2));
    CHECK(at(s.tape_at(3, 2, false), W::InSkin, 3));
    CHECK(at(s.tape_at(4, 2, false), W::InSkin, 4));
    CHECK(at(s.tape_at(5, 2, false), W::InPrime, 5));
    CHECK(at(s.tape_at(6, 2, false), W::InPrime, 6));
    CHECK(at(s.tape_at(7, 2, true), W::InSkin, 7));
    CHECK(at(s.tape_at(7, 2, false), W::InPrime, 7));
    CHECK(s.tape_at(8, 2, true).where == W::Erased);
    CHECK(at(s.tape_at(8, 2, false), W::InSkin, 8));
    // state object when the scanned symbol has rank 2
    CHECK(at(s.state_at(0, 2), W::InSkin, 0));
    CHECK(at(s.state_at(1, 2), W::InCell, 1));
    CHECK(at(s.state_at(2, 2), W::InCell, 2));
    CHECK(at(s.state_at(3, 2), W::InSkin, 3));
    CHECK(at(s.state_at(5, 2), W::InSkin, 5));
    CHECK(at(s.state_at(6, 2), W::InPrime, 6));
    CHECK(at(s.state_at(7, 2), W::InSkin, 7));
    CHECK_FALSE(s.state_tagged_at(3, 2));
    CHECK(s.state_tagged_at(4, 2));
    CHECK(s.state_tagged_at(8, 2));
}

TEST_CASE("compiled structure is shallow with the skin as input membrane") {
    CompilerOutput co = build_family_member(parse_tm(kSwapper), 2);
    const PSystem& sys = *co.system;
    CHECK(sys.validate().empty());
    CHECK(sys.labels().spelling(sys.input_membrane()) == "0");
    CHECK(sys.structure().children.size() ==
          static_cast<size_t>(co.meta.label_count - 1));
    for (const auto& kid : sys.structure().children)
        CHECK(kid.children.empty());
}

TEST_CASE("scan rules walk each symbol up to its rank") {
    CompilerOutput co = build_family_member(parse_tm(kSwapper), 2);
    const PSystem& sys = *co.system;  // m = 3, phi(_)=1 phi(a)=2 phi(b)=3

    // unpacking
    const Rule* unpack = find_rule(sys, RuleKind::SendIn, "(1,0)", "a[1]");
    REQUIRE(unpack);
    CHECK(rhs_of(sys, *unpack) == std::vector<std::string>{"a[1,0,0]"});
    const Rule* boot = find_rule(sys, RuleKind::Evolution, "0", "qI");
    REQUIRE(boot);
    CHECK(rhs_of(sys, *boot) == std::vector<std::string>{"q0[0,0,0]"});

    // in-cell counting stops at the rank, then the cell dissolves
    CHECK(find_rule(sys, RuleKind::Evolution, "(1,0)", "a[1,0,0]"));
    CHECK(find_rule(sys, RuleKind::Evolution, "(1,0)", "a[1,0,1]"));
    CHECK_FALSE(find_rule(sys, RuleKind::Evolution, "(1,0)", "a[1,0,2]"));
    const Rule* dis = find_rule(sys, RuleKind::Dissolution, "(1,0)", "a[1,0,2]");
    REQUIRE(dis);
    CHECK(rhs_of(sys, *dis) == std::vector<std::string>{"a[1,0,3]"});
    CHECK_FALSE(find_rule(sys, RuleKind::Dissolution, "(1,0)", "a[1,0,1]"));

    // released objects climb in the skin up to m+1 = 4
    CHECK(find_rule(sys, RuleKind::Evolution, "0", "a[1,0,3]"));
    CHECK_FALSE(find_rule(sys, RuleKind::Evolution, "0", "a[1,0,2]"));
    const Rule* blank_climb = find_rule(sys, RuleKind::Evolution, "0", "_[1,0,2]");
    REQUIRE(blank_climb);
    CHECK(rhs_of(sys, *blank_climb) == std::vector<std::string>{"_[1,0,3]"});

    // the state enters the scanned cell and counts along
    const Rule* enter = find_rule(sys, RuleKind::SendIn, "(1,0)", "q1[1,0,0]");
    REQUIRE(enter);
    CHECK(rhs_of(sys, *enter) == std::vector<std::string>{"q1[1,0,1]"});
    CHECK(find_rule(sys, RuleKind::Evolution, "(1,0)", "q1[1,0,1]"));
    CHECK(find_rule(sys, RuleKind::Evolution, "(1,0)", "q1[1,0,3]"));

    // decode: the step count reveals the scanned symbol (rank k-1)
    const Rule* dec = find_rule(sys, RuleKind::Evolution, "0", "q1[1,0,3]");
    REQUIRE(dec);
    CHECK(rhs_of(sys, *dec) == std::vector<std::string>{"q1[1,0,4;a]"});
    const Rule* dec_blank = find_rule(sys, RuleKind::Evolution, "0", "q1[1,0,2]");
    REQUIRE(dec_blank);
    CHECK(rhs_of(sys, *dec_blank) == std::vector<std::string>{"q1[1,0,3;_]"});
}

TEST_CASE("handoff rules move everything through the primed membranes") {
    CompilerOutput co = build_family_member(parse_tm(kSwapper), 2);
    const PSystem& sys = *co.system;  // m = 3

    const Rule* in = find_rule(sys, RuleKind::SendIn, "(1,0)'", "a[1,0,4]");
    REQUIRE(in);
    CHECK(rhs_of(sys, *in) == std::vector<std::string>{"a[1,0,5]"});
    CHECK(find_rule(sys, RuleKind::Evolution, "(1,0)'", "a[1,0,5]"));
    CHECK(find_rule(sys, RuleKind::Evolution, "(1,0)'", "a[1,0,6]"));
    const Rule* tdis = find_rule(sys, RuleKind::Dissolution, "(1,0)'", "a[1,0,7]");
    REQUIRE(tdis);
    CHECK(rhs_of(sys, *tdis) == std::vector<std::string>{"a[1,0,8]"});

    const Rule* sin = find_rule(sys, RuleKind::SendIn, "(1,0)'", "q1[1,0,5;a]");
    REQUIRE(sin);
    CHECK(rhs_of(sys, *sin) == std::vector<std::string>{"q1[1,0,6;a]"});
    const Rule* sdis =
        find_rule(sys, RuleKind::Dissolution, "(1,0)'", "q1[1,0,6;a]");
    REQUIRE(sdis);
    CHECK(rhs_of(sys, *sdis) == std::vector<std::string>{"q1[1,0,7;a]"});

    // the head cell's stale symbol is erased in the skin
    const Rule* erase = find_rule(sys, RuleKind::Evolution, "0", "a[1,0,7]");
    REQUIRE(erase);
    CHECK(rhs_of(sys, *erase).empty());

    // no handoff membranes in the final cycle
    CHECK_FALSE(find_rule(sys, RuleKind::SendIn, "(1,4)'", "a[1,4,4]"));
}

TEST_CASE("transition rules write in place and move the state") {
    CompilerOutput co = build_family_member(parse_tm(kSwapper), 2);
    const PSystem& sys = *co.system;  // m+4 = 7, m+5 = 8; delta(q1,a)=(q1,b,R)

    const Rule* write = find_rule(sys, RuleKind::Evolution, "0", "q1[1,0,7;a]");
    REQUIRE(write);
    // the written symbol lands at the current cell, phase m+5
    CHECK(rhs_of(sys, *write) ==
          std::vector<std::string>{"b[1,0,8]", "q1[1,0,8;a]"});

    const Rule* move = find_rule(sys, RuleKind::Evolution, "0", "q1[1,0,8;a]");
    REQUIRE(move);
    CHECK(rhs_of(sys, *move) == std::vector<std::string>{"q1[2,1,0]"});

    // moving off the tape has no successor rule: delta(q1,b)=(q1,a,R) at i=p
    CHECK(find_rule(sys, RuleKind::Evolution, "0", "q1[4,0,7;b]"));
    CHECK_FALSE(find_rule(sys, RuleKind::Evolution, "0", "q1[4,0,8;b]"));

    // cycle reset: survivors drop into the next column of cells
    const Rule* reset = find_rule(sys, RuleKind::SendIn, "(1,1)", "a[1,0,8]");
    REQUIRE(reset);
    CHECK(rhs_of(sys, *reset) == std::vector<std::string>{"a[1,1,0]"});
}

TEST_CASE("halt rules start the countdown, including the last-cycle catch") {
    CompilerOutput co = build_family_member(parse_tm(kSwapper), 2);
    const PSystem& sys = *co.system;  // p=4, C=9; delta(q1,_) empty, q1 accepts

    const Rule* halt = find_rule(sys, RuleKind::Evolution, "0", "q1[1,2,7;_]");
    REQUIRE(halt);
    CHECK(rhs_of(sys, *halt) == std::vector<std::string>{"T[22;yes]"});  // (4-2)*9+4
    const Rule* halt0 = find_rule(sys, RuleKind::Evolution, "0", "q0[0,0,7;a]");
    REQUIRE(halt0);  // delta(q0,a) empty, q0 rejects
    CHECK(rhs_of(sys, *halt0) == std::vector<std::string>{"T[40;no]"});  // 4*9+4

    // machines that halt exactly at time step p skip the handoff membranes
    const Rule* rescue = find_rule(sys, RuleKind::Evolution, "0", "q1[3,4,5;_]");
    REQUIRE(rescue);
    CHECK(rhs_of(sys, *rescue) == std::vector<std::string>{"T[6;yes]"});

    // countdown, verdict materialization, and the only send-out
    const Rule* tick = find_rule(sys, RuleKind::Evolution, "0", "T[22;yes]");
    REQUIRE(tick);
    CHECK(rhs_of(sys, *tick) == std::vector<std::string>{"T[21;yes]"});
    CHECK(find_rule(sys, RuleKind::Evolution, "0", "T[40;no]"));
    const Rule* fire = find_rule(sys, RuleKind::Evolution, "0", "T[0;no]");
    REQUIRE(fire);
    CHECK(rhs_of(sys, *fire) == std::vector<std::string>{"no"});
    const Rule* out = find_rule(sys, RuleKind::SendOut, "0", "yes");
    REQUIRE(out);
    CHECK(rhs_of(sys, *out) == std::vector<std::string>{"yes"});
}

TEST_CASE("nondeterministic machines get one rule per choice") {
    CompilerOutput co = build_family_member(parse_tm(kCoin), 0);
    const PSystem& sys = *co.system;  // m=3, p=3

    auto s0id = sys.objects().find("s0[0,0,7;_]");
    REQUIRE(s0id.has_value());
    int count = 0;
    for (const Rule& r : sys.rules())
        if (r.kind == RuleKind::Evolution && r.lhs == *s0id) ++count;
    CHECK(count == 2);  // two choices for (s0,_)

    const Rule* pick = find_rule(sys, RuleKind::Evolution, "0", "s0[0,0,8;(s1,a,1)]");
    REQUIRE(pick);
    CHECK(rhs_of(sys, *pick) == std::vector<std::string>{"s1[1,1,0]"});
}

TEST_CASE("initial rules only ever fire in the first step") {
    TMSpec tm = parse_tm(kSwapper);
    CompilerOutput co = assemble(tm, parse_input(tm, "ab"));
    const PSystem& sys = *co.system;

    std::set<RuleId> init_rules;
    for (size_t rid = 0; rid < sys.rules().size(); ++rid) {
        const PObject& pl = sys.objects().payload(sys.rules()[rid].lhs);
        if (std::holds_alternative<InitTapeObj>(pl) ||
            std::holds_alternative<InitStateObj>(pl))
            init_rules.insert(static_cast<RuleId>(rid));
    }
    CHECK(init_rules.size() > 0);

    EngineOptions opt;
    opt.log_rules = true;
    Engine eng(sys, opt);
    RunResult r = eng.run({}, co.meta.default_budget(), RunPolicy::Deterministic);
    REQUIRE(r.halted);
    REQUIRE(r.rule_log.size() == r.steps);
    int64_t first_step_inits = 0;
    for (const AppliedRule& ar : r.rule_log[0].items)
        if (init_rules.count(ar.rule)) first_step_inits += ar.multiplicity;
    CHECK(first_step_inits == co.meta.p + 2);  // p+1 tape objects and the state
    for (size_t s = 1; s < r.rule_log.size(); ++s)
        for (const AppliedRule& ar : r.rule_log[s].items)
            CHECK_FALSE(init_rules.count(ar.rule));
}

TEST_CASE("the family member depends on the length, not the input") {
    TMSpec tm = parse_tm(kSwapper);
    std::string f1 = build_family_member(tm, 2).system->dump();
    std::string f2 = build_family_member(tm, 2).system->dump();
    CHECK(f1 == f2);
    CHECK(f1 != build_family_member(tm, 3).system->dump());

    std::vector<int> x1 = parse_input(tm, "ab");
    std::vector<int> x2 = parse_input(tm, "ba");
    CHECK(encode_input(tm, x1).size() == x1.size());
    CHECK(encode_input(tm, x2).size() == x2.size());

    // semi-uniform assembly is exactly family member + folded-in encoding
    CompilerOutput manual = build_family_member(tm, 2);
    Multiset ms = input_multiset(tm, manual, x1);
    LabelId skin = *manual.system->labels().find("0");
    for (const auto& [id, n] : ms) manual.system->add_initial(skin, id, n);
    CHECK(assemble(tm, x1).system->dump() == manual.system->dump());
    CHECK(assemble(tm, x1).system->dump() != assemble(tm, x2).system->dump());
}

TEST_CASE("compiled systems survive a dump/load round trip") {
    TMSpec tm = parse_tm(kSwapper);
    std::string doc = assemble(tm, parse_input(tm, "ab")).system->dump();
    CHECK(PSystem::load(doc).dump() == doc);
}

TEST_CASE("input encoding rejects bad symbols") {
    TMSpec tm = parse_tm(kSwapper);
    CHECK_THROWS_AS(encode_input(tm, {0}), CompileError);   // blank
    CHECK_THROWS_AS(encode_input(tm, {7}), CompileError);   // out of range
    CHECK(encode_input(tm, {}).empty());
}

TEST_CASE("name clashes with the compiled spellings are rejected") {
    auto expect_reject = [](const std::string& text) {
        TMSpec tm = parse_tm(text);
        CHECK_THROWS_AS(build_family_member(tm, 0), CompileError);
    };
    expect_reject("states: yes\nalphabet: _\nstart: yes\npoly: 1 1\n");
    expect_reject("states: qI\nalphabet: _\nstart: qI\npoly: 1 1\n");
    expect_reject("states: T\nalphabet: _\nstart: T\npoly: 1 1\n");
    expect_reject("states: a\nalphabet: _ a\nstart: a\npoly: 1 1\n");
    expect_reject("states: q0\nalphabet: _ T\nstart: q0\npoly: 1 1\n");
}

TEST_CASE("tape bounds that cannot host the run are rejected") {
    TMSpec tm = parse_tm("states: q0\nalphabet: _\nstart: q0\npoly: 1 0\n");
    CHECK_THROWS_AS(build_family_member(tm, 0), CompileError);  // p(0) = 0
    TMSpec big = parse_tm("states: q0\nalphabet: _\nstart: q0\npoly: 9999 1\n");
    CHECK_THROWS_AS(build_family_member(big, 1), CompileError);  // too large
    CHECK_THROWS_AS(build_family_member(tm, -1), CompileError);
}
