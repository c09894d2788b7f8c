#include <algorithm>

#include "doctest.h"
#include "micro_systems.hpp"
#include "psim/verify.hpp"

using namespace psim;

namespace {

EngineOptions with_mode(StepMode mode, bool block_source = false) {
    EngineOptions o;
    o.mode = mode;
    o.send_in_blocks_source = block_source;
    return o;
}

}  // namespace

TEST_CASE("micro cases pass under both step modes") {
    for (const micro::MicroCase& c : micro::micro_cases()) {
        CAPTURE(c.name);
        CHECK_MESSAGE(c.run(with_mode(StepMode::Reference)), c.name,
                      " (reference)");
        CHECK_MESSAGE(c.run(with_mode(StepMode::Indexed)), c.name, " (indexed)");
    }
}

TEST_CASE("micro cases pass when send-in charges the source too") {
    for (const micro::MicroCase& c : micro::micro_cases()) {
        CAPTURE(c.name);
        CHECK_MESSAGE(c.run(with_mode(StepMode::Reference, true)), c.name,
                      " (reference, source-charging)");
        CHECK_MESSAGE(c.run(with_mode(StepMode::Indexed, true)), c.name,
                      " (indexed, source-charging)");
    }
}

TEST_CASE("both matchers produce the same match table") {
    micro::Builder b;
    b.root(b.node("skin", {b.node("m1"), b.node("m2", {b.node("inner")})}));
    b.put("skin", "a", 2);
    b.put("m1", "x");
    b.put("m2", "y");
    b.put("inner", "z");
    b.evo("skin", "a", {"b"});
    b.send_in("m1", "a", "a");
    b.send_in("m2", "a", "a");
    b.send_out("m1", "x", "x");
    b.dissolve("inner", "z", "z2");
    b.evo("m2", "y", {"y", "y"});

    for (bool block_source : {false, true}) {
        EngineOptions ro = with_mode(StepMode::Reference, block_source);
        EngineOptions io = with_mode(StepMode::Indexed, block_source);
        Engine re(b.sys, ro);
        Engine ie(b.sys, io);
        Configuration cfg = re.initial_configuration({});
        MatchTable rt = re.matches(cfg);
        MatchTable it = ie.matches(cfg);
        CHECK(rt == it);
        CHECK(rt.evo.size() == 2);     // a->b in skin, y->yy in m2
        CHECK(rt.blocks.size() == 4);  // a into m1, a into m2, x out, z dissolve
    }
}

TEST_CASE("reference and indexed runs agree on compiled systems") {
    GenParams params;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        auto gen = generate_machine(params, seed);
        REQUIRE(gen.has_value());
        CompilerOutput co = assemble(gen->tm, gen->input);
        Engine ref(*co.system, with_mode(StepMode::Reference));
        Engine idx(*co.system, with_mode(StepMode::Indexed));
        RunResult rr = ref.run({}, co.meta.default_budget(),
                               RunPolicy::Deterministic);
        RunResult ir = idx.run({}, co.meta.default_budget(),
                               RunPolicy::Deterministic);
        CAPTURE(seed);
        CHECK(rr.steps == ir.steps);
        CHECK(rr.halted);
        CHECK(ir.halted);
        CHECK(rr.confluence_violations == 0);
        CHECK(ir.confluence_violations == 0);
        CHECK(rr.final_config.canonical_key() == ir.final_config.canonical_key());
        REQUIRE(rr.emissions.size() == ir.emissions.size());
        for (size_t i = 0; i < rr.emissions.size(); ++i) {
            CHECK(rr.emissions[i].first == ir.emissions[i].first);
            CHECK(rr.emissions[i].second == ir.emissions[i].second);
        }
    }
}

TEST_CASE("seeded random policy is reproducible and converges") {
    micro::Builder b;
    b.root(b.node("skin"));
    b.put("skin", "a", 2);
    b.evo("skin", "a", {"b"});
    b.send_out("skin", "a", "a");
    Engine eng(b.sys, with_mode(StepMode::Indexed));
    RunResult r1 = eng.run({}, 16, RunPolicy::SeededRandom, 7);
    RunResult r2 = eng.run({}, 16, RunPolicy::SeededRandom, 7);
    CHECK(r1.steps == r2.steps);
    CHECK(r1.final_config.canonical_key() == r2.final_config.canonical_key());
    CHECK(r1.halted);
}

TEST_CASE("explore counts branches with and without memoization") {
    micro::Builder b;
    b.root(b.node("skin"));
    b.put("skin", "a", 2);
    b.evo("skin", "a", {"b"});
    b.send_out("skin", "a", "a");
    Engine eng(b.sys, with_mode(StepMode::Indexed));
    ExploreResult memo = eng.explore({}, 16, 0);

    uint64_t leaves = 0;
    Engine::ExploreHooks hooks;
    hooks.on_leaf = [&](const Configuration&, const std::vector<Multiset>&) {
        ++leaves;
    };
    ExploreResult walked = eng.explore_hooked({}, 16, 0, hooks);
    CHECK(memo.branches == walked.branches);
    CHECK(walked.branches == leaves);
    CHECK(memo.all_halted);
    CHECK(memo.branches >= 2);
}

TEST_CASE("explore respects the branch bound") {
    // two chained choice points: evolve or emit, then again
    micro::Builder b;
    b.root(b.node("skin"));
    b.put("skin", "a", 1);
    b.evo("skin", "a", {"c"});
    b.send_out("skin", "a", "a");
    b.evo("skin", "c", {"d"});
    b.send_out("skin", "c", "c");
    Engine eng(b.sys, with_mode(StepMode::Indexed));
    ExploreResult full = eng.explore({}, 32, 0);
    CHECK(full.all_halted);
    CHECK(full.branches == 3);
    CHECK(full.forks == 2);
    ExploreResult cut = eng.explore({}, 32, 2);
    CHECK(cut.partial);
}

TEST_CASE("input multiset lands in the input membrane") {
    micro::Builder b;
    b.root(b.node("skin", {b.node("m")}));
    b.sys.set_input_membrane(b.lab("m"));
    Multiset in;
    in.add(b.obj("a"), 2);
    Engine eng(b.sys, with_mode(StepMode::Indexed));
    Configuration cfg = eng.initial_configuration(in);
    CHECK(b.in_membrane(cfg, "m", "a") == 2);
    CHECK(cfg.object_count() == 2);
}

TEST_CASE("run keeps a trace row per step") {
    micro::Builder b;
    b.root(b.node("skin"));
    b.put("skin", "a", 2);
    b.send_out("skin", "a", "a");
    Engine eng(b.sys, with_mode(StepMode::Indexed));
    std::vector<TraceRow> rows;
    RunResult r = eng.run({}, 16, RunPolicy::Deterministic, 0,
                          [&](const TraceRow& t) { rows.push_back(t); });
    CHECK(r.steps == 2);
    REQUIRE(rows.size() == 3);  // initial row plus one per step
    CHECK(rows[0].step == 0);
    CHECK(rows[0].object_count == 2);
    CHECK(rows[1].rules_applied == 1);
    CHECK(rows[1].emissions == 1);
    CHECK(rows[2].object_count == 0);
}

TEST_CASE("recognize audits the verdict contract") {
    SUBCASE("well-behaved recogniser") {
        micro::Builder b;
        b.root(b.node("skin"));
        b.put("skin", "go");
        b.evo("skin", "go", {"y"});
        b.send_out("skin", "y", "yes");
        Engine eng(b.sys, with_mode(StepMode::Indexed));
        RecognizeResult r = eng.recognize({}, 16);
        CHECK(r.ok());
        CHECK(r.accept == true);
    }
    SUBCASE("verdict before the final step") {
        micro::Builder b;
        b.root(b.node("skin"));
        b.put("skin", "y");
        b.put("skin", "slow");
        b.send_out("skin", "y", "no");
        b.evo("skin", "slow", {"slower"});
        b.evo("skin", "slower", {});
        Engine eng(b.sys, with_mode(StepMode::Indexed));
        RecognizeResult r = eng.recognize({}, 16);
        CHECK_FALSE(r.ok());
    }
    SUBCASE("two verdicts") {
        micro::Builder b;
        b.root(b.node("skin"));
        b.put("skin", "y", 2);
        b.send_out("skin", "y", "yes");
        Engine eng(b.sys, with_mode(StepMode::Indexed));
        RecognizeResult r = eng.recognize({}, 16);
        CHECK_FALSE(r.ok());
    }
    SUBCASE("no verdict at all") {
        micro::Builder b;
        b.root(b.node("skin"));
        b.put("skin", "a");
        b.evo("skin", "a", {});
        Engine eng(b.sys, with_mode(StepMode::Indexed));
        RecognizeResult r = eng.recognize({}, 16);
        CHECK_FALSE(r.ok());
        CHECK_FALSE(r.accept.has_value());
    }
}

TEST_CASE("a dumped system runs identically after loading") {
    micro::Builder b;
    b.root(b.node("skin", {b.node("m")}));
    b.put("skin", "a", 2);
    b.put("m", "x");
    b.send_in("m", "a", "a");
    b.evo("m", "x", {"x"});  // keeps m busy doing nothing harmful
    b.dissolve("m", "a", "done");
    std::string doc = b.sys.dump();
    PSystem loaded = PSystem::load(doc);
    CHECK(loaded.dump() == doc);

    // Interned ids differ between the two systems, so compare by spelling.
    auto spelled = [](const PSystem& s, const Configuration& c) {
        std::vector<std::string> out;
        for (const Membrane& mem : c.mems) {
            if (!mem.alive) continue;
            for (const auto& [id, n] : mem.content)
                out.push_back(s.labels().spelling(mem.label) + "/" +
                              s.objects().spelling(id) + "x" +
                              std::to_string(n));
        }
        for (const auto& [id, n] : c.environment)
            out.push_back("env/" + s.objects().spelling(id) + "x" +
                          std::to_string(n));
        std::sort(out.begin(), out.end());
        return out;
    };

    Engine orig(b.sys, with_mode(StepMode::Indexed));
    Engine again(loaded, with_mode(StepMode::Indexed));
    RunResult r1 = orig.run({}, 32, RunPolicy::Deterministic);
    RunResult r2 = again.run({}, 32, RunPolicy::Deterministic);
    CHECK(r1.steps == r2.steps);
    CHECK(r1.halted == r2.halted);
    CHECK(spelled(b.sys, r1.final_config) == spelled(loaded, r2.final_config));
}
