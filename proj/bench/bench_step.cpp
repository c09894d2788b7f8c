// Wall-clock comparison of the two step modes: the naive reference matcher
// against the indexed one, on compiled systems of growing size and on a wide
// flat system. Pass tape bounds as arguments to override the default sizes.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "psim/compiler.hpp"
#include "psim/engine.hpp"
#include "psim/tm.hpp"

using namespace psim;

namespace {

struct Timing {
    double seconds = 0.0;
    uint64_t steps = 0;
    bool halted = false;
};

Timing time_mode(const PSystem& sys, StepMode mode, uint64_t budget) {
    EngineOptions opt;
    opt.mode = mode;
    Engine eng(sys, opt);
    Timing t;
    auto t0 = std::chrono::steady_clock::now();
    RunResult r = eng.run({}, budget, RunPolicy::Deterministic);
    t.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    t.steps = r.steps;
    t.halted = r.halted;
    return t;
}

size_t count_membranes(const MembraneDecl& d) {
    size_t n = 1;
    for (const auto& kid : d.children) n += count_membranes(kid);
    return n;
}

void bench_row(const std::string& name, const PSystem& sys, uint64_t budget) {
    Timing ref = time_mode(sys, StepMode::Reference, budget);
    Timing idx = time_mode(sys, StepMode::Indexed, budget);
    if (ref.steps != idx.steps || ref.halted != idx.halted) {
        std::fprintf(stderr, "%s: step modes disagree (%llu vs %llu steps)\n",
                     name.c_str(), static_cast<unsigned long long>(ref.steps),
                     static_cast<unsigned long long>(idx.steps));
        std::exit(1);
    }
    std::printf("%-16s %9zu %9zu %7llu %11.4fs %11.4fs %7.2fx\n", name.c_str(),
                count_membranes(sys.structure()), sys.rules().size(),
                static_cast<unsigned long long>(idx.steps), ref.seconds,
                idx.seconds,
                idx.seconds > 0 ? ref.seconds / idx.seconds : 0.0);
    std::fflush(stdout);
}

// A flat system: many identical membranes, each independently rewriting a
// batch of objects down a chain. Stresses per-membrane matching.
PSystem wide_system(int membranes, int chain) {
    PSystem sys;
    LabelId skin = sys.labels().intern(Label(OpaqueLabel{"skin"}));
    sys.declare_label(skin);
    MembraneDecl root{skin, {}};
    for (int i = 0; i < membranes; ++i) {
        LabelId lid =
            sys.labels().intern(Label(OpaqueLabel{"m" + std::to_string(i)}));
        sys.declare_label(lid);
        root.children.push_back(MembraneDecl{lid, {}});
        for (int t = 0; t < chain; ++t) {
            Rule r;
            r.kind = RuleKind::Evolution;
            r.label = lid;
            r.lhs = sys.objects().intern("a" + std::to_string(t));
            r.rhs.add(sys.objects().intern("a" + std::to_string(t + 1)));
            sys.add_rule(r);
        }
        sys.add_initial(lid, sys.objects().intern("a0"), 8);
    }
    sys.set_structure(std::move(root));
    sys.set_input_membrane(skin);
    return sys;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int64_t> sizes{6, 10, 14};
    if (argc > 1) {
        sizes.clear();
        for (int i = 1; i < argc; ++i) {
            int64_t p = std::atoll(argv[i]);
            if (p < 2 || p > 64) {
                std::fprintf(stderr, "tape bound %s out of range 2..64\n",
                             argv[i]);
                return 1;
            }
            sizes.push_back(p);
        }
    }

    std::printf("%-16s %9s %9s %7s %12s %12s %8s\n", "system", "membranes",
                "rules", "steps", "reference", "indexed", "speedup");

    const char* kSweeper =
        "states: q0 q1\nalphabet: _ a\nstart: q0\naccept: q1\npoly: 1 2\n"
        "delta: q0 _ -> q1 _ R\ndelta: q1 a -> q1 a R\n";
    TMSpec tm = parse_tm(kSweeper);
    for (int64_t p : sizes) {
        std::string input(static_cast<size_t>(p - 2), 'a');
        CompilerOutput co = assemble(tm, parse_input(tm, input));
        bench_row("sweeper p=" + std::to_string(p), *co.system,
                  co.meta.default_budget());
    }

    PSystem wide_small = wide_system(128, 32);
    bench_row("wide 128x32", wide_small, 64);
    PSystem wide_big = wide_system(256, 64);
    bench_row("wide 256x64", wide_big, 96);
    return 0;
}
