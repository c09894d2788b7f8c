#include "psim/verify.hpp"

#include <algorithm>
#include <chrono>
#include <variant>

namespace psim {

namespace {

std::string nth(int64_t i, int64_t j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

DecodeResult boundary_decode(const PSystem& sys, const Configuration& cfg,
                             const TMSpec& tm, int64_t j, int64_t p) {
    DecodeResult res;
    auto malformed = [&](std::string d) {
        res.status = DecodeResult::Status::Malformed;
        res.detail = std::move(d);
        return res;
    };

    int64_t state_count = 0;
    const StateObj* st = nullptr;
    bool st_in_root = false;
    for (size_t mi = 0; mi < cfg.mems.size(); ++mi) {
        const Membrane& mem = cfg.mems[mi];
        if (!mem.alive) continue;
        for (const auto& [id, n] : mem.content) {
            const PObject& pl = sys.objects().payload(id);
            if (const auto* s = std::get_if<StateObj>(&pl)) {
                state_count += n;
                st = s;
                st_in_root = static_cast<int>(mi) == cfg.root;
            }
        }
    }
    if (state_count == 0) {
        res.status = DecodeResult::Status::StateAbsent;
        res.detail = "no state object in the configuration";
        return res;
    }
    if (state_count > 1) return malformed("more than one state object");
    if (!st_in_root) return malformed("state object is not in the skin");
    if (!std::holds_alternative<std::monostate>(st->tag))
        return malformed("state object is tagged");
    if (st->phase != 0)
        return malformed("state object phase is " + std::to_string(st->phase) +
                         ", expected 0");
    if (st->time != j)
        return malformed("state object time is " + std::to_string(st->time) +
                         ", expected " + std::to_string(j));
    if (st->state < 0 || st->state >= static_cast<int>(tm.states.size()))
        return malformed("state index out of range");
    if (st->cell < 0 || st->cell > p) return malformed("head position out of range");

    res.config.tape.assign(static_cast<size_t>(p) + 1, 0);
    for (int64_t i = 0; i <= p; ++i) {
        auto lid = sys.labels().find(spell(Label(CellLabel{
            static_cast<int32_t>(i), static_cast<int32_t>(j)})));
        int mi = lid ? cfg.find_label(*lid) : -1;
        if (mi < 0) return malformed("cell " + nth(i, j) + " is missing");
        const Membrane& mem = cfg.mems[static_cast<size_t>(mi)];
        if (mem.content.size() != 1)
            return malformed("cell " + nth(i, j) + " holds " +
                             std::to_string(mem.content.size()) +
                             " objects, expected exactly 1");
        const auto& [id, n] = *mem.content.begin();
        (void)n;
        const auto* t = std::get_if<TapeObj>(&sys.objects().payload(id));
        if (!t || t->cell != i || t->time != j || t->phase != 0 || t->sym < 0 ||
            t->sym >= tm.m())
            return malformed("cell " + nth(i, j) +
                             " does not hold its tape object");
        res.config.tape[static_cast<size_t>(i)] = t->sym;
    }
    res.config.head = st->cell;
    res.config.state = st->state;
    res.config.step = j;
    res.status = DecodeResult::Status::Ok;
    return res;
}

EquivalenceReport compare_run(const TMSpec& tm, const std::vector<int>& input,
                              const EngineOptions& opt) {
    EquivalenceReport rep;
    if (!tm.deterministic()) {
        rep.error = "machine is nondeterministic, use verify_nd";
        return rep;
    }

    TMRunResult oracle;
    try {
        oracle = tm_run(tm, input);
    } catch (const TMStepError& e) {
        rep.error = e.what();
        return rep;
    }
    if (oracle.head_violation) {
        rep.error = "machine moved its head out of 0..p(n)";
        return rep;
    }
    if (oracle.time_violation) {
        rep.error = "machine ran past p(n) steps";
        return rep;
    }
    rep.oracle_accepts = oracle.accepted;
    const int64_t h = static_cast<int64_t>(oracle.trace.size()) - 1;

    CompilerOutput co;
    try {
        co = assemble(tm, input);
    } catch (const CompileError& e) {
        rep.error = e.what();
        return rep;
    }
    const PSystem& sys = *co.system;
    const Schedule sched = co.meta.schedule();
    const int64_t p = co.meta.p;
    const int m = co.meta.m;
    const int64_t C = sched.cycle();
    rep.expected_steps = static_cast<uint64_t>(sched.run_length());
    const NameContext names{&tm.alphabet, &tm.states};

    auto violation = [&](std::string msg) {
        if (rep.schedule_violations.size() < 100)
            rep.schedule_violations.push_back(std::move(msg));
    };

    enum class Loc { Root, Cell, Prime };
    auto where_ok = [](Schedule::Where w, Loc loc, int32_t li, int32_t lj,
                       int32_t cell, int32_t time) {
        switch (w) {
            case Schedule::Where::InCell:
                return loc == Loc::Cell && li == cell && lj == time;
            case Schedule::Where::InSkin:
                return loc == Loc::Root;
            case Schedule::Where::InPrime:
                return loc == Loc::Prime && li == cell && lj == time;
            case Schedule::Where::Erased:
                return false;
        }
        return false;
    };

    std::vector<int64_t> boundary_steps;
    std::vector<std::pair<uint64_t, Multiset>> emissions;
    bool halted = false;
    uint64_t g = 0;

    try {
        Engine eng(sys, opt);
        Configuration cfg = eng.initial_configuration({});
        const uint64_t budget = co.meta.default_budget();

        while (g < budget) {
            EnumerateResult en = eng.assignments(cfg, opt.assignment_bound);
            if (en.assignments.empty() && !en.truncated) {
                halted = true;
                break;
            }
            if (en.truncated || en.assignments.size() != 1)
                ++rep.confluence_violations;
            if (en.assignments.empty()) break;
            Multiset emitted;
            cfg = eng.step(cfg, en.assignments.front(), &emitted);
            ++g;
            if (!emitted.empty()) emissions.push_back({g, emitted});
            rep.max_depth = std::max(rep.max_depth, cfg.depth());
            if (cfg.depth() > 1)
                violation("step " + std::to_string(g) + ": nesting depth " +
                          std::to_string(cfg.depth()) + ", expected at most 1");

            // Boundary: the untagged phase-0 state object is back in the skin.
            bool is_boundary = false;
            for (const auto& [id, n] : cfg.mems[static_cast<size_t>(cfg.root)].content) {
                (void)n;
                const auto* s = std::get_if<StateObj>(&sys.objects().payload(id));
                if (s && s->phase == 0 &&
                    std::holds_alternative<std::monostate>(s->tag))
                    is_boundary = true;
            }
            if (is_boundary) {
                int64_t jb = static_cast<int64_t>(boundary_steps.size());
                boundary_steps.push_back(static_cast<int64_t>(g));
                if (jb <= h) {
                    ++rep.boundaries_checked;
                    DecodeResult dr = boundary_decode(sys, cfg, tm, jb, p);
                    if (dr.status != DecodeResult::Status::Ok) {
                        ++rep.boundary_mismatches;
                        violation("boundary " + std::to_string(jb) +
                                  ": undecodable: " + dr.detail);
                    } else {
                        const TMConfig& oc = oracle.trace[static_cast<size_t>(jb)];
                        if (dr.config.tape != oc.tape ||
                            dr.config.head != oc.head ||
                            dr.config.state != oc.state) {
                            ++rep.boundary_mismatches;
                            violation("boundary " + std::to_string(jb) +
                                      ": decoded " + render_tape(tm, dr.config) +
                                      " state " +
                                      tm.states[static_cast<size_t>(dr.config.state)] +
                                      ", oracle has " + render_tape(tm, oc) +
                                      " state " +
                                      tm.states[static_cast<size_t>(oc.state)]);
                        }
                    }
                }
            }

            // Intra-cycle schedule checks for full pre-halt cycles.
            const int64_t j = static_cast<int64_t>(g - 1) / C;
            const int tau = static_cast<int>(static_cast<int64_t>(g - 1) % C);
            if (j < h) {
                const TMConfig& oc = oracle.trace[static_cast<size_t>(j)];
                const int head = static_cast<int>(oc.head);
                const int scanned = oc.tape[static_cast<size_t>(head)];
                const int f_state = tm.phi(scanned);
                int64_t tape_count = 0;
                int64_t state_count = 0;
                for (size_t mi = 0; mi < cfg.mems.size(); ++mi) {
                    const Membrane& mem = cfg.mems[mi];
                    if (!mem.alive) continue;
                    Loc loc = Loc::Root;
                    int32_t li = 0, lj = 0;
                    const Label& lab = sys.labels().label(mem.label);
                    if (const auto* cl = std::get_if<CellLabel>(&lab)) {
                        loc = Loc::Cell;
                        li = cl->i;
                        lj = cl->j;
                    } else if (const auto* pl = std::get_if<PrimeLabel>(&lab)) {
                        loc = Loc::Prime;
                        li = pl->i;
                        lj = pl->j;
                    }
                    for (const auto& [id, n] : mem.content) {
                        const PObject& pl = sys.objects().payload(id);
                        std::string sp = spell(pl, names);
                        if (const auto* t = std::get_if<TapeObj>(&pl)) {
                            tape_count += n;
                            if (t->time != j) {
                                violation("step " + std::to_string(g) + ": " + sp +
                                          " has time " + std::to_string(t->time) +
                                          ", cycle is " + std::to_string(j));
                                continue;
                            }
                            if (tau == m + 5) {
                                if (loc != Loc::Root || t->phase != m + 5)
                                    violation("step " + std::to_string(g) + ": " +
                                              sp + " should be in the skin at "
                                              "phase " + std::to_string(m + 5));
                                continue;
                            }
                            auto ex = sched.tape_at(tau, tm.phi(t->sym),
                                                    t->cell == head);
                            if (t->phase != ex.phase ||
                                !where_ok(ex.where, loc, li, lj, t->cell, t->time))
                                violation("step " + std::to_string(g) + ": " + sp +
                                          " off schedule at cycle step " +
                                          std::to_string(tau));
                        } else if (const auto* s = std::get_if<StateObj>(&pl)) {
                            state_count += n;
                            if (s->time != j || s->state != oc.state ||
                                s->cell != head) {
                                violation("step " + std::to_string(g) + ": " + sp +
                                          " does not match the oracle (state " +
                                          tm.states[static_cast<size_t>(oc.state)] +
                                          ", head " + std::to_string(head) + ")");
                                continue;
                            }
                            auto ex = sched.state_at(tau, f_state);
                            bool tagged =
                                !std::holds_alternative<std::monostate>(s->tag);
                            if (tagged != sched.state_tagged_at(tau, f_state))
                                violation("step " + std::to_string(g) + ": " + sp +
                                          (tagged ? " is tagged too early"
                                                  : " should already be tagged"));
                            if (const auto* ts = std::get_if<int32_t>(&s->tag))
                                if (*ts != scanned)
                                    violation("step " + std::to_string(g) + ": " +
                                              sp + " remembers the wrong symbol");
                            if (s->phase != ex.phase ||
                                !where_ok(ex.where, loc, li, lj, s->cell, s->time))
                                violation("step " + std::to_string(g) + ": " + sp +
                                          " off schedule at cycle step " +
                                          std::to_string(tau));
                        } else {
                            violation("step " + std::to_string(g) + ": " + sp +
                                      " should not exist before the halt cycle");
                        }
                    }
                }
                if (tape_count != p + 1)
                    violation("step " + std::to_string(g) + ": " +
                              std::to_string(tape_count) +
                              " tape objects, expected " + std::to_string(p + 1));
                if (state_count != 1)
                    violation("step " + std::to_string(g) + ": " +
                              std::to_string(state_count) +
                              " state objects, expected 1");
            }
        }
    } catch (const std::exception& e) {
        rep.error = e.what();
        return rep;
    }

    rep.total_steps = g;
    if (!halted) {
        rep.error = "run did not halt within the step budget";
        return rep;
    }

    for (size_t b = 1; b < boundary_steps.size(); ++b)
        rep.cycle_lengths.push_back(boundary_steps[b] - boundary_steps[b - 1]);
    if (boundary_steps.empty() || boundary_steps.front() != 1)
        violation("first boundary is not at step 1");
    if (static_cast<int64_t>(boundary_steps.size()) != h + 1)
        violation("observed " + std::to_string(boundary_steps.size()) +
                  " boundaries, expected " + std::to_string(h + 1));
    for (int64_t cl : rep.cycle_lengths)
        if (cl != C)
            violation("cycle of length " + std::to_string(cl) + ", expected " +
                      std::to_string(C));
    if (rep.total_steps != rep.expected_steps)
        violation("run took " + std::to_string(rep.total_steps) +
                  " steps, expected " + std::to_string(rep.expected_steps));

    int64_t verdicts = 0;
    bool accept = false;
    uint64_t vstep = 0;
    for (const auto& [st, ms] : emissions)
        for (const auto& [id, n] : ms) {
            auto v = verdict_of(sys, id);
            if (!v) {
                rep.recogniser_violations.push_back(
                    "a non-verdict object reached the environment");
            } else {
                verdicts += n;
                accept = *v;
                vstep = st;
            }
        }
    if (verdicts == 0) {
        rep.recogniser_violations.push_back("no verdict object was sent out");
    } else if (verdicts > 1) {
        rep.recogniser_violations.push_back(
            "more than one verdict object was sent out");
    } else {
        if (vstep != rep.total_steps)
            rep.recogniser_violations.push_back(
                "verdict was sent out at step " + std::to_string(vstep) +
                " but the run halted at step " + std::to_string(rep.total_steps));
        rep.system_accepts = accept;
        rep.verdict_match = accept == rep.oracle_accepts;
    }
    return rep;
}

NdReport verify_nd(const TMSpec& tm, const std::vector<int>& input,
                   uint64_t branch_bound, const EngineOptions& opt) {
    NdReport rep;
    NTMRunResult oracle;
    try {
        oracle = tm_run_nd(tm, input, branch_bound);
    } catch (const TMStepError& e) {
        rep.error = e.what();
        return rep;
    }
    if (oracle.head_violation) {
        rep.error = "machine moved its head out of 0..p(n)";
        return rep;
    }
    if (oracle.time_violation) {
        rep.error = "machine ran past p(n) steps on some branch";
        return rep;
    }
    rep.oracle_accepts = oracle.accepted;
    rep.oracle_branches = oracle.branches;
    rep.oracle_accepting = oracle.accepting_branches;
    if (oracle.partial) {
        rep.partial = true;
        return rep;
    }

    CompilerOutput co;
    try {
        co = assemble(tm, input);
    } catch (const CompileError& e) {
        rep.error = e.what();
        return rep;
    }
    const PSystem& sys = *co.system;
    const int m = co.meta.m;

    uint64_t bad_leaves = 0;
    Engine::ExploreHooks hooks;
    hooks.on_node = [&](const Configuration& cfg, size_t fanout) {
        if (fanout == 0) return;
        size_t expected = 1;
        for (const auto& [id, n] :
             cfg.mems[static_cast<size_t>(cfg.root)].content) {
            (void)n;
            const auto* s = std::get_if<StateObj>(&sys.objects().payload(id));
            if (s && s->phase == m + 4) {
                if (const auto* a = std::get_if<int32_t>(&s->tag)) {
                    size_t k = tm.delta[static_cast<size_t>(s->state)]
                                       [static_cast<size_t>(*a)].size();
                    expected = k > 0 ? k : 1;
                }
            }
        }
        if (fanout != expected) {
            rep.fanouts_match = false;
            if (rep.fanout_violations.size() < 50)
                rep.fanout_violations.push_back(
                    "fork with " + std::to_string(fanout) +
                    " assignments, expected " + std::to_string(expected));
        }
    };
    hooks.on_leaf = [&](const Configuration&,
                        const std::vector<Multiset>& path) {
        int64_t verdicts = 0;
        size_t vstep = 0;
        for (size_t s = 0; s < path.size(); ++s)
            for (const auto& [id, n] : path[s]) {
                if (verdict_of(sys, id)) {
                    verdicts += n;
                    vstep = s + 1;
                } else {
                    verdicts += 2;  // foreign emission, force a failure
                }
            }
        if (verdicts != 1 || vstep != path.size()) ++bad_leaves;
    };

    try {
        Engine eng(sys, opt);
        ExploreResult res =
            eng.explore_hooked({}, co.meta.default_budget(), branch_bound, hooks);
        rep.partial = res.partial;
        rep.system_branches = res.branches;
        rep.system_accepting = res.accepting_branches;
        rep.system_accepts = res.accepting_branch_exists;
        rep.branches_match = res.branches == oracle.branches &&
                             res.accepting_branches == oracle.accepting_branches;
        rep.verdict_match = rep.system_accepts == rep.oracle_accepts;
        if (!res.all_halted && !res.partial)
            rep.error = "some computation did not halt within the step budget";
    } catch (const std::exception& e) {
        rep.error = e.what();
        return rep;
    }
    if (bad_leaves > 0)
        rep.error = std::to_string(bad_leaves) +
                    " branch(es) violated the recogniser contract";
    return rep;
}

std::optional<GeneratedCase> generate_machine(const GenParams& params,
                                              uint64_t seed, int max_attempts) {
    std::mt19937_64 rng(seed);
    const std::string symbol_pool = "_abcdefgh";
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        TMSpec tm;
        int nq = 1 + static_cast<int>(rng() % static_cast<uint64_t>(
                                                 std::max(1, params.max_states)));
        for (int q = 0; q < nq; ++q) tm.states.push_back("q" + std::to_string(q));
        int max_na = std::max(2, params.alphabet_size);
        int na = 2 + static_cast<int>(rng() % static_cast<uint64_t>(max_na - 1));
        na = std::min<int>(na, static_cast<int>(symbol_pool.size()));
        for (int a = 0; a < na; ++a) tm.alphabet.push_back(std::string(1, symbol_pool[static_cast<size_t>(a)]));
        tm.start = 0;
        tm.accepting.assign(static_cast<size_t>(nq), false);
        for (int q = 0; q < nq; ++q) tm.accepting[static_cast<size_t>(q)] = rng() % 2 == 0;

        int n = static_cast<int>(rng() % static_cast<uint64_t>(params.max_input_len + 1));
        std::vector<int> input;
        for (int i = 0; i < n; ++i)
            input.push_back(1 + static_cast<int>(rng() % static_cast<uint64_t>(na - 1)));

        int64_t c1 = 1 + static_cast<int64_t>(rng() % 2);
        int64_t c0 = static_cast<int64_t>(rng() % 4);
        tm.poly = {c1, c0};
        int64_t p = tm.p(n);
        if (p < std::max<int64_t>(n, 1) || p > params.max_p) continue;

        tm.delta.assign(static_cast<size_t>(nq),
                        std::vector<std::vector<Transition>>(
                            static_cast<size_t>(na)));
        for (int q = 0; q < nq; ++q)
            for (int a = 0; a < na; ++a) {
                if (rng() % 4 == 0) continue;  // halting pair
                int k = params.nondeterministic
                            ? 1 + static_cast<int>(
                                      rng() % static_cast<uint64_t>(
                                                  std::max(1, params.max_choices)))
                            : 1;
                auto& image = tm.delta[static_cast<size_t>(q)][static_cast<size_t>(a)];
                for (int c = 0; c < k; ++c) {
                    Transition tr{static_cast<int>(rng() % static_cast<uint64_t>(nq)),
                                  static_cast<int>(rng() % static_cast<uint64_t>(na)),
                                  rng() % 2 == 0 ? 1 : -1};
                    if (std::find(image.begin(), image.end(), tr) == image.end())
                        image.push_back(tr);
                }
            }

        if (!validate_tm(tm).empty()) continue;

        if (!params.nondeterministic) {
            TMRunResult r = tm_run(tm, input);
            if (!r.halted || r.head_violation || r.time_violation) continue;
        } else {
            bool fork = false;
            for (const auto& row : tm.delta)
                for (const auto& image : row)
                    if (image.size() > 1) fork = true;
            if (!fork) continue;
            NTMRunResult r = tm_run_nd(tm, input, 64);
            if (r.partial || !r.all_halted || r.head_violation ||
                r.time_violation || r.branches < 2)
                continue;
        }
        return GeneratedCase{std::move(tm), std::move(input), seed, attempt};
    }
    return std::nullopt;
}

SuiteReport run_equivalence_suite(const GenParams& params, int cases,
                                  uint64_t base_seed, const EngineOptions& opt,
                                  bool parallel) {
    SuiteReport rep;
    rep.cases.assign(static_cast<size_t>(std::max(0, cases)), SuiteCase{});
    auto t0 = std::chrono::steady_clock::now();

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int i = 0; i < cases; ++i) {
        uint64_t seed = base_seed + static_cast<uint64_t>(i);
        SuiteCase sc;
        sc.seed = seed;
        std::optional<GeneratedCase> gen;
        for (int retry = 0; retry < 4 && !gen; ++retry)
            gen = generate_machine(params,
                                   seed + static_cast<uint64_t>(retry) * 1000003ULL);
        if (!gen) {
            sc.report.error =
                "no admitted machine for seed " + std::to_string(seed);
        } else if (params.nondeterministic) {
            NdReport nd = verify_nd(gen->tm, gen->input, 256, opt);
            sc.report.oracle_accepts = nd.oracle_accepts;
            sc.report.system_accepts = nd.system_accepts;
            sc.report.verdict_match = nd.verdict_match && nd.branches_match &&
                                      nd.fanouts_match && !nd.partial;
            sc.report.error = nd.error;
        } else {
            sc.report = compare_run(gen->tm, gen->input, opt);
        }
        rep.cases[static_cast<size_t>(i)] = std::move(sc);
    }

    for (const SuiteCase& c : rep.cases)
        if (!c.report.ok()) ++rep.failures;
    rep.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return rep;
}

}  // namespace psim
