#include "psim/compiler.hpp"

#include <algorithm>
#include <cctype>

namespace psim {

Schedule::Expect Schedule::tape_at(int tau, int phi_sym, bool head_cell) const {
    if (tau <= phi_sym) return {Where::InCell, tau};
    if (tau <= m + 1) return {Where::InSkin, tau};
    if (tau <= m + 3) return {Where::InPrime, tau};
    if (tau == m + 4) return {head_cell ? Where::InSkin : Where::InPrime, tau};
    if (head_cell) return {Where::Erased, 0};
    return {Where::InSkin, tau};
}

Schedule::Expect Schedule::state_at(int tau, int phi_scanned) const {
    if (tau == 0) return {Where::InSkin, 0};
    if (tau <= phi_scanned) return {Where::InCell, tau};
    if (tau <= m + 2) return {Where::InSkin, tau};
    if (tau == m + 3) return {Where::InPrime, tau};
    return {Where::InSkin, tau};
}

bool Schedule::state_tagged_at(int tau, int phi_scanned) const {
    return tau >= phi_scanned + 2;
}

std::vector<Label> build_labels(int64_t p) {
    std::vector<Label> out;
    out.push_back(SkinLabel{});
    for (int32_t i = 0; i <= p; ++i)
        for (int32_t j = 0; j <= p; ++j) out.push_back(CellLabel{i, j});
    for (int32_t i = 0; i <= p; ++i)
        for (int32_t j = 0; j < p; ++j) out.push_back(PrimeLabel{i, j});
    return out;
}

namespace {

// Shorthand for interning the objects, labels and rules a builder needs.
struct Emit {
    const TMSpec& tm;
    PSystem& sys;
    NameContext ctx;
    int64_t p;
    int m;

    Emit(const TMSpec& tm_, CompilerOutput& out)
        : tm(tm_),
          sys(*out.system),
          ctx{&tm_.alphabet, &tm_.states},
          p(out.meta.p),
          m(out.meta.m) {}

    ObjId obj(const PObject& o) { return sys.objects().intern(spell(o, ctx), o); }

    ObjId tape(int a, int64_t i, int64_t j, int64_t k) {
        return obj(TapeObj{a, static_cast<int32_t>(i), static_cast<int32_t>(j),
                           static_cast<int32_t>(k)});
    }
    ObjId state(int q, int64_t i, int64_t j, int64_t k) {
        return obj(StateObj{q, static_cast<int32_t>(i), static_cast<int32_t>(j),
                            static_cast<int32_t>(k), std::monostate{}});
    }
    ObjId state_sym(int q, int64_t i, int64_t j, int64_t k, int a) {
        return obj(StateObj{q, static_cast<int32_t>(i), static_cast<int32_t>(j),
                            static_cast<int32_t>(k), a});
    }
    ObjId state_choice(int q, int64_t i, int64_t j, int64_t k,
                       const TransitionChoice& c) {
        return obj(StateObj{q, static_cast<int32_t>(i), static_cast<int32_t>(j),
                            static_cast<int32_t>(k), c});
    }
    ObjId timer(int64_t remaining, bool accept) {
        return obj(TimerObj{remaining, accept});
    }
    ObjId verdict(bool accept) { return obj(VerdictObj{accept}); }

    LabelId skin() { return sys.labels().intern(SkinLabel{}); }
    LabelId cell(int64_t i, int64_t j) {
        return sys.labels().intern(
            CellLabel{static_cast<int32_t>(i), static_cast<int32_t>(j)});
    }
    LabelId prime(int64_t i, int64_t j) {
        return sys.labels().intern(
            PrimeLabel{static_cast<int32_t>(i), static_cast<int32_t>(j)});
    }

    void evo(LabelId label, ObjId lhs, const std::vector<ObjId>& rhs) {
        Rule r;
        r.kind = RuleKind::Evolution;
        r.label = label;
        r.lhs = lhs;
        for (ObjId o : rhs) r.rhs.add(o);
        sys.add_rule(std::move(r));
    }
    void uni(RuleKind kind, LabelId label, ObjId lhs, ObjId rhs_obj) {
        Rule r;
        r.kind = kind;
        r.label = label;
        r.lhs = lhs;
        r.rhs_obj = rhs_obj;
        sys.add_rule(std::move(r));
    }
};

const char* kReservedStates[] = {"qI", "yes", "no", "T"};

bool plain_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

void check_names(const TMSpec& tm) {
    for (const auto& q : tm.states) {
        if (!plain_name(q))
            throw CompileError("state name '" + q +
                               "' must use only letters, digits and '_'");
        for (const char* r : kReservedStates)
            if (q == r)
                throw CompileError("state name '" + q + "' is reserved");
        if (std::find(tm.alphabet.begin(), tm.alphabet.end(), q) !=
            tm.alphabet.end())
            throw CompileError("name '" + q +
                               "' is both a state and a tape symbol");
    }
    for (const auto& a : tm.alphabet) {
        if (!plain_name(a))
            throw CompileError("symbol '" + a +
                               "' must use only letters, digits and '_'");
        if (a == "T") throw CompileError("symbol name 'T' is reserved");
    }
}

// Shared by the deterministic and nondeterministic transition builders:
// at the end of a cycle every surviving tape object drops into its cell for
// the next time step.
void build_reset_rules(Emit& e) {
    for (int64_t j = 0; j + 1 <= e.p; ++j)
        for (int64_t i = 0; i <= e.p; ++i)
            for (int a = 0; a < e.m; ++a)
                e.uni(RuleKind::SendIn, e.cell(i, j + 1),
                      e.tape(a, i, j, e.m + 5), e.tape(a, i, j + 1, 0));
}

}  // namespace

void build_initial_rules(const TMSpec& tm, CompilerOutput& out) {
    Emit e(tm, out);
    for (int64_t i = 0; i <= e.p; ++i)
        for (int a = 0; a < e.m; ++a)
            e.uni(RuleKind::SendIn, e.cell(i, 0),
                  e.obj(InitTapeObj{a, static_cast<int32_t>(i)}),
                  e.tape(a, i, 0, 0));
    e.evo(e.skin(), e.obj(InitStateObj{tm.start}), {e.state(tm.start, 0, 0, 0)});
}

void build_scan_rules(const TMSpec& tm, CompilerOutput& out) {
    Emit e(tm, out);
    const int m = e.m;
    for (int64_t j = 0; j <= e.p; ++j) {
        for (int64_t i = 0; i <= e.p; ++i) {
            LabelId c = e.cell(i, j);
            for (int a = 0; a < m; ++a) {
                int f = tm.phi(a);
                for (int k = 0; k < f; ++k)
                    e.evo(c, e.tape(a, i, j, k), {e.tape(a, i, j, k + 1)});
                e.uni(RuleKind::Dissolution, c, e.tape(a, i, j, f),
                      e.tape(a, i, j, f + 1));
                for (int k = f + 1; k <= m; ++k)
                    e.evo(e.skin(), e.tape(a, i, j, k), {e.tape(a, i, j, k + 1)});
            }
            for (int q = 0; q < static_cast<int>(tm.states.size()); ++q) {
                e.uni(RuleKind::SendIn, c, e.state(q, i, j, 0),
                      e.state(q, i, j, 1));
                for (int k = 1; k <= m; ++k)
                    e.evo(c, e.state(q, i, j, k), {e.state(q, i, j, k + 1)});
                for (int k = 2; k <= m + 1; ++k)
                    e.evo(e.skin(), e.state(q, i, j, k),
                          {e.state_sym(q, i, j, k + 1, k - 2)});
                for (int a = 0; a < m; ++a)
                    for (int k = 1; k <= m + 1; ++k)
                        e.evo(e.skin(), e.state_sym(q, i, j, k, a),
                              {e.state_sym(q, i, j, k + 1, a)});
            }
        }
    }
}

void build_handoff_rules(const TMSpec& tm, CompilerOutput& out) {
    Emit e(tm, out);
    const int m = e.m;
    for (int64_t j = 0; j + 1 <= e.p; ++j) {
        for (int64_t i = 0; i <= e.p; ++i) {
            LabelId pr = e.prime(i, j);
            for (int a = 0; a < m; ++a) {
                e.uni(RuleKind::SendIn, pr, e.tape(a, i, j, m + 1),
                      e.tape(a, i, j, m + 2));
                e.evo(pr, e.tape(a, i, j, m + 2), {e.tape(a, i, j, m + 3)});
                e.evo(pr, e.tape(a, i, j, m + 3), {e.tape(a, i, j, m + 4)});
                e.uni(RuleKind::Dissolution, pr, e.tape(a, i, j, m + 4),
                      e.tape(a, i, j, m + 5));
                e.evo(e.skin(), e.tape(a, i, j, m + 4), {});
            }
            for (int q = 0; q < static_cast<int>(tm.states.size()); ++q)
                for (int a = 0; a < m; ++a) {
                    e.evo(e.skin(), e.state_sym(q, i, j, m + 1, a),
                          {e.state_sym(q, i, j, m + 2, a)});
                    e.uni(RuleKind::SendIn, pr, e.state_sym(q, i, j, m + 2, a),
                          e.state_sym(q, i, j, m + 3, a));
                    e.uni(RuleKind::Dissolution, pr,
                          e.state_sym(q, i, j, m + 3, a),
                          e.state_sym(q, i, j, m + 4, a));
                }
        }
    }
}

void build_transition_rules(const TMSpec& tm, CompilerOutput& out) {
    if (!tm.deterministic())
        throw CompileError(
            "deterministic transition builder used on a nondeterministic "
            "machine");
    Emit e(tm, out);
    const int m = e.m;
    for (int q = 0; q < static_cast<int>(tm.states.size()); ++q)
        for (int a = 0; a < m; ++a) {
            const auto& image = tm.delta[q][a];
            if (image.empty()) continue;
            const Transition& tr = image.front();
            for (int64_t j = 0; j + 1 <= e.p; ++j)
                for (int64_t i = 0; i <= e.p; ++i) {
                    e.evo(e.skin(), e.state_sym(q, i, j, m + 4, a),
                          {e.state_sym(q, i, j, m + 5, a),
                           e.tape(tr.write, i, j, m + 5)});
                    int64_t dest = i + tr.dir;
                    if (dest >= 0 && dest <= e.p)
                        e.evo(e.skin(), e.state_sym(q, i, j, m + 5, a),
                              {e.state(tr.next, dest, j + 1, 0)});
                }
        }
    build_reset_rules(e);
}

void build_nd_transition_rules(const TMSpec& tm, CompilerOutput& out) {
    Emit e(tm, out);
    const int m = e.m;
    for (int q = 0; q < static_cast<int>(tm.states.size()); ++q)
        for (int a = 0; a < m; ++a)
            for (const Transition& tr : tm.delta[q][a])
                for (int64_t j = 0; j + 1 <= e.p; ++j)
                    for (int64_t i = 0; i <= e.p; ++i) {
                        int64_t dest = i + tr.dir;
                        TransitionChoice choice{tr.next, tr.write,
                                                static_cast<int32_t>(dest)};
                        e.evo(e.skin(), e.state_sym(q, i, j, m + 4, a),
                              {e.state_choice(q, i, j, m + 5, choice),
                               e.tape(tr.write, i, j, m + 5)});
                        if (dest >= 0 && dest <= e.p)
                            e.evo(e.skin(),
                                  e.state_choice(q, i, j, m + 5, choice),
                                  {e.state(tr.next, dest, j + 1, 0)});
                    }
    build_reset_rules(e);
}

void build_halt_rules(const TMSpec& tm, CompilerOutput& out) {
    Emit e(tm, out);
    const int m = e.m;
    const int64_t cycle = m + 6;
    for (int q = 0; q < static_cast<int>(tm.states.size()); ++q)
        for (int a = 0; a < m; ++a) {
            if (!tm.delta[q][a].empty()) continue;
            bool acc = tm.accepting[static_cast<size_t>(q)];
            for (int64_t j = 0; j + 1 <= e.p; ++j)
                for (int64_t i = 0; i <= e.p; ++i)
                    e.evo(e.skin(), e.state_sym(q, i, j, m + 4, a),
                          {e.timer((e.p - j) * cycle + 4, acc)});
            // A machine that halts exactly at time step p never reaches the
            // handoff membranes; catch its state right after the scan.
            for (int64_t i = 0; i <= e.p; ++i)
                e.evo(e.skin(), e.state_sym(q, i, e.p, m + 2, a),
                      {e.timer(6, acc)});
        }
    for (bool acc : {false, true}) {
        for (int64_t c = 1; c <= e.p * cycle + 4; ++c)
            e.evo(e.skin(), e.timer(c, acc), {e.timer(c - 1, acc)});
        e.evo(e.skin(), e.timer(0, acc), {e.verdict(acc)});
        e.uni(RuleKind::SendOut, e.skin(), e.verdict(acc), e.verdict(acc));
    }
}

CompilerOutput build_family_member(const TMSpec& tm, int64_t n) {
    auto diags = validate_tm(tm);
    if (!diags.empty())
        throw CompileError("invalid machine: " + diags.front().code + ": " +
                           diags.front().detail);
    check_names(tm);
    if (n < 0) throw CompileError("negative input length");
    int64_t p = tm.p(n);
    if (p < n)
        throw CompileError("tape bound p(" + std::to_string(n) + ") = " +
                           std::to_string(p) + " cannot hold the input");
    if (p < 1) throw CompileError("tape bound must be at least 1");
    if (p > 2048)
        throw CompileError("tape bound " + std::to_string(p) +
                           " is too large to materialize");

    CompilerOutput out;
    out.system = std::make_shared<PSystem>();
    out.meta.p = p;
    out.meta.m = tm.m();
    out.meta.cycle = out.meta.m + 6;
    out.meta.t_end = Schedule{p, out.meta.m}.t_end();
    out.meta.n = n;

    PSystem& sys = *out.system;
    MembraneDecl root;
    bool first = true;
    for (const Label& l : build_labels(p)) {
        LabelId id = sys.labels().intern(l);
        sys.declare_label(id);
        if (first) {
            root.label = id;
            first = false;
        } else {
            root.children.push_back(MembraneDecl{id, {}});
        }
    }
    sys.set_structure(std::move(root));

    Emit e(tm, out);
    sys.set_input_membrane(e.skin());
    sys.add_initial(e.skin(), e.obj(InitStateObj{tm.start}));
    sys.add_initial(e.skin(), e.obj(InitTapeObj{0, 0}));
    for (int64_t i = n + 1; i <= p; ++i)
        sys.add_initial(e.skin(),
                        e.obj(InitTapeObj{0, static_cast<int32_t>(i)}));

    build_initial_rules(tm, out);
    build_scan_rules(tm, out);
    build_handoff_rules(tm, out);
    if (tm.deterministic())
        build_transition_rules(tm, out);
    else
        build_nd_transition_rules(tm, out);
    build_halt_rules(tm, out);

    out.meta.label_count = static_cast<int64_t>(sys.labels().size());
    out.meta.rule_count = static_cast<int64_t>(sys.rules().size());
    return out;
}

std::vector<PObject> encode_input(const TMSpec& tm,
                                  const std::vector<int>& input) {
    std::vector<PObject> out;
    for (size_t i = 0; i < input.size(); ++i) {
        int sym = input[i];
        if (sym <= 0 || sym >= tm.m())
            throw CompileError("input symbol at position " +
                               std::to_string(i + 1) +
                               " is blank or out of range");
        out.push_back(InitTapeObj{sym, static_cast<int32_t>(i + 1)});
    }
    return out;
}

Multiset input_multiset(const TMSpec& tm, CompilerOutput& out,
                        const std::vector<int>& input) {
    Multiset ms;
    Emit e(tm, out);
    for (const PObject& o : encode_input(tm, input)) ms.add(e.obj(o));
    return ms;
}

CompilerOutput assemble(const TMSpec& tm, const std::vector<int>& input) {
    CompilerOutput out = build_family_member(tm, static_cast<int64_t>(input.size()));
    Multiset ms = input_multiset(tm, out, input);
    LabelId skin = out.system->labels().intern(SkinLabel{});
    for (const auto& [id, count] : ms) out.system->add_initial(skin, id, count);
    return out;
}

}  // namespace psim
