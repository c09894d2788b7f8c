#include "psim/tm.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

namespace psim {

int64_t TMSpec::p(int64_t n) const {
    int64_t v = 0;
    for (int64_t c : poly) v = v * n + c;
    return v;
}

bool TMSpec::deterministic() const {
    for (const auto& row : delta)
        for (const auto& image : row)
            if (image.size() > 1) return false;
    return true;
}

namespace {

struct Cursor {
    int line = 0;
    int col = 0;
};

[[noreturn]] void fail(const Cursor& at, const std::string& msg) {
    throw ParseError("line " + std::to_string(at.line) + ", column " +
                     std::to_string(at.col) + ": " + msg);
}

struct Token {
    std::string text;
    int col = 0;
};

std::vector<Token> tokenize(const std::string& body, int col0) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < body.size()) {
        while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
        size_t start = i;
        while (i < body.size() && !std::isspace(static_cast<unsigned char>(body[i]))) ++i;
        if (i > start)
            out.push_back({body.substr(start, i - start),
                           col0 + static_cast<int>(start)});
    }
    return out;
}

int find_name(const std::vector<std::string>& names, const std::string& s) {
    auto it = std::find(names.begin(), names.end(), s);
    return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

}  // namespace

TMSpec parse_tm(const std::string& text) {
    TMSpec tm;
    bool saw_states = false, saw_alphabet = false, saw_start = false,
         saw_accept = false, saw_poly = false;
    std::string start_name;
    std::vector<std::pair<Token, int>> accept_tokens;  // token, line
    struct DeltaLine {
        std::vector<Token> tokens;
        int line;
    };
    std::vector<DeltaLine> delta_lines;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    Cursor start_at;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        size_t colon = line.find(':');
        if (colon == std::string::npos)
            fail({line_no, static_cast<int>(first) + 1},
                 "expected 'key: ...' directive");
        std::string key = line.substr(first, colon - first);
        while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back())))
            key.pop_back();
        std::string body = line.substr(colon + 1);
        std::vector<Token> tokens = tokenize(body, static_cast<int>(colon) + 2);
        Cursor key_at{line_no, static_cast<int>(first) + 1};

        if (key == "states") {
            if (saw_states) fail(key_at, "duplicate 'states:' directive");
            saw_states = true;
            if (tokens.empty()) fail(key_at, "no states listed");
            for (const Token& t : tokens) {
                if (find_name(tm.states, t.text) >= 0)
                    fail({line_no, t.col}, "duplicate state '" + t.text + "'");
                tm.states.push_back(t.text);
            }
        } else if (key == "alphabet") {
            if (saw_alphabet) fail(key_at, "duplicate 'alphabet:' directive");
            saw_alphabet = true;
            if (tokens.empty()) fail(key_at, "no symbols listed");
            for (const Token& t : tokens) {
                if (t.text.size() != 1)
                    fail({line_no, t.col},
                         "symbol '" + t.text + "' must be a single character");
                if (find_name(tm.alphabet, t.text) >= 0)
                    fail({line_no, t.col}, "duplicate symbol '" + t.text + "'");
                tm.alphabet.push_back(t.text);
            }
        } else if (key == "start") {
            if (saw_start) fail(key_at, "duplicate 'start:' directive");
            saw_start = true;
            if (tokens.size() != 1) fail(key_at, "expected one start state");
            start_name = tokens[0].text;
            start_at = {line_no, tokens[0].col};
        } else if (key == "accept") {
            if (saw_accept) fail(key_at, "duplicate 'accept:' directive");
            saw_accept = true;
            for (const Token& t : tokens) accept_tokens.push_back({t, line_no});
        } else if (key == "poly") {
            if (saw_poly) fail(key_at, "duplicate 'poly:' directive");
            saw_poly = true;
            if (tokens.empty()) fail(key_at, "no coefficients listed");
            for (const Token& t : tokens) {
                try {
                    size_t used = 0;
                    int64_t c = std::stoll(t.text, &used);
                    if (used != t.text.size()) throw std::invalid_argument("");
                    tm.poly.push_back(c);
                } catch (const std::exception&) {
                    fail({line_no, t.col},
                         "coefficient '" + t.text + "' is not an integer");
                }
            }
        } else if (key == "delta") {
            delta_lines.push_back({tokens, line_no});
        } else {
            fail(key_at, "unknown directive '" + key + ":'");
        }
    }

    Cursor eof{line_no, 1};
    if (!saw_states) fail(eof, "missing 'states:' directive");
    if (!saw_alphabet) fail(eof, "missing 'alphabet:' directive");
    if (!saw_start) fail(eof, "missing 'start:' directive");
    if (!saw_poly) fail(eof, "missing 'poly:' directive");

    tm.start = find_name(tm.states, start_name);
    if (tm.start < 0) fail(start_at, "unknown start state '" + start_name + "'");
    tm.accepting.assign(tm.states.size(), false);
    for (const auto& [t, line] : accept_tokens) {
        int q = find_name(tm.states, t.text);
        if (q < 0) fail({line, t.col}, "unknown accepting state '" + t.text + "'");
        tm.accepting[q] = true;
    }

    tm.delta.assign(tm.states.size(),
                    std::vector<std::vector<Transition>>(tm.alphabet.size()));
    for (const auto& dl : delta_lines) {
        const auto& t = dl.tokens;
        if (t.size() != 6 || t[2].text != "->")
            fail({dl.line, t.empty() ? 1 : t[0].col},
                 "expected 'delta: <state> <symbol> -> <state> <symbol> <R|L>'");
        int q = find_name(tm.states, t[0].text);
        if (q < 0) fail({dl.line, t[0].col}, "unknown state '" + t[0].text + "'");
        int a = find_name(tm.alphabet, t[1].text);
        if (a < 0) fail({dl.line, t[1].col}, "unknown symbol '" + t[1].text + "'");
        int r = find_name(tm.states, t[3].text);
        if (r < 0) fail({dl.line, t[3].col}, "unknown state '" + t[3].text + "'");
        int b = find_name(tm.alphabet, t[4].text);
        if (b < 0) fail({dl.line, t[4].col}, "unknown symbol '" + t[4].text + "'");
        int dir;
        if (t[5].text == "R") dir = +1;
        else if (t[5].text == "L") dir = -1;
        else fail({dl.line, t[5].col}, "direction must be R or L");
        Transition tr{r, b, dir};
        auto& image = tm.delta[q][a];
        if (std::find(image.begin(), image.end(), tr) == image.end())
            image.push_back(tr);
    }
    return tm;
}

TMSpec parse_tm_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open machine file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_tm(buf.str());
}

std::vector<Diagnostic> validate_tm(const TMSpec& tm) {
    std::vector<Diagnostic> diags;
    auto add = [&](const std::string& code, const std::string& detail) {
        diags.push_back({code, detail});
    };
    if (tm.states.empty()) add("no-states", "machine has no states");
    if (tm.alphabet.empty()) add("no-alphabet", "machine has no symbols");
    for (const auto& s : tm.alphabet)
        if (s.size() != 1)
            add("multichar-symbol", "symbol '" + s + "' is not a single character");
    auto dup = [&](const std::vector<std::string>& names, const char* what) {
        for (size_t i = 0; i < names.size(); ++i)
            for (size_t k = i + 1; k < names.size(); ++k)
                if (names[i] == names[k])
                    add("duplicate-name",
                        std::string(what) + " '" + names[i] + "' declared twice");
    };
    dup(tm.states, "state");
    dup(tm.alphabet, "symbol");
    if (tm.start < 0 || tm.start >= static_cast<int>(tm.states.size()))
        add("bad-start", "start state index out of range");
    if (tm.accepting.size() != tm.states.size())
        add("bad-accepting", "accepting flags not aligned with states");
    if (tm.delta.size() != tm.states.size())
        add("bad-delta", "transition table rows not aligned with states");
    for (size_t q = 0; q < tm.delta.size(); ++q) {
        if (tm.delta[q].size() != tm.alphabet.size()) {
            add("bad-delta", "transition table columns not aligned with alphabet");
            continue;
        }
        for (size_t a = 0; a < tm.delta[q].size(); ++a)
            for (const Transition& tr : tm.delta[q][a]) {
                if (tr.next < 0 || tr.next >= static_cast<int>(tm.states.size()))
                    add("bad-transition", "successor state out of range");
                if (tr.write < 0 || tr.write >= static_cast<int>(tm.alphabet.size()))
                    add("bad-transition", "written symbol out of range");
                if (tr.dir != -1 && tr.dir != 1)
                    add("bad-transition", "direction must be -1 or +1");
            }
    }
    if (tm.poly.empty()) {
        add("no-poly", "no tape bound polynomial");
    } else {
        for (int64_t c : tm.poly)
            if (c < 0) add("negative-coefficient",
                           "polynomial coefficients must be non-negative");
        bool grows = false;
        for (size_t t = 0; t + 1 < tm.poly.size(); ++t)
            if (tm.poly[t] >= 1) grows = true;
        if (!grows)
            add("tape-too-small",
                "p(n) < n for large n: some coefficient of degree >= 1 must be positive");
    }
    return diags;
}

std::vector<int> parse_input(const TMSpec& tm, const std::string& input) {
    std::vector<int> out;
    for (size_t i = 0; i < input.size(); ++i) {
        std::string s(1, input[i]);
        int sym = find_name(tm.alphabet, s);
        if (sym < 0)
            throw ParseError("input column " + std::to_string(i + 1) +
                             ": unknown symbol '" + s + "'");
        if (sym == 0)
            throw ParseError("input column " + std::to_string(i + 1) +
                             ": the blank symbol cannot appear in the input");
        out.push_back(sym);
    }
    return out;
}

TMConfig initial_tm_config(const TMSpec& tm, const std::vector<int>& input) {
    int64_t n = static_cast<int64_t>(input.size());
    int64_t p = tm.p(n);
    if (p < n)
        throw TMStepError("tape bound p(" + std::to_string(n) + ") = " +
                          std::to_string(p) + " cannot hold the input");
    TMConfig c;
    c.tape.assign(static_cast<size_t>(p) + 1, 0);
    for (int64_t i = 0; i < n; ++i) c.tape[static_cast<size_t>(i) + 1] = input[i];
    c.head = 0;
    c.state = tm.start;
    c.step = 0;
    return c;
}

bool tm_halted(const TMSpec& tm, const TMConfig& c) {
    return tm.delta[c.state][c.tape[static_cast<size_t>(c.head)]].empty();
}

TMConfig tm_step(const TMSpec& tm, const TMConfig& c, int choice) {
    const auto& image = tm.delta[c.state][c.tape[static_cast<size_t>(c.head)]];
    if (image.empty()) throw TMStepError("machine is halted");
    if (image.size() > 1 && choice < 0)
        throw TMStepError("nondeterministic step needs an explicit choice");
    if (choice < 0) choice = 0;
    if (choice >= static_cast<int>(image.size()))
        throw TMStepError("choice index out of range");
    const Transition& tr = image[static_cast<size_t>(choice)];
    TMConfig next = c;
    next.tape[static_cast<size_t>(c.head)] = tr.write;
    next.head = c.head + tr.dir;
    next.state = tr.next;
    next.step = c.step + 1;
    if (next.head < 0 || next.head >= static_cast<int64_t>(next.tape.size()))
        throw TMStepError("head out of bounds");
    return next;
}

TMRunResult tm_run(const TMSpec& tm, const std::vector<int>& input) {
    if (!tm.deterministic())
        throw TMStepError("tm_run requires a deterministic machine");
    int64_t p = tm.p(static_cast<int64_t>(input.size()));
    TMRunResult res;
    TMConfig c = initial_tm_config(tm, input);
    res.trace.push_back(c);
    while (!tm_halted(tm, c)) {
        if (c.step >= p) {
            res.time_violation = true;
            return res;
        }
        try {
            c = tm_step(tm, c);
        } catch (const TMStepError&) {
            res.head_violation = true;
            return res;
        }
        res.trace.push_back(c);
    }
    res.halted = true;
    res.accepted = tm.accepting[static_cast<size_t>(c.state)];
    return res;
}

NTMRunResult tm_run_nd(const TMSpec& tm, const std::vector<int>& input,
                       uint64_t branch_bound) {
    NTMRunResult res;
    int64_t p = tm.p(static_cast<int64_t>(input.size()));

    std::function<void(const TMConfig&)> dfs = [&](const TMConfig& c) {
        if (res.partial || res.head_violation) return;
        if (tm_halted(tm, c)) {
            res.branches += 1;
            if (tm.accepting[static_cast<size_t>(c.state)]) {
                res.accepted = true;
                res.accepting_branches += 1;
            }
            if (branch_bound && res.branches > branch_bound) res.partial = true;
            return;
        }
        if (c.step >= p) {
            res.time_violation = true;
            res.all_halted = false;
            return;
        }
        int k = static_cast<int>(
            tm.delta[c.state][c.tape[static_cast<size_t>(c.head)]].size());
        for (int choice = 0; choice < k; ++choice) {
            TMConfig next;
            try {
                next = tm_step(tm, c, choice);
            } catch (const TMStepError&) {
                res.head_violation = true;
                res.all_halted = false;
                return;
            }
            dfs(next);
            if (res.partial || res.head_violation) return;
        }
    };

    dfs(initial_tm_config(tm, input));
    return res;
}

std::string TMSpec::format() const {
    std::ostringstream os;
    os << "states:";
    for (const auto& s : states) os << ' ' << s;
    os << "\nalphabet:";
    for (const auto& s : alphabet) os << ' ' << s;
    os << "\nstart: " << states[static_cast<size_t>(start)];
    os << "\naccept:";
    for (size_t q = 0; q < states.size(); ++q)
        if (accepting[q]) os << ' ' << states[q];
    os << "\npoly:";
    for (int64_t c : poly) os << ' ' << c;
    os << '\n';
    for (size_t q = 0; q < delta.size(); ++q)
        for (size_t a = 0; a < delta[q].size(); ++a)
            for (const Transition& tr : delta[q][a])
                os << "delta: " << states[q] << ' ' << alphabet[a] << " -> "
                   << states[static_cast<size_t>(tr.next)] << ' '
                   << alphabet[static_cast<size_t>(tr.write)] << ' '
                   << (tr.dir > 0 ? 'R' : 'L') << '\n';
    return os.str();
}

std::string render_tape(const TMSpec& tm, const TMConfig& c) {
    std::string out;
    for (size_t i = 0; i < c.tape.size(); ++i) {
        bool head = static_cast<int64_t>(i) == c.head;
        if (head) out += '[';
        out += tm.alphabet[static_cast<size_t>(c.tape[i])];
        if (head) out += ']';
    }
    return out;
}

}  // namespace psim
