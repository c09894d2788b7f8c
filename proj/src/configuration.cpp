#include "psim/configuration.hpp"

#include <algorithm>
#include <functional>

namespace psim {

namespace {

int build(const MembraneDecl& decl, int parent, std::vector<Membrane>& mems) {
    int idx = static_cast<int>(mems.size());
    mems.push_back(Membrane{decl.label, {}, parent, {}, true});
    for (const auto& child : decl.children) {
        int c = build(child, idx, mems);
        mems[idx].children.push_back(c);
    }
    return idx;
}

}  // namespace

Configuration Configuration::from_system(const PSystem& sys,
                                         const Multiset& input) {
    Configuration cfg;
    cfg.root = build(sys.structure(), -1, cfg.mems);
    for (const auto& [label, ms] : sys.initial()) {
        int idx = cfg.find_label(label);
        if (idx < 0)
            throw EngineError(
                "initial contents target label not present in structure: " +
                sys.labels().spelling(label));
        cfg.mems[idx].content += ms;
    }
    if (!input.empty()) {
        int idx = cfg.find_label(sys.input_membrane());
        if (idx < 0)
            throw EngineError(
                "input membrane not present in structure");
        cfg.mems[idx].content += input;
    }
    return cfg;
}

int Configuration::alive_count() const {
    int n = 0;
    for (const auto& m : mems) n += m.alive ? 1 : 0;
    return n;
}

int Configuration::depth() const {
    std::function<int(int)> go = [&](int idx) {
        int best = 0;
        for (int c : mems[idx].children)
            if (mems[c].alive) best = std::max(best, 1 + go(c));
        return best;
    };
    return go(root);
}

int64_t Configuration::object_count() const {
    int64_t n = 0;
    for (const auto& m : mems)
        if (m.alive) n += m.content.size();
    return n;
}

bool Configuration::labels_unique() const {
    std::vector<LabelId> labels;
    for (const auto& m : mems)
        if (m.alive) labels.push_back(m.label);
    std::sort(labels.begin(), labels.end());
    return std::adjacent_find(labels.begin(), labels.end()) == labels.end();
}

int Configuration::find_label(LabelId label) const {
    for (size_t i = 0; i < mems.size(); ++i)
        if (mems[i].alive && mems[i].label == label)
            return static_cast<int>(i);
    return -1;
}

std::string Configuration::canonical_key() const {
    std::function<std::string(int)> go = [&](int idx) -> std::string {
        const Membrane& m = mems[idx];
        std::string s = "{" + std::to_string(m.label) + "|";
        for (const auto& [id, n] : m.content)
            s += std::to_string(id) + ":" + std::to_string(n) + ",";
        std::vector<std::string> kids;
        for (int c : m.children)
            if (mems[c].alive) kids.push_back(go(c));
        std::sort(kids.begin(), kids.end());
        for (const auto& k : kids) s += k;
        return s + "}";
    };
    std::string s = go(root);
    s += "env:";
    for (const auto& [id, n] : environment)
        s += std::to_string(id) + ":" + std::to_string(n) + ",";
    return s;
}

}  // namespace psim
