#include "psim/psystem.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"

namespace psim {

using ordered_json = nlohmann::ordered_json;

ObjId ObjectTable::intern(std::string spelling, PObject payload) {
    auto it = index_.find(spelling);
    if (it != index_.end()) return it->second;
    ObjId id = static_cast<ObjId>(spellings_.size());
    index_.emplace(spelling, id);
    spellings_.push_back(std::move(spelling));
    payloads_.push_back(std::move(payload));
    return id;
}

ObjId ObjectTable::intern(std::string spelling) {
    OpaqueObj payload{spelling};
    return intern(std::move(spelling), PObject{std::move(payload)});
}

std::optional<ObjId> ObjectTable::find(const std::string& spelling) const {
    auto it = index_.find(spelling);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

LabelId LabelTable::intern(const Label& label) {
    std::string s = spell(label);
    auto it = index_.find(s);
    if (it != index_.end()) return it->second;
    LabelId id = static_cast<LabelId>(labels_.size());
    index_.emplace(s, id);
    spellings_.push_back(std::move(s));
    labels_.push_back(label);
    return id;
}

std::optional<LabelId> LabelTable::find(const std::string& spelling) const {
    auto it = index_.find(spelling);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void PSystem::declare_label(LabelId id) {
    if (std::find(declared_.begin(), declared_.end(), id) == declared_.end())
        declared_.push_back(id);
}

void PSystem::add_initial(LabelId membrane, ObjId obj, int64_t n) {
    initial_[membrane].add(obj, n);
}

namespace {

std::string encode_rule(const Rule& r) {
    std::ostringstream os;
    os << static_cast<int>(r.kind) << '|' << r.label << '|' << r.lhs << '|';
    if (r.kind == RuleKind::Evolution) {
        for (const auto& [id, n] : r.rhs) os << id << ':' << n << ',';
    } else {
        os << r.rhs_obj;
    }
    return os.str();
}

}  // namespace

RuleId PSystem::add_rule(Rule rule) {
    std::string key = encode_rule(rule);
    auto it = rule_index_.find(key);
    if (it != rule_index_.end()) return it->second;
    RuleId id = static_cast<RuleId>(rules_.size());
    rule_index_.emplace(std::move(key), id);
    rules_.push_back(std::move(rule));
    return id;
}

namespace {

void collect_structure(const MembraneDecl& node,
                       std::vector<LabelId>& seen) {
    seen.push_back(node.label);
    for (const auto& child : node.children) collect_structure(child, seen);
}

}  // namespace

std::vector<Diagnostic> PSystem::validate() const {
    std::vector<Diagnostic> diags;
    std::vector<LabelId> in_structure;
    collect_structure(structure_, in_structure);

    std::set<LabelId> seen;
    for (LabelId id : in_structure) {
        if (!seen.insert(id).second)
            diags.push_back({"duplicate-label",
                             "label " + labels_.spelling(id) +
                                 " attached to more than one membrane"});
    }

    std::set<LabelId> declared(declared_.begin(), declared_.end());
    for (LabelId id : in_structure) {
        if (!declared.count(id))
            diags.push_back({"undeclared-label",
                             "structure uses label " + labels_.spelling(id) +
                                 " outside the label alphabet"});
    }

    for (size_t i = 0; i < rules_.size(); ++i) {
        const Rule& r = rules_[i];
        if (!declared.count(r.label))
            diags.push_back({"dangling-rule-label",
                             "rule " + std::to_string(i) + " scoped to " +
                                 labels_.spelling(r.label) +
                                 " which is not in the label alphabet"});
        if (r.kind == RuleKind::Dissolution && r.label == structure_.label)
            diags.push_back({"skin-dissolution",
                             "rule " + std::to_string(i) +
                                 " dissolves the outermost membrane"});
    }

    if (!seen.count(input_membrane_))
        diags.push_back({"input-membrane-missing",
                         "input membrane " + labels_.spelling(input_membrane_) +
                             " does not occur in the structure"});
    return diags;
}

namespace {

ordered_json pairs_json(const Multiset& ms, const ObjectTable& objects) {
    std::vector<std::pair<std::string, int64_t>> pairs;
    for (const auto& [id, n] : ms) pairs.emplace_back(objects.spelling(id), n);
    std::sort(pairs.begin(), pairs.end());
    ordered_json out = ordered_json::array();
    for (const auto& [s, n] : pairs) out.push_back(ordered_json::array({s, n}));
    return out;
}

ordered_json structure_json(const MembraneDecl& node, const LabelTable& labels) {
    std::vector<const MembraneDecl*> kids;
    for (const auto& c : node.children) kids.push_back(&c);
    std::sort(kids.begin(), kids.end(),
              [&](const MembraneDecl* a, const MembraneDecl* b) {
                  return label_less(labels.label(a->label),
                                    labels.label(b->label));
              });
    ordered_json children = ordered_json::array();
    for (const auto* c : kids) children.push_back(structure_json(*c, labels));
    return ordered_json::array({labels.spelling(node.label), children});
}

const char* kind_name(RuleKind k) {
    switch (k) {
        case RuleKind::Evolution: return "evolution";
        case RuleKind::SendIn: return "send-in";
        case RuleKind::SendOut: return "send-out";
        case RuleKind::Dissolution: return "dissolution";
    }
    return "?";
}

RuleKind kind_from_name(const std::string& s) {
    if (s == "evolution") return RuleKind::Evolution;
    if (s == "send-in") return RuleKind::SendIn;
    if (s == "send-out") return RuleKind::SendOut;
    if (s == "dissolution") return RuleKind::Dissolution;
    throw ParseError("unknown rule kind: " + s);
}

}  // namespace

std::string PSystem::dump() const {
    ordered_json doc;

    // Alphabet: every object mentioned by the initial contents or a rule.
    std::set<std::string> alphabet;
    for (const auto& [label, ms] : initial_)
        for (const auto& [id, n] : ms) alphabet.insert(objects_.spelling(id));
    for (const Rule& r : rules_) {
        alphabet.insert(objects_.spelling(r.lhs));
        if (r.kind == RuleKind::Evolution) {
            for (const auto& [id, n] : r.rhs)
                alphabet.insert(objects_.spelling(id));
        } else {
            alphabet.insert(objects_.spelling(r.rhs_obj));
        }
    }
    doc["alphabet"] = alphabet;

    std::vector<LabelId> sorted_labels = declared_;
    std::sort(sorted_labels.begin(), sorted_labels.end(),
              [&](LabelId a, LabelId b) {
                  return label_less(labels_.label(a), labels_.label(b));
              });
    ordered_json labels = ordered_json::array();
    for (LabelId id : sorted_labels) labels.push_back(labels_.spelling(id));
    doc["labels"] = labels;

    doc["structure"] = structure_json(structure_, labels_);

    ordered_json initial = ordered_json::object();
    std::vector<LabelId> init_labels;
    for (const auto& [label, ms] : initial_)
        if (!ms.empty()) init_labels.push_back(label);
    std::sort(init_labels.begin(), init_labels.end(),
              [&](LabelId a, LabelId b) {
                  return label_less(labels_.label(a), labels_.label(b));
              });
    for (LabelId label : init_labels)
        initial[labels_.spelling(label)] =
            pairs_json(initial_.at(label), objects_);
    doc["initial"] = initial;

    ordered_json rules = ordered_json::array();
    for (const Rule& r : rules_) {
        ordered_json jr;
        jr["kind"] = kind_name(r.kind);
        jr["label"] = labels_.spelling(r.label);
        jr["lhs"] = objects_.spelling(r.lhs);
        if (r.kind == RuleKind::Evolution) {
            jr["rhs"] = pairs_json(r.rhs, objects_);
        } else {
            jr["rhs"] = objects_.spelling(r.rhs_obj);
        }
        rules.push_back(std::move(jr));
    }
    doc["rules"] = rules;

    doc["input_membrane"] = labels_.spelling(input_membrane_);
    return doc.dump(1);
}

namespace {

Label label_from_spelling(const std::string& s) {
    if (s == "0") return SkinLabel{};
    if (s.size() >= 5 && s.front() == '(') {
        bool prime = s.back() == '\'';
        std::string body = prime ? s.substr(0, s.size() - 1) : s;
        if (body.back() == ')') {
            auto comma = body.find(',');
            if (comma != std::string::npos) {
                try {
                    int i = std::stoi(body.substr(1, comma - 1));
                    int j = std::stoi(
                        body.substr(comma + 1, body.size() - comma - 2));
                    if (prime) return PrimeLabel{i, j};
                    return CellLabel{i, j};
                } catch (const std::exception&) {
                    // fall through to opaque
                }
            }
        }
    }
    return OpaqueLabel{s};
}

MembraneDecl structure_from_json(const ordered_json& node, LabelTable& labels) {
    if (!node.is_array() || node.size() != 2 || !node[0].is_string() ||
        !node[1].is_array())
        throw ParseError("structure nodes must be [label, [children...]]");
    MembraneDecl decl;
    decl.label =
        labels.intern(label_from_spelling(node[0].get<std::string>()));
    for (const auto& child : node[1])
        decl.children.push_back(structure_from_json(child, labels));
    return decl;
}

}  // namespace

PSystem PSystem::load(const std::string& json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("system document is not valid JSON: ") +
                         e.what());
    }

    PSystem sys;
    try {
        for (const auto& s : doc.at("alphabet"))
            sys.objects_.intern(s.get<std::string>());
        for (const auto& s : doc.at("labels")) {
            LabelId id = sys.labels_.intern(
                label_from_spelling(s.get<std::string>()));
            sys.declare_label(id);
        }
        sys.structure_ = structure_from_json(doc.at("structure"), sys.labels_);
        for (const auto& [key, pairs] : doc.at("initial").items()) {
            LabelId label = sys.labels_.intern(label_from_spelling(key));
            for (const auto& pair : pairs)
                sys.add_initial(label,
                                sys.objects_.intern(pair.at(0).get<std::string>()),
                                pair.at(1).get<int64_t>());
        }
        for (const auto& jr : doc.at("rules")) {
            Rule r;
            r.kind = kind_from_name(jr.at("kind").get<std::string>());
            r.label = sys.labels_.intern(
                label_from_spelling(jr.at("label").get<std::string>()));
            r.lhs = sys.objects_.intern(jr.at("lhs").get<std::string>());
            if (r.kind == RuleKind::Evolution) {
                for (const auto& pair : jr.at("rhs"))
                    r.rhs.add(sys.objects_.intern(pair.at(0).get<std::string>()),
                              pair.at(1).get<int64_t>());
            } else {
                r.rhs_obj =
                    sys.objects_.intern(jr.at("rhs").get<std::string>());
            }
            sys.add_rule(std::move(r));
        }
        sys.input_membrane_ = sys.labels_.intern(
            label_from_spelling(doc.at("input_membrane").get<std::string>()));
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(std::string("malformed system document: ") + e.what());
    }
    return sys;
}

bool is_blocking(RuleKind k) { return k != RuleKind::Evolution; }

}  // namespace psim
