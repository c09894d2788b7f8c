#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "psim/labels.hpp"
#include "psim/multiset.hpp"
#include "psim/objects.hpp"
#include "psim/rules.hpp"

namespace psim {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Interning pool. Object identity is the canonical spelling; payloads ride
// along for introspection and may be opaque for loaded systems.
class ObjectTable {
  public:
    ObjId intern(std::string spelling, PObject payload);
    ObjId intern(std::string spelling);  // opaque payload
    std::optional<ObjId> find(const std::string& spelling) const;
    const std::string& spelling(ObjId id) const { return spellings_.at(id); }
    const PObject& payload(ObjId id) const { return payloads_.at(id); }
    size_t size() const { return spellings_.size(); }

  private:
    std::vector<std::string> spellings_;
    std::vector<PObject> payloads_;
    std::unordered_map<std::string, ObjId> index_;
};

class LabelTable {
  public:
    LabelId intern(const Label& label);
    std::optional<LabelId> find(const std::string& spelling) const;
    const std::string& spelling(LabelId id) const { return spellings_.at(id); }
    const Label& label(LabelId id) const { return labels_.at(id); }
    size_t size() const { return labels_.size(); }

  private:
    std::vector<std::string> spellings_;
    std::vector<Label> labels_;
    std::unordered_map<std::string, LabelId> index_;
};

struct MembraneDecl {
    LabelId label = 0;
    std::vector<MembraneDecl> children;
};

struct Diagnostic {
    std::string code;
    std::string detail;
};

// A P system with active membranes and dissolution: label alphabet, membrane
// structure, initial multisets, rule set, and the designated input membrane.
// No division and no charges; labels are unique within the structure.
class PSystem {
  public:
    ObjectTable& objects() { return objects_; }
    const ObjectTable& objects() const { return objects_; }
    LabelTable& labels() { return labels_; }
    const LabelTable& labels() const { return labels_; }

    void declare_label(LabelId id);
    const std::vector<LabelId>& declared_labels() const { return declared_; }

    void set_structure(MembraneDecl root) { structure_ = std::move(root); }
    const MembraneDecl& structure() const { return structure_; }

    void add_initial(LabelId membrane, ObjId obj, int64_t n = 1);
    const std::map<LabelId, Multiset>& initial() const { return initial_; }

    // Deduplicates: adding an identical rule again returns the existing id.
    RuleId add_rule(Rule rule);
    const std::vector<Rule>& rules() const { return rules_; }

    void set_input_membrane(LabelId id) { input_membrane_ = id; }
    LabelId input_membrane() const { return input_membrane_; }

    // Structural well-formedness: unique labels in the structure, rule labels
    // declared, no dissolution scoped to the skin, input membrane present.
    std::vector<Diagnostic> validate() const;

    std::string dump() const;  // canonical JSON document, byte-stable
    static PSystem load(const std::string& json_text);

  private:
    ObjectTable objects_;
    LabelTable labels_;
    std::vector<LabelId> declared_;
    MembraneDecl structure_;
    std::map<LabelId, Multiset> initial_;
    std::vector<Rule> rules_;
    std::unordered_map<std::string, RuleId> rule_index_;  // dedup by encoding
    LabelId input_membrane_ = 0;
};

}  // namespace psim
