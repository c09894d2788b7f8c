#include "psim/labels.hpp"

namespace psim {

std::string spell(const Label& label) {
    struct Visitor {
        std::string operator()(const SkinLabel&) const { return "0"; }
        std::string operator()(const CellLabel& l) const {
            return "(" + std::to_string(l.i) + "," + std::to_string(l.j) + ")";
        }
        std::string operator()(const PrimeLabel& l) const {
            return "(" + std::to_string(l.i) + "," + std::to_string(l.j) +
                   ")'";
        }
        std::string operator()(const OpaqueLabel& l) const { return l.name; }
    };
    return std::visit(Visitor{}, label);
}

bool label_less(const Label& a, const Label& b) {
    if (a.index() != b.index()) return a.index() < b.index();
    return std::visit(
        [&](const auto& lhs) {
            using T = std::decay_t<decltype(lhs)>;
            return lhs < std::get<T>(b);
        },
        a);
}

}  // namespace psim
