#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace psim {

// Membrane labels. Skin is spelled "0", working membranes "(i,j)", handoff
// membranes "(i,j)'". Opaque labels are for engine-level systems.

struct SkinLabel {
    auto operator<=>(const SkinLabel&) const = default;
};

struct CellLabel {
    int32_t i = 0;
    int32_t j = 0;
    auto operator<=>(const CellLabel&) const = default;
};

struct PrimeLabel {
    int32_t i = 0;
    int32_t j = 0;
    auto operator<=>(const PrimeLabel&) const = default;
};

struct OpaqueLabel {
    std::string name;
    auto operator<=>(const OpaqueLabel&) const = default;
};

using Label = std::variant<SkinLabel, CellLabel, PrimeLabel, OpaqueLabel>;

std::string spell(const Label& label);

// Total order used wherever a canonical label order is needed (assignment
// enumeration, dumps): Skin < Cell < Prime < Opaque, Cell/Prime by (i,j),
// Opaque by name.
bool label_less(const Label& a, const Label& b);

}  // namespace psim
