#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "psim/multiset.hpp"
#include "psim/psystem.hpp"

namespace psim {

struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Membrane {
    LabelId label = 0;
    Multiset content;
    int parent = -1;  // -1 for the root
    std::vector<int> children;
    bool alive = true;
};

// A configuration is the rooted membrane tree plus the environment multiset.
// Membrane slots keep their indices for the lifetime of a run; dissolved
// membranes are marked dead rather than erased.
struct Configuration {
    std::vector<Membrane> mems;
    int root = 0;
    Multiset environment;

    static Configuration from_system(const PSystem& sys, const Multiset& input);

    int alive_count() const;
    int depth() const;  // edges from root to deepest alive membrane
    int64_t object_count() const;  // objects inside membranes (not environment)
    bool labels_unique() const;
    // First alive membrane with the label, -1 if none.
    int find_label(LabelId label) const;

    // Canonical serialization of the alive tree + environment. Children are
    // sorted, so structurally equal configurations compare equal regardless
    // of slot layout. Used for semantic equality and explore memoization.
    std::string canonical_key() const;
    bool operator==(const Configuration& other) const {
        return canonical_key() == other.canonical_key();
    }
};

}  // namespace psim
