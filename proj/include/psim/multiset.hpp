#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace psim {

using ObjId = uint32_t;

struct MultisetUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Multiset over interned object ids. Counts are always positive; removing
// more than is present is an error, never a clamp.
class Multiset {
  public:
    Multiset() = default;

    int64_t count(ObjId id) const;
    bool contains(ObjId id) const { return count(id) > 0; }

    void add(ObjId id, int64_t n = 1);
    void remove(ObjId id, int64_t n = 1);  // throws MultisetUnderflow

    Multiset& operator+=(const Multiset& other);
    Multiset& operator-=(const Multiset& other);  // exact; throws on underflow

    int64_t size() const;  // total multiplicity
    size_t distinct() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    void clear() { items_.clear(); }

    // Sorted by object id; stable, deterministic iteration.
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    bool operator==(const Multiset& other) const = default;

  private:
    std::vector<std::pair<ObjId, int64_t>> items_;  // sorted by id, counts > 0
};

}  // namespace psim
