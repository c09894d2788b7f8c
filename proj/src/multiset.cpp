#include "psim/multiset.hpp"

#include <algorithm>

namespace psim {

namespace {

template <class Items>
auto locate(Items& items, ObjId id) {
    return std::lower_bound(
        items.begin(), items.end(), id,
        [](const auto& item, ObjId key) { return item.first < key; });
}

}  // namespace

int64_t Multiset::count(ObjId id) const {
    auto it = locate(items_, id);
    return (it != items_.end() && it->first == id) ? it->second : 0;
}

void Multiset::add(ObjId id, int64_t n) {
    if (n == 0) return;
    if (n < 0) throw MultisetUnderflow("multiset: negative addition");
    auto it = locate(items_, id);
    if (it != items_.end() && it->first == id) {
        it->second += n;
    } else {
        items_.insert(it, {id, n});
    }
}

void Multiset::remove(ObjId id, int64_t n) {
    if (n == 0) return;
    if (n < 0) throw MultisetUnderflow("multiset: negative removal");
    auto it = locate(items_, id);
    if (it == items_.end() || it->first != id || it->second < n)
        throw MultisetUnderflow("multiset: removing more than present");
    it->second -= n;
    if (it->second == 0) items_.erase(it);
}

Multiset& Multiset::operator+=(const Multiset& other) {
    for (const auto& [id, n] : other) add(id, n);
    return *this;
}

Multiset& Multiset::operator-=(const Multiset& other) {
    for (const auto& [id, n] : other) remove(id, n);
    return *this;
}

int64_t Multiset::size() const {
    int64_t total = 0;
    for (const auto& [id, n] : items_) total += n;
    return total;
}

}  // namespace psim
