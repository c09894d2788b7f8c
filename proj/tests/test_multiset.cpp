#include "doctest.h"
#include "psim/multiset.hpp"

using namespace psim;

TEST_CASE("multiset add, remove and counts") {
    Multiset ms;
    CHECK(ms.empty());
    ms.add(5, 2);
    ms.add(3);
    ms.add(5);
    CHECK(ms.count(5) == 3);
    CHECK(ms.count(3) == 1);
    CHECK(ms.count(99) == 0);
    CHECK(ms.size() == 4);
    CHECK(ms.distinct() == 2);
    ms.remove(5, 3);
    CHECK(ms.count(5) == 0);
    CHECK(ms.distinct() == 1);
}

TEST_CASE("multiset underflow is an error, not a clamp") {
    Multiset ms;
    ms.add(1);
    CHECK_THROWS_AS(ms.remove(1, 2), MultisetUnderflow);
    CHECK_THROWS_AS(ms.remove(2), MultisetUnderflow);
    CHECK(ms.count(1) == 1);  // failed removal left it alone
}

TEST_CASE("multiset iteration is sorted by id") {
    Multiset ms;
    ms.add(9);
    ms.add(1);
    ms.add(4, 2);
    std::vector<ObjId> seen;
    for (const auto& [id, n] : ms) {
        CHECK(n > 0);
        seen.push_back(id);
    }
    CHECK(seen == std::vector<ObjId>{1, 4, 9});
}

TEST_CASE("multiset sum and exact difference") {
    Multiset a, b;
    a.add(1, 2);
    a.add(2);
    b.add(1);
    b.add(3);
    a += b;
    CHECK(a.count(1) == 3);
    CHECK(a.count(3) == 1);
    a -= b;
    CHECK(a.count(1) == 2);
    CHECK(a.count(3) == 0);
    Multiset too_much;
    too_much.add(2, 5);
    CHECK_THROWS_AS(a -= too_much, MultisetUnderflow);
}

TEST_CASE("multiset equality is structural") {
    Multiset a, b;
    a.add(7, 2);
    b.add(7);
    CHECK(a != b);
    b.add(7);
    CHECK(a == b);
}
