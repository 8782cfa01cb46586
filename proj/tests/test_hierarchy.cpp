// Unit tests for the hierarchy index enumeration and neighbor tables.

#include <doctest.h>

#include <map>
#include <vector>

#include "fiberheom/heom.hpp"

using namespace fiberheom;

namespace {

long binomial(int n, int k) {
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

TEST_CASE("enumeration counts match the stars-and-bars formula") {
    CHECK(heom::enumerate_hierarchy(2, 10).size() == 66);
    CHECK(heom::enumerate_hierarchy(1, 0).size() == 1);
    CHECK(heom::enumerate_hierarchy(2, 1).size() == 3);
    CHECK(heom::enumerate_hierarchy(3, 4).size() ==
          static_cast<std::size_t>(binomial(3 + 4, 3)));
}

TEST_CASE("graded order with the all-zeros index first") {
    const heom::HierarchyLayout layout = heom::enumerate_hierarchy(2, 1);
    REQUIRE(layout.size() == 3);
    CHECK(layout.indices[0].n == std::vector<int>{0, 0});
    CHECK(layout.indices[1].n == std::vector<int>{1, 0});
    CHECK(layout.indices[2].n == std::vector<int>{0, 1});

    const heom::HierarchyLayout big = heom::enumerate_hierarchy(3, 5);
    int prev_grade = 0;
    for (const auto& idx : big.indices) {
        CHECK(idx.grade() >= prev_grade);
        prev_grade = idx.grade();
    }
    CHECK(big.indices[0].grade() == 0);
}

TEST_CASE("neighbor tables raise and lower single modes") {
    const heom::HierarchyLayout layout = heom::enumerate_hierarchy(3, 4);
    std::map<std::vector<int>, int> pos;
    for (std::size_t i = 0; i < layout.size(); ++i) pos[layout.indices[i].n] = static_cast<int>(i);

    for (std::size_t i = 0; i < layout.size(); ++i) {
        const auto& n = layout.indices[i].n;
        const int grade = layout.indices[i].grade();
        for (int k = 0; k < layout.n_modes; ++k) {
            const auto up = layout.neighbor_up(i, k);
            if (grade + 1 > layout.n_c) {
                CHECK(up == -1);
            } else {
                REQUIRE(up >= 0);
                std::vector<int> raised = n;
                raised[k] += 1;
                CHECK(layout.indices[up].n == raised);
            }
            const auto down = layout.neighbor_down(i, k);
            if (n[k] == 0) {
                CHECK(down == -1);
            } else {
                REQUIRE(down >= 0);
                std::vector<int> lowered = n;
                lowered[k] -= 1;
                CHECK(layout.indices[down].n == lowered);
            }
        }
    }
}

TEST_CASE("enumeration precondition checks") {
    CHECK_THROWS_AS(heom::enumerate_hierarchy(0, 4), std::invalid_argument);
    CHECK_THROWS_AS(heom::enumerate_hierarchy(2, -1), std::invalid_argument);
}
