#include <numeric>
#include <random>

#include "doctest.h"
#include "nets.hpp"
#include "wfs/bounds.hpp"

using namespace wfs;

namespace {

bool is_permutation_of_range(std::vector<std::size_t> p, std::size_t n) {
    std::sort(p.begin(), p.end());
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] != i) return false;
    return p.size() == n;
}

std::vector<IntVec> random_zero_sum(std::mt19937_64& rng, std::size_t n, std::size_t d, int b) {
    std::uniform_int_distribution<int> e(-b, b);
    std::vector<IntVec> xs(n, IntVec(d, 0));
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (auto& v : xs[i]) v = e(rng);
    // close the sum with the last vector, redrawing until it stays within b
    for (std::size_t q = 0; q < d; ++q) {
        std::int64_t s = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) s += xs[i][q];
        while (s > b || s < -b) {
            std::size_t i = rng() % (n - 1);
            if (s > b && xs[i][q] > -b) --xs[i][q], --s;
            else if (s < -b && xs[i][q] < b) ++xs[i][q], ++s;
        }
        xs[n - 1][q] = -s;
    }
    return xs;
}

}  // namespace

TEST_CASE("exact bound formulas on the example nets") {
    WorkflowNet mid = parse_workflow(testnets::middle);
    WorkflowNet left = parse_workflow(testnets::left);
    WorkflowNet right = parse_workflow(testnets::right);
    CHECK(bound_placecover(mid).value == 256);
    CHECK(bound_placecover(left).value == 16);
    CHECK(bound_placecover(parse_workflow("place i initial\nplace f final\ntrans t : i -> f\n")).value == 3);
    CHECK(bound_budget_ell(mid, 1).value == 12288);
    CHECK(bound_budget_ell(mid, 0).value == bound_budget_ell(mid, 2).value);
    CHECK(bound_z_norm_cap(mid, 2).value == 96);
    // every arc of the right net has weight 1
    CHECK(bound_z_norm_cap(right, 1).value == 35);
    CHECK(bound_z_norm_cap(right, 0).value == 35);
    CHECK(bound_z_norm_cap(right, 2).value == 140);
    CHECK(bound_placecover(mid).exact);
    CHECK_FALSE(bound_generalised_K(mid).exact);
}

TEST_CASE("hidden-constant bounds") {
    WorkflowNet mid = parse_workflow(testnets::middle);
    IntegerProgram g = build_ilp_n(mid);
    BigInt c1 = small_solution_constant(g, 1), c2 = small_solution_constant(g, 2);
    CHECK(c2 == c1 * c1);
    BoundReport k = bound_generalised_K(mid, 1);
    CHECK(k.value >= c1);
    CHECK(k.constant == 1);
    WorkflowNet one = parse_workflow("place i initial\nplace f final\ntrans t : i -> f\n");
    BoundReport k1 = bound_generalised_K(one, 1);
    CHECK(small_solution_constant(build_ilp_n(one), 1) >= 1);
    CHECK(k1.value >= small_solution_constant(build_ilp_n(one), 1));
    CHECK(bound_structural_K(mid, 1).value >= 2);
    CHECK(bound_structural_K(parse_workflow(testnets::left), 1).value > 0);
}

TEST_CASE("exact bounds are monotone") {
    std::mt19937_64 rng(9);
    WorkflowNet mid = parse_workflow(testnets::middle);
    for (std::int64_t k = 0; k < 20; ++k) {
        CHECK(bound_budget_ell(mid, k).value <= bound_budget_ell(mid, k + 1).value);
        CHECK(bound_z_norm_cap(mid, k).value <= bound_z_norm_cap(mid, k + 1).value);
    }
    // heavier arcs and extra transitions never lower a bound
    WorkflowNet heavy = parse_workflow(std::string(testnets::middle) + "trans t5 : q1 -> 3*o\n");
    CHECK(bound_placecover(mid).value < bound_placecover(heavy).value);
    CHECK(bound_budget_ell(mid, 2).value < bound_budget_ell(heavy, 2).value);
    CHECK(bound_z_norm_cap(mid, 2).value < bound_z_norm_cap(heavy, 2).value);
    CHECK(bound_structural_K(mid).value < bound_structural_K(heavy).value);
}

TEST_CASE("base reordering examples") {
    auto p = steinitz_reorder_small({{1}, {-1}, {1}, {-1}}, 1);
    CHECK(p == std::vector<std::size_t>{0, 1, 2, 3});
    auto q = steinitz_reorder_small({{1, 0}, {-1, 0}, {0, 1}, {0, -1}}, 2);
    CHECK(is_permutation_of_range(q, 4));
    CHECK_THROWS_AS(steinitz_reorder_small(std::vector<IntVec>(11, IntVec{0}), 1), ScaleTooLarge);
    CHECK_THROWS_AS(steinitz_reorder_small({{0, 0, 0, 0}}, 4), ScaleTooLarge);
}

TEST_CASE("base reordering on random zero-sum sets") {
    std::mt19937_64 rng(21);
    for (int it = 0; it < 200; ++it) {
        auto xs = random_zero_sum(rng, 8, 2, 2);
        std::int64_t b = 0;
        for (const auto& x : xs) b = std::max(b, max_norm(x));
        auto p = steinitz_reorder_small(xs, 2);
        REQUIRE(is_permutation_of_range(p, 8));
        IntVec prefix(2, 0);
        for (auto j : p) {
            prefix[0] += xs[j][0];
            prefix[1] += xs[j][1];
            CHECK(max_norm(prefix) <= 2 * b);
        }
    }
}

TEST_CASE("extended reordering") {
    auto zero = steinitz_extended_reorder_small({{1, 0}, {-1, 0}, {0, 2}, {0, -2}}, 2);
    CHECK(zero.permutation[0] == 0);
    for (const auto& c : zero.coefficients) CHECK(c == 0);

    auto single = steinitz_extended_reorder_small({{3, -2}}, 2);
    CHECK(single.permutation == std::vector<std::size_t>{0});
    CHECK((single.coefficients[0] == 0 || single.coefficients[0] == 1));
    CHECK(single.achieved_bound <= single.b * 4);

    // staircase towards a long diagonal
    std::vector<IntVec> stairs{{1, 0}, {0, 1}, {1, 0}, {0, 1}, {1, 0}, {0, 1}, {1, 0}, {0, 1}, {1, 1}};
    auto s = steinitz_extended_reorder_small(stairs, 2);
    CHECK(s.permutation[0] == 0);
    CHECK(s.achieved_bound <= Rational(s.b * 4));
    CHECK(std::is_sorted(s.coefficients.begin(), s.coefficients.end()));

    CHECK_THROWS_AS(steinitz_extended_reorder_small(std::vector<IntVec>(10, IntVec{0}), 1), ScaleTooLarge);
    CHECK_THROWS_AS(steinitz_extended_reorder_small({{13}}, 1), ScaleTooLarge);
}
