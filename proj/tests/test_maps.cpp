#include <doctest.h>

#include <cmath>
#include <random>

#include "metastable/maps.hpp"
#include "metastable/transfer.hpp"

using namespace metastable;

TEST_CASE("paired tent: branch formula values") {
    // T_{a,b}(1/2) = -a
    CHECK(PiecewiseLinearMap::paired_tent(0.1, 0.1)(0.5) ==
          doctest::Approx(-0.1).epsilon(1e-15));
    // T_{a,b}(-1/2) = b
    CHECK(PiecewiseLinearMap::paired_tent(0.0, 0.0)(-0.5) == 0.0);
    CHECK(PiecewiseLinearMap::paired_tent(0.0, 0.3)(-0.5) ==
          doctest::Approx(0.3).epsilon(1e-15));
    // interior branch: -2(1+a)x + 1 at x = 0.25, a = 0
    CHECK(PiecewiseLinearMap::paired_tent(0.0, 0.0)(0.25) == 0.5);
    // fixed endpoints and the pinned origin
    auto m = PiecewiseLinearMap::paired_tent(0.37, 0.41);
    CHECK(m(-1.0) == -1.0);
    CHECK(m(1.0) == 1.0);
    CHECK(m(0.0) == 0.0);
    // first branch with b = 0 at x = -0.75
    CHECK(PiecewiseLinearMap::paired_tent(0.2, 0.0)(-0.75) == -0.5);
}

TEST_CASE("paired tent: domain and parameter validation") {
    CHECK_THROWS_AS(PiecewiseLinearMap::paired_tent(-0.1, 0.0), validation_error);
    CHECK_THROWS_AS(PiecewiseLinearMap::paired_tent(0.0, 1.1), validation_error);
    auto m = PiecewiseLinearMap::paired_tent(0.1, 0.1);
    CHECK_THROWS_AS(m(1.5), validation_error);
    CHECK_THROWS_AS(m(-1.0000001), validation_error);
}

TEST_CASE("holes: closed form for paired tent maps") {
    // eps*b = 0.1: H_L = [-1 + 1/2.2, -1/2.2]
    auto m = PiecewiseLinearMap::paired_tent(0.0, 0.1);
    HoleSet hs = holes(m);
    REQUIRE(hs.by_source[0].size() == 1);
    CHECK(std::abs(hs.by_source[0][0].lo - (-1.0 + 1.0 / 2.2)) < 1e-14);
    CHECK(std::abs(hs.by_source[0][0].hi - (-1.0 / 2.2)) < 1e-14);
    CHECK(hs.by_source[0][0].target == 1);

    // eps*a = 0.1: H_R = [1/2.2, 1 - 1/2.2]
    auto mr = PiecewiseLinearMap::paired_tent(0.1, 0.0);
    HoleSet hsr = holes(mr);
    REQUIRE(hsr.by_source[1].size() == 1);
    CHECK(std::abs(hsr.by_source[1][0].lo - 1.0 / 2.2) < 1e-14);
    CHECK(std::abs(hsr.by_source[1][0].hi - (1.0 - 1.0 / 2.2)) < 1e-14);
    CHECK(hsr.by_source[1][0].target == 0);
}

TEST_CASE("holes: zero-leak map degenerates to the infinitesimal holes") {
    HoleSet hs = holes(PiecewiseLinearMap::paired_tent(0.0, 0.0));
    REQUIRE(hs.by_source[0].size() == 1);
    CHECK(hs.by_source[0][0].lo == -0.5);
    CHECK(hs.by_source[0][0].hi == -0.5);
    REQUIRE(hs.by_source[1].size() == 1);
    CHECK(hs.by_source[1][0].lo == 0.5);
    CHECK(hs.by_source[1][0].hi == 0.5);
}

TEST_CASE("holes: generic preimage equals the closed form on a parameter grid") {
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            const double ea = 0.02 + 0.045 * i;
            const double eb = 0.015 + 0.05 * j;
            auto m = PiecewiseLinearMap::paired_tent(ea, eb);
            HoleSet hs = holes(m);
            REQUIRE(hs.by_source[0].size() == 1);
            REQUIRE(hs.by_source[1].size() == 1);
            const double dl = 2.0 * (1.0 + eb);
            const double dr = 2.0 * (1.0 + ea);
            CHECK(std::abs(hs.by_source[0][0].lo - (-1.0 + 1.0 / dl)) < 1e-14);
            CHECK(std::abs(hs.by_source[0][0].hi - (-1.0 / dl)) < 1e-14);
            CHECK(std::abs(hs.by_source[1][0].lo - 1.0 / dr) < 1e-14);
            CHECK(std::abs(hs.by_source[1][0].hi - (1.0 - 1.0 / dr)) < 1e-14);
        }
    }
}

TEST_CASE("hole membership: x in H_L iff the map exits the block") {
    auto m = PiecewiseLinearMap::paired_tent(0.13, 0.08);
    HoleSet hs = holes(m);
    const HoleInterval& hl = hs.by_source[0][0];
    const HoleInterval& hr = hs.by_source[1][0];
    std::mt19937_64 rng(99);
    for (int i = 0; i < 10000; ++i) {
        const double xl = -1.0 + uniform_unit(rng);
        const bool inside = xl >= hl.lo && xl <= hl.hi;
        const bool exits = m(xl) > 0.0;
        if (std::abs(xl - hl.lo) > 1e-14 && std::abs(xl - hl.hi) > 1e-14)
            CHECK(inside == exits);
        const double xr = uniform_unit(rng);
        const bool inside_r = xr >= hr.lo && xr <= hr.hi;
        const bool exits_r = m(xr) < 0.0 && xr != 0.0;
        if (std::abs(xr - hr.lo) > 1e-14 && std::abs(xr - hr.hi) > 1e-14 && xr != 0.0)
            CHECK(inside_r == exits_r);
    }
}

TEST_CASE("hole_measure: exact formula 1 - 1/(1+eps b)") {
    CHECK(std::abs(hole_measure(PiecewiseLinearMap::paired_tent(0.0, 0.1), 0) -
                   (1.0 - 1.0 / 1.1)) < 1e-15);
    CHECK(hole_measure(PiecewiseLinearMap::paired_tent(0.0, 0.0), 0) == 0.0);
    CHECK(hole_measure(PiecewiseLinearMap::paired_tent(0.0, 0.0), 1) == 0.0);

    const double eb = 0.05;
    const double measured = hole_measure(PiecewiseLinearMap::paired_tent(0.0, eb), 0);
    CHECK(std::abs(measured - (1.0 - 1.0 / (1.0 + eb))) < 1e-15);
    // second-order residual of the linear model is at most (eps b)^2
    CHECK(std::abs(measured - eb) <= eb * eb + 1e-15);
}

TEST_CASE("hole_measure: linear coefficient recovered across an eps sweep") {
    // mirrors the leak-table design: measure(eps)/eps -> beta as eps -> 0
    auto coeff = [](double eps) {
        std::vector<std::array<double, 2>> leaks = {
            {0.0, 0.1 * eps}, {0.1 * eps, 0.1 * eps}, {0.1 * eps, 0.0}};
        auto m = PiecewiseLinearMap::chain_tent(3, leaks);
        return hole_measure(m, 1) / eps;  // middle block leaks both ways
    };
    // Richardson extrapolation of the two smallest eps values
    const double extrap = 2.0 * coeff(0.025) - coeff(0.05);
    CHECK(std::abs(extrap - 0.2) < 1e-3);  // designed total coefficient 0.1 + 0.1

    auto edge = [](double eps) {
        std::vector<std::array<double, 2>> leaks = {
            {0.0, 0.1 * eps}, {0.1 * eps, 0.1 * eps}, {0.1 * eps, 0.0}};
        return hole_measure(PiecewiseLinearMap::chain_tent(3, leaks), 0) / eps;
    };
    CHECK(std::abs(2.0 * edge(0.025) - edge(0.05) - 0.1) < 1e-3);
}

TEST_CASE("chain_tent: m = 2 reproduces paired_tent branch-for-branch") {
    const double a = 0.23, b = 0.11;
    auto chain = PiecewiseLinearMap::chain_tent(2, {{0.0, b}, {a, 0.0}});
    auto tent = PiecewiseLinearMap::paired_tent(a, b);
    REQUIRE(chain.branches().size() == tent.branches().size());
    for (std::size_t i = 0; i < tent.branches().size(); ++i) {
        CHECK(chain.branches()[i].lo == tent.branches()[i].lo);
        CHECK(chain.branches()[i].hi == tent.branches()[i].hi);
        CHECK(chain.branches()[i].slope == tent.branches()[i].slope);
        CHECK(chain.branches()[i].intercept == tent.branches()[i].intercept);
        CHECK(chain.branches()[i].image_min == tent.branches()[i].image_min);
        CHECK(chain.branches()[i].image_max == tent.branches()[i].image_max);
    }
    CHECK(chain.boundary_points() == tent.boundary_points());
    CHECK(chain.critical_set() == tent.critical_set());
}

TEST_CASE("chain_tent: zero leaks keep every block invariant") {
    auto m = PiecewiseLinearMap::chain_tent(
        3, {{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}});
    // iterate an interior point of the middle block
    double x = -0.2;  // I_2 = [-1/3, 1/3]
    for (int i = 0; i < 50; ++i) {
        x = m(x);
        CHECK(x >= -1.0 / 3.0 - 1e-12);
        CHECK(x <= 1.0 / 3.0 + 1e-12);
    }
}

TEST_CASE("chain_tent: leak validation") {
    CHECK_THROWS_AS(PiecewiseLinearMap::chain_tent(1, {{0.0, 0.0}}),
                    validation_error);
    CHECK_THROWS_AS(
        PiecewiseLinearMap::chain_tent(2, {{0.1, 0.0}, {0.0, 0.0}}),  // left edge
        validation_error);
    CHECK_THROWS_AS(
        PiecewiseLinearMap::chain_tent(2, {{0.0, 0.0}, {0.0, 0.1}}),  // right edge
        validation_error);
    CHECK_THROWS_AS(
        PiecewiseLinearMap::chain_tent(2, {{0.0, 1.5}, {0.0, 0.0}}),
        validation_error);
}

TEST_CASE("chain_tent: uniform expansion and interior fixed junctions") {
    auto m = PiecewiseLinearMap::chain_tent(
        4, {{0.0, 0.3}, {0.2, 0.1}, {0.4, 0.25}, {0.15, 0.0}});
    for (const AffineBranch& b : m.branches()) CHECK(std::abs(b.slope) > 1.0);
    for (std::size_t i = 1; i + 1 < m.boundary_points().size(); ++i) {
        const double junction = m.boundary_points()[i];
        CHECK(m(junction) == junction);
    }
}
