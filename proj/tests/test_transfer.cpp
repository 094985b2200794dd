#include <doctest.h>

#include <cmath>
#include <random>
#include <fstream>
#include <sstream>

#include "metastable/transfer.hpp"

using namespace metastable;

namespace {

Density random_density(int grid_n, std::mt19937_64& rng, double lo = -1.0,
                       double hi = 1.0) {
    std::vector<double> v(static_cast<std::size_t>(grid_n));
    for (double& x : v) x = lo + (hi - lo) * uniform_unit(rng);
    return Density(grid_n, std::move(v));
}

}  // namespace

TEST_CASE("density: norms, integral, variation") {
    Density ind_l = Density::block_constant(8, {-1.0, 0.0, 1.0}, {1.0, 0.0});
    CHECK(ind_l.variation() == 1.0);
    CHECK(ind_l.l1_norm() == 1.0);
    CHECK(ind_l.integral() == 1.0);

    CHECK(Density::constant(16, 0.7).variation() == 0.0);

    Density saw(4, {0.0, 1.0, 0.0, 1.0});
    CHECK(saw.variation() == 3.0);

    CHECK(Density::uniform(64).integral() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("ulam: four-cell matrix of the unperturbed tent pair") {
    auto op = UlamOperator::build(PiecewiseLinearMap::paired_tent(0.0, 0.0), 4);
    // branch [-1,-1/2] maps cell 0 affinely onto [-1,0]: half to cell 0, half to 1
    CHECK(op.entry(0, 0) == 0.5);
    CHECK(op.entry(1, 0) == 0.5);
    CHECK(op.entry(2, 0) == 0.0);
    CHECK(op.entry(3, 0) == 0.0);
    for (int j = 0; j < 4; ++j)
        CHECK(op.column_sum(j) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("ulam: zero-leak maps give exactly block-diagonal matrices") {
    auto check_block_diag = [](const UlamOperator& op,
                               const std::vector<double>& boundaries) {
        const double h = 2.0 / op.grid_n();
        for (int j = 0; j < op.grid_n(); ++j) {
            const double cj = -1.0 + (j + 0.5) * h;
            std::size_t bj = 0;
            while (bj + 2 < boundaries.size() && cj >= boundaries[bj + 1]) ++bj;
            for (auto k = op.col_ptr()[j]; k < op.col_ptr()[j + 1]; ++k) {
                const int i = op.row_idx()[static_cast<std::size_t>(k)];
                const double ci = -1.0 + (i + 0.5) * h;
                std::size_t bi = 0;
                while (bi + 2 < boundaries.size() && ci >= boundaries[bi + 1]) ++bi;
                CHECK(bi == bj);  // cross-block mass is exactly zero
            }
        }
    };
    check_block_diag(UlamOperator::build(PiecewiseLinearMap::paired_tent(0.0, 0.0), 256),
                     {-1.0, 0.0, 1.0});
    auto m3 = PiecewiseLinearMap::chain_tent(3, {{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}});
    check_block_diag(UlamOperator::build(m3, 768),
                     {-1.0, -1.0 + 2.0 / 3.0, -1.0 + 2.0 * (2.0 / 3.0), 1.0});
}

TEST_CASE("ulam: uniform density is exactly fixed at zero leak") {
    auto op = UlamOperator::build(PiecewiseLinearMap::paired_tent(0.0, 0.0), 128);
    Density u = Density::uniform(128);
    Density out = op.apply(u);
    for (int i = 0; i < 128; ++i) CHECK(out.values()[static_cast<std::size_t>(i)] == 0.5);
    // the block indicator is fixed as well
    Density ind_l = Density::block_constant(128, {-1.0, 0.0, 1.0}, {1.0, 0.0});
    Density out_l = op.apply(ind_l);
    for (int i = 0; i < 128; ++i)
        CHECK(out_l.values()[static_cast<std::size_t>(i)] ==
              ind_l.values()[static_cast<std::size_t>(i)]);
}

TEST_CASE("ulam: leaked mass equals the hole measure (hole_measure oracle)") {
    const double eb = 0.1;
    auto map = PiecewiseLinearMap::paired_tent(0.0, eb);
    const int grid_n = 1024;
    auto op = UlamOperator::build(map, grid_n);
    Density ind_l = Density::block_constant(grid_n, {-1.0, 0.0, 1.0}, {1.0, 0.0});
    const double leaked = op.apply(ind_l).integral_on(0.0, 1.0);
    const double expected = hole_measure(map, 0);  // 1 - 1/1.1 = 1/11
    CHECK(expected == doctest::Approx(1.0 / 11.0).epsilon(1e-14));
    CHECK(std::abs(leaked - expected) < 10.0 / grid_n);
}

TEST_CASE("ulam: apply is linear, positive, and integral preserving") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = uniform_unit(rng), b = uniform_unit(rng);
        auto op = UlamOperator::build(PiecewiseLinearMap::paired_tent(a, b), 256);
        for (int j = 0; j < 256; ++j) {
            CHECK(std::abs(op.column_sum(j) - 1.0) < 1e-12);
            for (auto k = op.col_ptr()[j]; k < op.col_ptr()[j + 1]; ++k) {
                CHECK(op.entries()[static_cast<std::size_t>(k)] >= 0.0);
                CHECK(op.entries()[static_cast<std::size_t>(k)] <= 1.0 + 1e-15);
            }
        }
        Density zero = Density::constant(256, 0.0);
        CHECK(op.apply(zero).l1_norm() == 0.0);

        Density f = random_density(256, rng, 0.0, 1.0);  // nonnegative
        Density g = op.apply(f);
        for (double x : g.values()) CHECK(x >= 0.0);
        CHECK(std::abs(g.integral() - f.integral()) <= 1e-12 * f.l1_norm());
    }
}

TEST_CASE("ulam: grid mismatch and tiny grids are rejected") {
    auto map = PiecewiseLinearMap::paired_tent(0.1, 0.1);
    CHECK_THROWS_AS(UlamOperator::build(map, 1), validation_error);
    auto op = UlamOperator::build(map, 64);
    CHECK_THROWS_AS(op.apply(Density::uniform(128)), validation_error);
}

TEST_CASE("verify_ly: iterated variation bound holds on random densities") {
    std::mt19937_64 rng(7);
    std::vector<PiecewiseLinearMap> cocycle;
    for (int i = 0; i < 8; ++i)
        cocycle.push_back(
            PiecewiseLinearMap::paired_tent(0.1 * uniform_unit(rng),
                                            0.1 * uniform_unit(rng)));
    LyReport rep = verify_ly(cocycle, 25, 512, 99);
    CHECK(rep.violations == 0);
    CHECK(rep.min_slack > 0.0);
    CHECK(rep.records.size() == 25 * 4);  // horizons 2,4,6,8 per trial

    // a small-variation block indicator has large slack at one double-step
    std::vector<PiecewiseLinearMap> pair = {cocycle[0], cocycle[1]};
    auto op0 = UlamOperator::build(pair[0], 512);
    auto op1 = UlamOperator::build(pair[1], 512);
    Density ind_l = Density::block_constant(512, {-1.0, 0.0, 1.0}, {1.0, 0.0});
    const double bound = 0.75 * ind_l.variation() + 26.0 * 0.5 * ind_l.l1_norm();
    const double observed = op1.apply(op0.apply(ind_l)).variation();
    CHECK(observed <= bound);
    CHECK(bound - observed > 10.0);
}

TEST_CASE("verify_ly: high-variation density stays under the iterated bound") {
    // Var(f) = 100, |f|_{L1(normalized Leb)} = 1 shaped as an alternating comb
    const int grid_n = 512;
    std::vector<double> v(grid_n);
    for (int i = 0; i < grid_n; ++i) v[i] = (i % 2 == 0) ? 1.0 : 1.0 - 100.0 / 511.0;
    Density f(grid_n, v);
    const double var0 = f.variation();
    CHECK(var0 == doctest::Approx(100.0).epsilon(1e-12));

    std::vector<PiecewiseLinearMap> cocycle;
    for (int i = 0; i < 8; ++i)
        cocycle.push_back(PiecewiseLinearMap::paired_tent(0.05, 0.02));
    auto ops = UlamOperator::build(cocycle[0], grid_n);
    Density g = f;
    for (int step = 1; step <= 8; ++step) g = ops.apply(g);
    const double norm_bar = 0.5 * f.l1_norm();
    const double bound = std::pow(0.75, 4) * var0 + 26.0 * norm_bar;
    CHECK(g.variation() <= bound);
}

TEST_CASE("serialization: density and operator round-trip") {
    std::mt19937_64 rng(5);
    Density f = random_density(32, rng);
    std::stringstream buf;
    save_density_csv(f, buf);
    Density g = load_density_csv(buf);
    CHECK(g.grid_n() == f.grid_n());
    CHECK(g.values() == f.values());

    auto op = UlamOperator::build(PiecewiseLinearMap::paired_tent(0.13, 0.21), 64);
    std::stringstream mbuf;
    save_ulam_csv(op, mbuf);
    UlamOperator op2 = load_ulam_csv(mbuf);
    CHECK(op2.grid_n() == op.grid_n());
    CHECK(op2.nnz() == op.nnz());
    Density h = random_density(64, rng);
    CHECK(op.apply(h).values() == op2.apply(h).values());
}

TEST_CASE("golden file: Ulam matrix of a fixed map is reproducible") {
    auto op = UlamOperator::build(PiecewiseLinearMap::paired_tent(0.25, 0.125), 16);
    std::ifstream golden(std::string(METASTABLE_TEST_DIR) + "/golden/ulam_paired_g16.csv");
    REQUIRE(golden.good());
    UlamOperator ref = load_ulam_csv(golden);
    REQUIRE(ref.grid_n() == op.grid_n());
    REQUIRE(ref.nnz() == op.nnz());
    for (int j = 0; j < 16; ++j)
        for (int i = 0; i < 16; ++i)
            CHECK(std::abs(op.entry(i, j) - ref.entry(i, j)) <= 1e-15);
}
