#include <doctest.h>

#include <cmath>

#include "metastable/driving.hpp"

using namespace metastable;

namespace {

DrivingSystem two_arc_rotation() {
    return DrivingSystem::rotation(golden_mean_angle(),
                                   {{0.0, {1.0, 0.0}}, {0.5, {0.0, 1.0}}});
}

}  // namespace

TEST_CASE("rotation: equal-measure arcs average to one half") {
    DrivingSystem ds = two_arc_rotation();
    CHECK(ds.average_observable(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(ds.average_observable(1) == doctest::Approx(0.5).epsilon(1e-14));

    // long-orbit Birkhoff sums approach the exact averages
    double sum_a = 0.0, sum_b = 0.0;
    const long n = 1'000'000;
    for (long k = 0; k < n; ++k) {
        const auto& v = ds.fiber_params(k);
        sum_a += v[0];
        sum_b += v[1];
    }
    CHECK(std::abs(sum_a / n - 0.5) < 2e-3);
    CHECK(std::abs(sum_b / n - 0.5) < 2e-3);
}

TEST_CASE("rotation: constant observable is constant on every fiber") {
    DrivingSystem ds =
        DrivingSystem::rotation(golden_mean_angle(), {{0.0, {0.3, 0.7}}});
    for (long k : {-17L, -1L, 0L, 5L, 12345L}) {
        CHECK(ds.fiber_params(k)[0] == 0.3);
        CHECK(ds.fiber_params(k)[1] == 0.7);
    }
}

TEST_CASE("rotation: quarter arc Birkhoff average (direct summation oracle)") {
    DrivingSystem ds = DrivingSystem::rotation(
        0.61803398875, {{0.0, {1.0, 0.0}}, {0.25, {0.0, 1.0}}});
    double sum = 0.0;
    const long n = 1'000'000;
    for (long k = 0; k < n; ++k) sum += ds.fiber_params(k)[0];
    CHECK(std::abs(sum / n - 0.25) < 2e-3);
}

TEST_CASE("rotation: arc membership at index zero") {
    DrivingSystem ds = two_arc_rotation();
    CHECK(ds.orbit_point(0) == 0.0);
    CHECK(ds.fiber_params(0)[0] == 1.0);  // 0 lies in [0, 0.5)
}

TEST_CASE("rotation: validation failures") {
    CHECK_THROWS_AS(DrivingSystem::rotation(0.0, {{0.0, {0.5}}}), validation_error);
    CHECK_THROWS_AS(DrivingSystem::rotation(0.5, {{0.1, {0.5}}}), validation_error);
    CHECK_THROWS_AS(
        DrivingSystem::rotation(0.5, {{0.0, {0.5}}, {0.7, {1.5}}}),  // value > 1
        validation_error);
    CHECK_THROWS_AS(
        DrivingSystem::rotation(0.5, {{0.0, {0.5}}, {0.4, {0.5}}, {0.4, {0.5}}}),
        validation_error);
}

TEST_CASE("shift: degenerate one-symbol alphabet") {
    DrivingSystem ds = DrivingSystem::shift({{1.0, {0.5, 0.5}}}, 7, 100);
    for (long k = -100; k <= 100; ++k) CHECK(ds.fiber_params(k)[0] == 0.5);
}

TEST_CASE("shift: symbol frequency matches probabilities (window count oracle)") {
    DrivingSystem ds = DrivingSystem::shift(
        {{0.5, {1.0, 0.0}}, {0.5, {0.0, 1.0}}}, 20240901, 100000);
    long count0 = 0, total = 0;
    for (long k = -100000; k <= 100000; ++k, ++total)
        if (ds.fiber_params(k)[0] == 1.0) ++count0;
    CHECK(std::abs(static_cast<double>(count0) / total - 0.5) < 5e-3);
}

TEST_CASE("shift: deterministic repeated queries and window round-trip") {
    DrivingSystem ds = DrivingSystem::shift(
        {{0.5, {1.0, 0.0}}, {0.5, {0.0, 1.0}}}, 42, 128);
    const std::vector<double> first = ds.fiber_params(-3);
    CHECK(ds.fiber_params(-3) == first);

    std::vector<std::vector<double>> stored;
    for (long k = -100; k <= 100; ++k) stored.push_back(ds.fiber_params(k));
    for (long k = -100; k <= 100; ++k)
        CHECK(ds.fiber_params(k) == stored[static_cast<std::size_t>(k + 100)]);
}

TEST_CASE("shift: out-of-window query fails loudly") {
    DrivingSystem ds = DrivingSystem::shift({{1.0, {0.5}}}, 1, 10);
    CHECK_THROWS_AS(ds.fiber_params(11), window_error);
    CHECK_THROWS_AS(ds.fiber_params(-11), window_error);
}

TEST_CASE("shift: probability validation") {
    CHECK_THROWS_AS(DrivingSystem::shift({{0.5, {0.1}}, {0.6, {0.2}}}, 1, 10),
                    validation_error);
    CHECK_THROWS_AS(DrivingSystem::shift({{1.0, {0.1}}}, 1, 0), validation_error);
}

TEST_CASE("average_observable: exact weighted sums") {
    DrivingSystem arcs = DrivingSystem::rotation(
        golden_mean_angle(), {{0.0, {1.0}}, {0.5, {0.0}}});
    CHECK(arcs.average_observable(0) == 0.5);

    DrivingSystem probs =
        DrivingSystem::shift({{0.2, {1.0}}, {0.8, {0.0}}}, 3, 10);
    CHECK(probs.average_observable(0) == doctest::Approx(0.2).epsilon(1e-15));

    DrivingSystem mixed = DrivingSystem::rotation(
        golden_mean_angle(), {{0.0, {0.4}}, {0.25, {0.8}}});
    // 0.25*0.4 + 0.75*0.8 = 0.7
    CHECK(mixed.average_observable(0) == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("average_observable: invariant under arc splitting") {
    DrivingSystem coarse = DrivingSystem::rotation(
        golden_mean_angle(), {{0.0, {0.9}}, {0.5, {0.1}}});
    DrivingSystem fine = DrivingSystem::rotation(
        golden_mean_angle(),
        {{0.0, {0.9}}, {0.2, {0.9}}, {0.5, {0.1}}, {0.75, {0.1}}});
    CHECK(coarse.average_observable(0) == doctest::Approx(fine.average_observable(0)));
    // the observable itself is unchanged pointwise
    for (long k = -50; k <= 50; ++k)
        CHECK(coarse.fiber_params(k)[0] == fine.fiber_params(k)[0]);
}

TEST_CASE("backward/forward consistency of indexed fibers") {
    DrivingSystem ds = two_arc_rotation();
    for (long k = -64; k <= 64; ++k) {
        // stepping forward k from 0 and backward -k from 2k address the same fiber
        CHECK(ds.fiber_params(0 + k) == ds.fiber_params(2 * k - k));
        const double forward = ds.orbit_point(k);
        const double back = ds.orbit_point(2 * k - k);
        CHECK(forward == back);
    }
}

TEST_CASE("sup_observable reflects the finite range") {
    DrivingSystem ds = DrivingSystem::rotation(
        golden_mean_angle(), {{0.0, {0.4, 0.0}}, {0.25, {0.8, 0.3}}});
    CHECK(ds.sup_observable(0) == 0.8);
    CHECK(ds.sup_observable(1) == 0.3);
}
