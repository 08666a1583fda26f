// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "qpure/sde.hpp"

using namespace qpure;

namespace {
const DetectorParams kIdeal = DetectorParams::from_eta(1.0);
}

TEST_CASE("single-detector step: mixed state diffuses along the measured axis") {
    const double dW = 0.02, dt = 1e-3;
    const auto out = step_single_detector({0, 0, 0}, kIdeal, Axis::Z, {dW, dt});
    CHECK(out.z == doctest::Approx(std::sqrt(2.0) * dW));
    CHECK(out.x == 0.0);
    CHECK(out.y == 0.0);
}

TEST_CASE("single-detector step: eigenstate is a fixed point") {
    for (double dW : {-0.05, 0.0, 0.04}) {
        const auto out = step_single_detector({0, 0, 1}, kIdeal, Axis::Z, {dW, 1e-3});
        CHECK(out.z == doctest::Approx(1.0));
        CHECK(out.x == 0.0);
    }
}

TEST_CASE("single-detector step: coherence decays at the total rate") {
    const auto d = DetectorParams::from_eta(0.5);  // total rate 2
    const double dt = 1e-3;
    const auto out = step_single_detector({1, 0, 0}, d, Axis::Z, {0.0, dt});
    CHECK(out.x == doctest::Approx(1.0 - (d.gamma0 / d.eta()) * dt));
}

TEST_CASE("axis permutation mirrors the z-axis formulas") {
    const auto oz = step_single_detector({0.1, 0.2, 0.3}, kIdeal, Axis::Z, {0.01, 1e-3});
    const auto ox = step_single_detector({0.3, 0.1, 0.2}, kIdeal, Axis::X, {0.01, 1e-3});
    CHECK(ox.x == doctest::Approx(oz.z).epsilon(1e-15));
    CHECK(ox.y == doctest::Approx(oz.x).epsilon(1e-15));
    CHECK(ox.z == doctest::Approx(oz.y).epsilon(1e-15));
}

TEST_CASE("three-detector step at the origin is pure diffusion") {
    const std::array<DetectorParams, 3> d3 = {kIdeal, kIdeal, kIdeal};
    const auto out = step_three_detector({0, 0, 0}, d3, {{0.01, -0.02, 0.005}, 1e-3});
    CHECK(out.x == doctest::Approx(std::sqrt(2.0) * 0.01));
    CHECK(out.y == doctest::Approx(-std::sqrt(2.0) * 0.02));
    CHECK(out.z == doctest::Approx(std::sqrt(2.0) * 0.005));
}

TEST_CASE("three-detector step on the sphere stays within the O(dt) slack") {
    const std::array<DetectorParams, 3> d3 = {kIdeal, kIdeal, kIdeal};
    const double dt = 1e-3, s = std::sqrt(dt);
    BlochVector v{0, 0, 1};
    for (int k = 0; k < 2000; ++k) {
        v = step_three_detector(v, d3, {{s * 0.7, -s * 0.4, s * 0.2}, dt});
        CHECK(v.r() <= 1.0 + kRadialSlack);  // the step projects in-slack overshoot back
    }
    CHECK(v.r() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dt cap is enforced") {
    CHECK_THROWS_AS(step_single_detector({0, 0, 0}, kIdeal, Axis::Z, {0.0, 0.05}), domain_error);
    const auto d = DetectorParams::from_eta(0.5);  // total rate 2: cap halves
    CHECK_THROWS_AS(step_single_detector({0, 0, 0}, d, Axis::Z, {0.0, 0.008}), domain_error);
}

TEST_CASE("radial step: fixed points and the singular-origin guard") {
    CHECK(step_radial(1.0, kIdeal, {0.3, 1e-3}) == doctest::Approx(1.0));
    // drift-balance point r = sqrt(eta)
    const auto d = DetectorParams::from_eta(0.81);
    CHECK(step_radial(0.9, d, {0.0, 1e-3}) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK_THROWS_AS(step_radial(5e-7, kIdeal, {0.0, 1e-3}), domain_error);
    CHECK_THROWS_AS(step_radial(0.0, kIdeal, {0.0, 1e-3}), domain_error);
}

TEST_CASE("purity step: boundary behavior") {
    // both coefficients vanish at p=1 for an ideal detector
    CHECK(step_purity_iso(1.0, kIdeal, {0.4, 1e-3}) == doctest::Approx(1.0));
    // noise coefficient vanishes at p=1/2 exactly; drift is 2(1 + 1/eta + 1/2) dt
    const auto d = DetectorParams::from_eta(0.8);
    const double dt = 1e-3;
    const double expect = 0.5 + 2.0 * (1.0 + 1.0 / 0.8 + 0.5) * dt;
    CHECK(step_purity_iso(0.5, d, {123.0, dt}) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("first passage interpolation") {
    const std::vector<double> t{0.0, 1.0};
    const std::vector<double> p_above{0.9, 0.95};
    CHECK(first_passage_time(p_above, t, 0.75).value() == 0.0);
    const std::vector<double> p_lin{0.5, 1.0};
    CHECK(first_passage_time(p_lin, t, 0.75).value() == doctest::Approx(0.5));
    const std::vector<double> p_low{0.5, 0.6};
    CHECK_FALSE(first_passage_time(p_low, t, 0.75).has_value());
}

TEST_CASE("measurement record composition") {
    CHECK(measurement_record(1.0, kIdeal, {0.0, 1e-3}) == doctest::Approx(1e-3));
    CHECK(measurement_record(0.0, kIdeal, {0.02, 1e-3}) ==
          doctest::Approx(0.02 / std::sqrt(2.0)));
}

TEST_CASE("simulate_trajectory: horizon 0 gives a single point") {
    const auto spec = ProtocolSpec::single(ProtocolKind::ParallelNoFeedback, kIdeal);
    const auto rec = simulate_trajectory({0, 0, 0.2}, spec, {.horizon = 0.0, .seed = 1});
    REQUIRE(rec.times.size() == 1);
    CHECK(rec.purities[0] == doctest::Approx(purity({0, 0, 0.2})));
    CHECK_FALSE(rec.censored);
}

TEST_CASE("simulate_trajectory: Jacobs follows the closed-form purity growth") {
    const auto spec = ProtocolSpec::single(ProtocolKind::JacobsPerpendicular, kIdeal);
    const double dt = 1e-3;
    const auto rec =
        simulate_trajectory({0, 0, 0}, spec, {.dt = dt, .horizon = 2.0, .seed = 3});
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
        const double expect = 1.0 - 0.5 * std::exp(-2.0 * rec.times[k]);
        CHECK(std::abs(rec.purities[k] - expect) < 1e-10);
    }
    // and the first passage of 1-eps matches the closed-form inversion to O(dt)
    const double eps = 1e-3;
    const auto stopped = simulate_trajectory(
        {0, 0, 0}, spec, {.dt = dt, .horizon = 10.0, .stop_threshold = 1.0 - eps, .seed = 3});
    REQUIRE(stopped.first_passage.has_value());
    const double analytic = 0.5 * std::log(0.5 / eps);
    CHECK(std::abs(*stopped.first_passage - analytic) < dt);
}

TEST_CASE("simulate_trajectory: records accumulate the drift part of the signal") {
    const auto spec = ProtocolSpec::single(ProtocolKind::WisemanRalphParallel, kIdeal);
    const auto rec = simulate_trajectory({0, 0, 0.99}, spec,
                                         {.dt = 1e-3, .horizon = 0.5, .seed = 11,
                                          .with_records = true});
    REQUIRE(rec.records.size() == rec.times.size() - 1);
    double sum = 0.0;
    for (const auto& r : rec.records) sum += r[2];
    // state pinned near z=1: the time-averaged record should sit near 1
    CHECK(sum / 0.5 == doctest::Approx(1.0).epsilon(0.25));
}

TEST_CASE("simulate_trajectory rejects oversized steps") {
    const auto spec = ProtocolSpec::single(ProtocolKind::ParallelNoFeedback, kIdeal);
    CHECK_THROWS_AS(simulate_trajectory({0, 0, 0}, spec, {.dt = 0.05, .horizon = 1.0}),
                    domain_error);
}
