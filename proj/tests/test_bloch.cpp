// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "qpure/bloch.hpp"

using namespace qpure;

TEST_CASE("purity of basic states") {
    CHECK(purity({0, 0, 0}) == doctest::Approx(0.5));
    CHECK(purity({0, 0, 1}) == doctest::Approx(1.0));
    CHECK(purity({0.6, 0, 0.8}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(purity({1.0, 1.0, 1.0}), domain_error);
}

TEST_CASE("radial slack: tiny overshoot renormalizes, large one is invalid") {
    BlochVector v{0, 0, 1.0 + 0.5e-9};
    v.clamp_to_ball();
    CHECK(v.z == doctest::Approx(1.0));
    BlochVector w{0, 0, 1.0 + 1e-6};
    CHECK_THROWS_AS(w.clamp_to_ball(), overshoot_error);
    CHECK_FALSE(w.valid());
}

TEST_CASE("von Neumann entropy endpoints and interior value") {
    CHECK(von_neumann_entropy({0, 0, 0}) == doctest::Approx(std::log(2.0)));
    CHECK(von_neumann_entropy({0, 0, 1}) == doctest::Approx(0.0));
    // independent evaluation of -(3/4 ln 3/4 + 1/4 ln 1/4) at r = 1/2
    CHECK(von_neumann_entropy({0, 0, 0.5}) == doctest::Approx(0.56233514461880835).epsilon(1e-14));
}

TEST_CASE("entropy is monotone decreasing in r; linear entropy orders identically") {
    double prev_vn = von_neumann_entropy({0, 0, 0});
    double prev_s = 1.0 - purity({0, 0, 0});
    for (double r = 0.05; r <= 1.0; r += 0.05) {
        const double vn = von_neumann_entropy({0, 0, r});
        const double s = 1.0 - purity({0, 0, r});
        CHECK(vn < prev_vn);
        CHECK(s < prev_s);
        prev_vn = vn;
        prev_s = s;
    }
}

TEST_CASE("PurityState bookkeeping") {
    const auto ps = PurityState::from_purity(0.75);
    CHECK(ps.p + ps.s == 1.0);
    CHECK(ps.log_s() == doctest::Approx(std::log(0.25)));
    CHECK_THROWS_AS(PurityState::from_purity(1.0).log_s(), domain_error);
    CHECK_THROWS_AS(PurityState::from_purity(0.2), domain_error);
}

TEST_CASE("rotations: identity, axis permutation, purity preservation") {
    const BlochVector v{0, 0, 1};
    CHECK(Rotation::identity().apply(v).z == doctest::Approx(1.0));
    const auto ry = Rotation::from_axis_angle({0, 1, 0}, M_PI / 2);
    const auto out = ry.apply(v);
    CHECK(out.x == doctest::Approx(1.0));
    CHECK(out.z == doctest::Approx(0.0).epsilon(1e-15));

    std::mt19937_64 eng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int it = 0; it < 200; ++it) {
        BlochVector w{0.6 * u(eng), 0.6 * u(eng), 0.6 * u(eng)};
        const auto rot = Rotation::from_axis_angle({u(eng), u(eng), 1.0 + u(eng)}, 3.0 * u(eng));
        CHECK(std::abs(purity(rot.apply(w)) - purity(w)) < 1e-12);
    }
}

TEST_CASE("rotation composition matches sequential application") {
    const auto r1 = Rotation::from_axis_angle({0, 1, 0}, 0.7);
    const auto r2 = Rotation::from_axis_angle({1, 0, 2}, -1.3);
    const BlochVector v{0.2, -0.4, 0.5};
    const auto a = r2.apply(r1.apply(v));
    const auto b = r1.then(r2).apply(v);
    CHECK(a.x == doctest::Approx(b.x).epsilon(1e-13));
    CHECK(a.y == doctest::Approx(b.y).epsilon(1e-13));
    CHECK(a.z == doctest::Approx(b.z).epsilon(1e-13));
    const auto inv = r1.inverse().apply(r1.apply(v));
    CHECK(inv.x == doctest::Approx(v.x).epsilon(1e-13));
}

TEST_CASE("align_rotation basics and property check") {
    // already aligned
    CHECK(align_rotation({0, 0, 0.5}, {0, 0, 1}).is_identity(1e-12));
    // quarter turn
    const auto rot = align_rotation({0.5, 0, 0}, {0, 0, 1});
    const auto out = rot.apply({0.5, 0, 0});
    CHECK(std::abs(out.z) == doctest::Approx(0.5).epsilon(1e-13));
    // degenerate direction
    CHECK_THROWS_AS(align_rotation({0, 0, 0}, {0, 0, 1}), domain_error);
    // anti-parallel
    const auto flip = align_rotation({0, 0, -0.7}, {0, 0, 1});
    CHECK(flip.apply({0, 0, -0.7}).z == doctest::Approx(0.7).epsilon(1e-12));

    std::mt19937_64 eng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int it = 0; it < 200; ++it) {
        BlochVector w{0.5 * u(eng), 0.5 * u(eng), 0.5 * u(eng)};
        if (w.r() < 1e-3) continue;
        const auto r = align_rotation(w, {0, 0, 1});
        const auto al = r.apply(w);
        const double angle = std::atan2(std::hypot(al.x, al.y), al.z);
        CHECK(angle < 1e-10);
    }
}

TEST_CASE("perp_rotation sends the state to the equator, preserving radius") {
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int it = 0; it < 200; ++it) {
        BlochVector w{0.5 * u(eng), 0.5 * u(eng), 0.5 * u(eng)};
        if (w.r() < 1e-3) continue;
        const auto out = perp_rotation(w, {0, 0, 1}).apply(w);
        CHECK(std::abs(out.z) < 1e-10 * std::max(1.0, w.r()));
        CHECK(out.r() == doctest::Approx(w.r()).epsilon(1e-12));
    }
    // state along the axis still lands on the equator
    const auto out = perp_rotation({0, 0, 0.4}, {0, 0, 1}).apply({0, 0, 0.4});
    CHECK(std::abs(out.z) < 1e-12);
    CHECK(out.r() == doctest::Approx(0.4));
}
