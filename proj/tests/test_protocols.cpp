// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "qpure/protocols.hpp"

using namespace qpure;

TEST_CASE("protocol spec invariants") {
    const auto d = DetectorParams::from_eta(1.0);
    CHECK(ProtocolSpec::isotropic(d).n_detectors == 3);
    CHECK(ProtocolSpec::single(ProtocolKind::JacobsPerpendicular, d).n_detectors == 1);
    CHECK_THROWS_AS(ProtocolSpec::single(ProtocolKind::IsotropicThreeDetector, d), domain_error);
}

TEST_CASE("control rotations") {
    const auto d = DetectorParams::from_eta(1.0);
    const auto jacobs = ProtocolSpec::single(ProtocolKind::JacobsPerpendicular, d);
    const auto wr = ProtocolSpec::single(ProtocolKind::WisemanRalphParallel, d);
    const auto iso = ProtocolSpec::isotropic(d);

    // already perpendicular: identity
    CHECK(control_rotation(jacobs, {0.5, 0, 0}).is_identity(1e-12));
    // WR flips the state onto the axis with |z| = r
    const auto rot = control_rotation(wr, {0, 0, -0.7});
    CHECK(std::abs(rot.apply({0, 0, -0.7}).z) == doctest::Approx(0.7));
    // no-feedback protocols: identity
    CHECK(control_rotation(iso, {0.3, 0.2, 0.1}).is_identity());
    // degenerate direction: identity
    CHECK(control_rotation(wr, {0, 0, 0}).is_identity());
}

TEST_CASE("asymptotic mean-purity times and their exact ratios") {
    const double eps = 1e-4;
    CHECK(tau_perp(eps) == doctest::Approx(4.60517018598809).epsilon(1e-12));
    CHECK(tau_parallel(eps) == doctest::Approx(9.21034037197618).epsilon(1e-12));
    CHECK(tau_iso_nonideal(eps, 0.0) == doctest::Approx(0.25 * std::log(5000.0)).epsilon(1e-12));
    for (double e : {1e-2, 1e-3, 1e-4, 1e-5}) {
        CHECK(tau_parallel(e) / tau_perp(e) == doctest::Approx(2.0));
        CHECK(tau_parallel(e) / tau_iso_ideal(e) == doctest::Approx(4.0));
        CHECK(analytic_mtfp_estimate(ProtocolKind::WisemanRalphParallel, e).value /
                  analytic_mtfp_estimate(ProtocolKind::IsotropicThreeDetector, e).value ==
              doctest::Approx(2.0));
    }
    CHECK_THROWS_AS(tau_perp(0.3), domain_error);
    CHECK_THROWS_AS(analytic_time_mean_purity(ProtocolKind::WisemanRalphParallel, 1e-3),
                    domain_error);
}

TEST_CASE("mtfp estimates at eps = 1e-4") {
    CHECK(analytic_mtfp_estimate(ProtocolKind::WisemanRalphParallel, 1e-4).value ==
          doctest::Approx(2.30258509299405).epsilon(1e-12));
    CHECK(analytic_mtfp_estimate(ProtocolKind::IsotropicThreeDetector, 1e-4).value ==
          doctest::Approx(1.15129254649702).epsilon(1e-12));
}

TEST_CASE("attainability bound and divergence of the non-ideal time") {
    CHECK(purity_level_attainable(1e-3, 1e-3));
    CHECK_FALSE(purity_level_attainable(1e-3, 2.1e-3));
    CHECK_THROWS_AS(tau_iso_nonideal(1e-3, 2e-3), domain_error);   // eps == delta/2
    CHECK_THROWS_AS(tau_iso_nonideal(1e-3, 2.5e-3), domain_error);
    // strictly increasing in delta at fixed eps, diverging toward the bound
    double prev = tau_iso_nonideal(1e-3, 0.0);
    for (double delta : {5e-4, 1e-3, 1.5e-3, 1.9e-3, 1.99e-3}) {
        const double t = tau_iso_nonideal(1e-3, delta);
        CHECK(t > prev);
        prev = t;
    }
    CHECK(prev > tau_iso_nonideal(1e-3, 0.0) + 1.0);
}

TEST_CASE("regime tags keep the two isotropic formulas apart") {
    const auto ideal = analytic_time_mean_purity(ProtocolKind::IsotropicThreeDetector, 1e-4, 0.0);
    CHECK(ideal.regime == Regime::IdealAsymptotic);
    CHECK(ideal.value == doctest::Approx(tau_iso_ideal(1e-4)));
    const auto nonideal =
        analytic_time_mean_purity(ProtocolKind::IsotropicThreeDetector, 1e-4, 1e-5);
    CHECK(nonideal.regime == Regime::NonidealAsymptotic);
    // the delta->0 limit of the non-ideal form differs by ln(2)/4
    CHECK(tau_iso_nonideal(1e-4, 0.0) - tau_iso_ideal(1e-4) ==
          doctest::Approx(-0.25 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("log-entropy drifts: paper limits and the good/bad decomposition") {
    // single detector, aligned, ideal, s -> 0: rate -4
    CHECK(drift_log_entropy_single(1e-12, 1.0 - 2e-12, 0.0, 1.0) == doctest::Approx(-4.0));
    // isotropic ideal, s -> 0: rate -8
    CHECK(drift_log_entropy_iso(1e-12, 1.0) == doctest::Approx(-8.0));
    // decomposition identity iso = parallel + 2 perp over sampled (s, eta)
    for (double s : {1e-4, 1e-2, 0.2, 0.5}) {
        for (double eta : {0.6, 0.8, 0.95, 1.0}) {
            const double par = drift_log_entropy_single(s, 1.0 - 2.0 * s, 0.0, eta);
            const double perp = drift_log_entropy_perp(s, eta);
            const double iso = drift_log_entropy_iso(s, eta);
            CHECK(iso == doctest::Approx(par + 2.0 * perp).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(drift_log_entropy_iso(0.0, 0.9), domain_error);
    CHECK_THROWS_AS(drift_log_entropy_perp(0.1, 0.4), domain_error);
}

TEST_CASE("single-detector drift is maximized at x^2=0, z^2=1-2s") {
    for (double s : {0.05, 0.2, 0.4}) {
        for (double eta : {0.7, 1.0}) {
            const double best = drift_log_entropy_single(s, 1.0 - 2.0 * s, 0.0, eta);
            const double r2 = 1.0 - 2.0 * s;
            for (int i = 0; i <= 20; ++i) {
                for (int j = 0; i + j <= 20; ++j) {
                    const double z2 = r2 * i / 20.0;
                    const double x2 = r2 * j / 20.0 * (1.0 - static_cast<double>(i) / 20.0);
                    CHECK(drift_log_entropy_single(s, z2, x2, eta) <= best + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("ensemble-average purity ODE: closed form and limits") {
    // unique stable fixed point at eta = 1
    CHECK(naive_mean_purity(1.0, 0.5, 60.0) == doctest::Approx(1.0).epsilon(1e-10));
    // stationary value for eta = 0.9 against the closed form
    const double st = 1.0 + 0.5 * (1.0 / 0.9 - std::sqrt(1.0 / 0.81 + 2.0 / 0.9 - 2.0));
    CHECK(stationary_mean_purity(0.9) == doctest::Approx(st).epsilon(1e-14));
    CHECK(naive_mean_purity(0.9, 0.5, 80.0) == doctest::Approx(st).epsilon(1e-10));
    // high-ideality expansion: |st - (1 - delta/2)| < delta^2 at delta = 1e-3
    const double delta = 1e-3;
    CHECK(std::abs(stationary_mean_purity(1.0 - delta) - (1.0 - 0.5 * delta)) < delta * delta);
    // monotone nondecreasing in t
    double prev = 0.5;
    for (double t = 0.1; t <= 6.0; t += 0.1) {
        const double p = naive_mean_purity(0.95, 0.5, t);
        CHECK(p >= prev - 1e-14);
        prev = p;
    }
}
