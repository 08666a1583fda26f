// SPDX-License-Identifier: Apache-2.0
#include "qpure/protocols.hpp"

#include <cmath>
#include <string>

namespace qpure {

const char* protocol_name(ProtocolKind k) {
    switch (k) {
        case ProtocolKind::ParallelNoFeedback: return "parallel";
        case ProtocolKind::JacobsPerpendicular: return "jacobs";
        case ProtocolKind::WisemanRalphParallel: return "wr";
        case ProtocolKind::IsotropicThreeDetector: return "iso";
    }
    return "?";
}

ProtocolSpec ProtocolSpec::single(ProtocolKind kind, const DetectorParams& d) {
    if (kind == ProtocolKind::IsotropicThreeDetector) {
        throw domain_error("isotropic protocol needs three detectors");
    }
    ProtocolSpec s;
    s.kind = kind;
    s.detectors = {d, d, d};
    s.n_detectors = 1;
    return s;
}

ProtocolSpec ProtocolSpec::isotropic(const DetectorParams& d) {
    return isotropic(std::array<DetectorParams, 3>{d, d, d});
}

ProtocolSpec ProtocolSpec::isotropic(const std::array<DetectorParams, 3>& d) {
    ProtocolSpec s;
    s.kind = ProtocolKind::IsotropicThreeDetector;
    s.detectors = d;
    s.n_detectors = 3;
    return s;
}

namespace {
constexpr std::array<double, 3> kZAxis = {0.0, 0.0, 1.0};
}

Rotation control_rotation(const ProtocolSpec& spec, const BlochVector& v) {
    validate(v);
    if (v.r() == 0.0) return Rotation::identity();
    switch (spec.kind) {
        case ProtocolKind::JacobsPerpendicular:
            return perp_rotation(v, kZAxis);
        case ProtocolKind::WisemanRalphParallel:
            return align_rotation(v, kZAxis);
        default:
            return Rotation::identity();
    }
}

namespace {
void check_eps(double eps) {
    if (!(eps > 0.0 && eps <= 0.1)) {
        throw domain_error("asymptotic timescales require eps in (0, 0.1], got " +
                           std::to_string(eps));
    }
}
void check_delta(double delta) {
    if (!(delta >= 0.0 && delta < 1.0)) throw domain_error("delta must be in [0, 1)");
}
}  // namespace

double tau_perp(double eps) {
    check_eps(eps);
    return 0.5 * std::log(1.0 / eps);
}

double tau_parallel(double eps) {
    check_eps(eps);
    return std::log(1.0 / eps);
}

double tau_iso_ideal(double eps) {
    check_eps(eps);
    return 0.25 * std::log(1.0 / eps);
}

double tau_iso_nonideal(double eps, double delta) {
    check_eps(eps);
    check_delta(delta);
    if (eps <= 0.5 * delta) {
        throw domain_error("mean purity 1-eps unattainable: requires eps >= delta/2");
    }
    return 0.25 * (std::log(0.5 / eps) - std::log1p(-0.5 * delta / eps));
}

bool purity_level_attainable(double eps, double delta) { return eps >= 0.5 * delta; }

TimescaleResult analytic_time_mean_purity(ProtocolKind kind, double eps, double delta) {
    check_delta(delta);
    switch (kind) {
        case ProtocolKind::JacobsPerpendicular:
            if (delta > 0.0) {
                throw domain_error("Jacobs mean-purity time: ideal detectors only");
            }
            return {tau_perp(eps), Regime::ExactDeterministic, kind, eps, delta};
        case ProtocolKind::ParallelNoFeedback:
            // inefficiency only damps coherences; the diagonal dynamics is unchanged
            return {tau_parallel(eps), Regime::IdealAsymptotic, kind, eps, delta};
        case ProtocolKind::IsotropicThreeDetector:
            if (delta == 0.0) {
                return {tau_iso_ideal(eps), Regime::IdealAsymptotic, kind, eps, delta};
            }
            return {tau_iso_nonideal(eps, delta), Regime::NonidealAsymptotic, kind, eps, delta};
        case ProtocolKind::WisemanRalphParallel:
            throw domain_error("no mean-purity-time formula for the Wiseman-Ralph protocol");
    }
    throw domain_error("unknown protocol");
}

TimescaleResult analytic_mtfp_estimate(ProtocolKind kind, double eps) {
    check_eps(eps);
    const double L = std::log(1.0 / eps);
    switch (kind) {
        case ProtocolKind::JacobsPerpendicular:
            return {0.5 * L, Regime::ExactDeterministic, kind, eps, 0.0};
        case ProtocolKind::ParallelNoFeedback:
        case ProtocolKind::WisemanRalphParallel:
            return {0.25 * L, Regime::IdealAsymptotic, kind, eps, 0.0};
        case ProtocolKind::IsotropicThreeDetector:
            return {0.125 * L, Regime::IdealAsymptotic, kind, eps, 0.0};
    }
    throw domain_error("unknown protocol");
}

namespace {
void check_entropy_args(double s, double eta) {
    if (!(s >= 0.0 && s <= 0.5)) throw domain_error("linear entropy must be in [0, 1/2]");
    if (!(eta > 0.0 && eta <= 1.0)) throw domain_error("eta must be in (0, 1]");
}
}  // namespace

double drift_log_entropy_single(double s, double z2, double x2, double eta) {
    check_entropy_args(s, eta);
    if (x2 < 0.0 || z2 < 0.0 || x2 + z2 > 1.0 - 2.0 * s + 1e-12) {
        throw domain_error("x^2 + z^2 must not exceed r^2 = 1 - 2s");
    }
    double d = 2.0 * s + x2 + 2.0 * z2;
    if (eta < 1.0) {
        if (s == 0.0 && x2 > 0.0) {
            throw domain_error("log-entropy drift singular at s=0 with eta<1");
        }
        if (x2 > 0.0) d += (1.0 - 1.0 / eta) * x2 / (2.0 * s);
    }
    return -2.0 * d;
}

double drift_log_entropy_iso(double s, double eta) {
    check_entropy_args(s, eta);
    double d = 2.0 - 2.0 * s + 2.0 / eta;
    if (eta < 1.0) {
        if (s == 0.0) throw domain_error("log-entropy drift singular at s=0 with eta<1");
        d += (1.0 - 1.0 / eta) / s;
    }
    return -2.0 * d;
}

double drift_log_entropy_perp(double s, double eta) {
    check_entropy_args(s, eta);
    if (!(eta > 0.5)) {
        throw domain_error("perpendicular/parallel decomposition requires eta > 1/2");
    }
    double d = 1.0 / eta;
    if (eta < 1.0) {
        if (s == 0.0) throw domain_error("log-entropy drift singular at s=0 with eta<1");
        d += (1.0 - 1.0 / eta) / (2.0 * s);
    }
    return -2.0 * d;
}

namespace {
// fixed points of d<p>/dt = 4 (p - p_plus)(p - p_minus)
struct FixedPoints {
    double lo, hi;
};
FixedPoints purity_fixed_points(double eta) {
    const double disc = std::sqrt(1.0 / (eta * eta) + 2.0 / eta - 2.0);
    return {1.0 + 0.5 * (1.0 / eta - disc), 1.0 + 0.5 * (1.0 / eta + disc)};
}
}  // namespace

double naive_mean_purity(double eta, double p0, double t) {
    if (!(eta > 0.0 && eta <= 1.0)) throw domain_error("eta must be in (0, 1]");
    if (!(p0 >= 0.5 && p0 <= 1.0)) throw domain_error("p0 must be in [1/2, 1]");
    if (!(t >= 0.0)) throw domain_error("t must be >= 0");
    const auto [pm, pp] = purity_fixed_points(eta);
    if (p0 == pm) return pm;
    const double c = (p0 - pm) / (p0 - pp);
    const double e = c * std::exp(-4.0 * (pp - pm) * t);
    return (pm - pp * e) / (1.0 - e);
}

double stationary_mean_purity(double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw domain_error("eta must be in (0, 1]");
    return purity_fixed_points(eta).lo;
}

}  // namespace qpure
