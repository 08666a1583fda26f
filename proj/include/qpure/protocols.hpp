// SPDX-License-Identifier: Apache-2.0
//
// The four purification protocols as feedback laws, their asymptotic timescales,
// the log-entropy drift decomposition, and the ensemble-averaged purity ODE.
// All times are in units of 1/Gamma0.
#pragma once

#include <array>

#include "qpure/bloch.hpp"
#include "qpure/detector.hpp"

namespace qpure {

enum class ProtocolKind {
    ParallelNoFeedback,
    JacobsPerpendicular,
    WisemanRalphParallel,
    IsotropicThreeDetector,
};

const char* protocol_name(ProtocolKind k);

// A protocol plus its detector(s). The isotropic protocol carries three detectors
// (possibly non-identical); the single-detector protocols exactly one.
struct ProtocolSpec {
    ProtocolKind kind;
    std::array<DetectorParams, 3> detectors{};
    int n_detectors = 1;

    static ProtocolSpec single(ProtocolKind kind, const DetectorParams& d);
    static ProtocolSpec isotropic(const DetectorParams& d);
    static ProtocolSpec isotropic(const std::array<DetectorParams, 3>& d);

    [[nodiscard]] const DetectorParams& primary() const { return detectors[0]; }
};

// Feedback rotation applied at the start of a measurement interval. The detector
// measures along z. Jacobs places the state orthogonal to z, Wiseman-Ralph aligns
// it with z; the no-feedback and isotropic protocols return the identity, as does
// any protocol at r=0 (direction degenerate).
[[nodiscard]] Rotation control_rotation(const ProtocolSpec& spec, const BlochVector& v);

enum class Regime {
    ExactDeterministic,   // closed-form, no asymptotics involved
    IdealAsymptotic,      // high-purity limit, ideal detectors
    NonidealAsymptotic,   // high-purity limit with inefficiency
};

struct TimescaleResult {
    double value;  // units 1/Gamma0
    Regime regime;
    ProtocolKind protocol;
    double epsilon;
    double delta;
};

// Asymptotic time for the ensemble-average purity to reach 1-eps.
// Jacobs: ln(1/eps)/2; parallel: ln(1/eps); isotropic ideal: ln(1/eps)/4;
// isotropic non-ideal: [ln(1/(2 eps)) - ln(1 - delta/(2 eps))]/4.
// Requires eps in (0, 0.1]. Wiseman-Ralph has no mean-purity-time formula here.
TimescaleResult analytic_time_mean_purity(ProtocolKind kind, double eps, double delta = 0.0);

// The individual formulas (same preconditions).
double tau_perp(double eps);
double tau_parallel(double eps);
double tau_iso_ideal(double eps);
// The non-ideal isotropic form, valid for delta >= 0; at delta=0 it differs from
// tau_iso_ideal by the subleading ln(2)/4, so the two are never mixed.
double tau_iso_nonideal(double eps, double delta);

// Asymptotic mean first-passage times, ideal detectors only.
// Jacobs: ln(1/eps)/2 (deterministic); WR/parallel: ln(1/eps)/4; isotropic: ln(1/eps)/8.
TimescaleResult analytic_mtfp_estimate(ProtocolKind kind, double eps);

// Whether the mean purity can reach 1-eps at all with inefficiency delta.
[[nodiscard]] bool purity_level_attainable(double eps, double delta);

// Ito drift of ln s for a single detector in the state frame:
//   -2 { 2s + x^2 + 2 z^2 + (1 - 1/eta) x^2 / (2s) }.
double drift_log_entropy_single(double s, double z2, double x2, double eta);

// Ito drift of ln s for three identical detectors:
//   -2 { 2 - 2s + 2/eta + (1 - 1/eta)/s }.
double drift_log_entropy_iso(double s, double eta);

// Drift contribution of one measurement orthogonal to the state,
//   -2 [ 1/eta + (1 - 1/eta)/(2s) ].
// The good/bad decomposition only holds for eta > 1/2; lower efficiencies throw.
double drift_log_entropy_perp(double s, double eta);

// Ensemble-average purity from the self-consistent ODE
//   d<p>/dt = 2 [ 1 - (2<p>-1)/eta + 2 (1-<p>)^2 ],
// solved in closed form through its two fixed points (accurate to machine precision).
double naive_mean_purity(double eta, double p0, double t);

// Stable fixed point of the ODE above: 1 + (1/eta - sqrt(1/eta^2 + 2/eta - 2))/2.
double stationary_mean_purity(double eta);

}  // namespace qpure
