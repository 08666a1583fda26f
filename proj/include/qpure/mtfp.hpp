// SPDX-License-Identifier: Apache-2.0
//
// Mean first-passage time of the purity diffusion with a reflecting boundary at
// p = 1/2 and an absorbing one at p = 1-eps:
//   T = 2 int_{p0}^{1-eps} dy psi^-1(y) int_{1/2}^{y} dz psi(z)/B(z),
// evaluated on a graded mesh in u = ln(2(1-p)) entirely in log space (psi spans
// hundreds of e-folds when delta/eps is large). The high-purity coefficient
// B_HP = 8(1-p)^2 is the default; the full B is available for sensitivity checks.
#pragma once

#include <span>
#include <vector>

#include "qpure/errors.hpp"

namespace qpure {

struct MtfpConfig {
    double epsilon;      // absorbing boundary at p = 1 - epsilon
    double delta = 0.0;  // detector inefficiency
    double p0 = 0.5;     // initial purity
    double rel_tol = 1e-6;
    int n0 = 2000;            // initial mesh nodes; doubled until converged
    int max_doublings = 13;

    void validate() const;
};

// ln psi_HP(x, 1-delta) = (x - 1/2) [1 - delta/((1-x)(1-delta))] - ln(2(1-x))/(1-delta).
double log_psi_hp(double x, double delta);

// ln psi for the full coefficient B, with base point p = 3/4 (the potential integral
// from 1/2 diverges for full B; only ratios enter the result).
double log_psi_full(double x, double delta);

// ln T and T with the high-purity coefficient.
double log_mtfp(const MtfpConfig& cfg);
double mtfp_quadrature(const MtfpConfig& cfg);

// Full-B sensitivity mode.
double log_mtfp_full_b(const MtfpConfig& cfg);
double mtfp_full_b(const MtfpConfig& cfg);

struct IdealConstantFit {
    double constant;      // c in 8 T = slope ln(1/eps) + c
    double slope;
    double max_residual;
    std::vector<double> epsilons, values;
};

// Fits 8 T(0, eps) = slope ln(1/eps) + c over the ladder (default 1e-3 .. 1e-7).
// Requires every eps <= 1e-3 (asymptotic regime); residuals above 0.02 throw.
IdealConstantFit mtfp_ideal_constant(std::span<const double> eps_list = {});

struct ScalingPoint {
    double a;             // delta / epsilon
    double epsilon;
    double log_delta_T;   // ln [T(a eps, eps) - T(0, eps)]; -inf at a = 0
    double delta_T;       // exp of the above (inf when beyond double range)
    double c1;            // local exponent d ln dT / da; NaN unless computed
};

// dT(a) = T(a eps, eps) - T(0, eps), formed in log space.
ScalingPoint delta_T(double a, double eps);

// Centered difference of ln dT with step max(1, 0.05 a); requires a >= 10.
double local_exponent(double a, double eps);

// All points behind the scaling figures: dT(a) per epsilon, plus the local
// exponent where a >= 10. Rows ordered by (epsilon, a); computed in parallel.
std::vector<ScalingPoint> scaling_study(std::span<const double> eps_list,
                                        std::span<const double> a_grid, int workers = 0,
                                        bool with_exponent = true);

}  // namespace qpure
