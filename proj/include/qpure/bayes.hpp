// SPDX-License-Identifier: Apache-2.0
//
// Exact finite-time quantum-Bayes update for a single commuting measurement, the
// outcome distribution, and quadrature for the exact mean purity of the parallel
// no-feedback protocol.
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qpure/detector.hpp"

namespace qpure {

// Gaussian measurement kernel for a time-averaged record mu over a window tau:
// P(mu|i) = sqrt(G0 tau / pi) exp[-(mu - x_i)^2 G0 tau], eigenvalues x_i = +-1.
struct PovmKernel {
    double gamma0;
    double tau;

    PovmKernel(double gamma0_, double tau_);

    [[nodiscard]] double strength() const { return gamma0 * tau; }
    [[nodiscard]] double variance() const { return 0.5 / strength(); }
    // log P(mu|i) for eigenvalue x = +1 or -1
    [[nodiscard]] double log_likelihood(double mu, int x) const;
};

struct BayesState {
    double rho11 = 0.5;
    std::complex<double> rho12 = 0.0;

    [[nodiscard]] double rho22() const { return 1.0 - rho11; }
    [[nodiscard]] double z() const { return 2.0 * rho11 - 1.0; }
    [[nodiscard]] double purity() const {
        return rho11 * rho11 + rho22() * rho22() + 2.0 * std::norm(rho12);
    }
    void validate() const;
};

// Bayes update for the record mu: diagonal elements by likelihood ratio, coherence
// by the geometric-mean rule times exp(-gamma tau) for an inefficient detector.
BayesState povm_update(const BayesState& state, double mu, const PovmKernel& kernel,
                       const DetectorParams& d);

// Outcome density P(mu) = rho11 P(mu|+1) + rho22 P(mu|-1).
double outcome_density(const PovmKernel& kernel, double rho11, double mu);
// Quadrature of the outcome density over the real line (normalization check).
double outcome_density_integral(const PovmKernel& kernel, double rho11);

// Exact <p(tau)> for the parallel no-feedback measurement from a state diagonal in
// the measurement basis with purity p0, by adaptive quadrature over mu (abs tol 1e-8).
double mean_purity_parallel_exact(double p0, double tau, double gamma0 = 1.0);

// Smallest tau with <p(tau)> = 1 - eps (bisection on the monotone curve).
double parallel_time_to_mean_purity(double eps, double p0 = 0.5, double gamma0 = 1.0);

struct EquivalenceReport {
    double dt = 0.0;
    double tau = 0.0;
    int seeds = 0;
    double max_gap = 0.0;
    double median_gap = 0.0;
    double tolerance = 0.0;        // C * sqrt(dt)
    double calibration_c = 0.0;    // median_gap / sqrt(dt) over the dt ladder
    std::vector<double> ladder_median;  // median gap at dt, dt/2, dt/4
    bool pass = false;
};

// Integrates the single-detector SDE (diagonal start z0) while accumulating the
// time-averaged record mu, then compares the SDE endpoint with the POVM update for
// that mu. The pass bound max_gap <= c_tol*sqrt(dt) is evaluated with the
// Milstein-corrected step (plain EM keeps an O(sqrt(dt)) chi-square residual in
// atanh z whose seed maximum violates any such bound); the dt ladder refines the
// same noise paths by Brownian bridge and uses plain EM, exposing the order-1/2
// median-gap decay.
EquivalenceReport sde_povm_equivalence_check(double z0, double tau, double dt, int n_seeds,
                                             std::uint64_t seed, double eta = 1.0,
                                             double c_tol = 1.6);

}  // namespace qpure
