// SPDX-License-Identifier: Apache-2.0
#include "qpure/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "qpure/errors.hpp"
#include "qpure/rng.hpp"

namespace qpure {

PovmKernel::PovmKernel(double gamma0_, double tau_) : gamma0(gamma0_), tau(tau_) {
    if (!(gamma0 > 0.0)) throw domain_error("PovmKernel: gamma0 must be > 0");
    if (!(tau > 0.0)) throw domain_error("PovmKernel: tau must be > 0");
}

double PovmKernel::log_likelihood(double mu, int x) const {
    const double k = strength();
    const double dev = mu - static_cast<double>(x);
    return 0.5 * std::log(k / M_PI) - dev * dev * k;
}

void BayesState::validate() const {
    if (!(rho11 >= 0.0 && rho11 <= 1.0)) {
        throw domain_error("BayesState: rho11 must be in [0, 1]");
    }
    if (std::norm(rho12) > rho11 * rho22() + 1e-12) {
        throw domain_error("BayesState: |rho12|^2 exceeds rho11 rho22");
    }
}

BayesState povm_update(const BayesState& state, double mu, const PovmKernel& kernel,
                       const DetectorParams& d) {
    state.validate();
    const double lw1 = kernel.log_likelihood(mu, +1);
    const double lw2 = kernel.log_likelihood(mu, -1);
    // log-space Bayes rule; the shared max keeps the exponentials in range
    const double a1 = state.rho11 > 0.0 ? std::log(state.rho11) + lw1 : -HUGE_VAL;
    const double a2 = state.rho22() > 0.0 ? std::log(state.rho22()) + lw2 : -HUGE_VAL;
    const double m = std::max(a1, a2);
    if (!std::isfinite(m)) throw numeric_error("povm_update: zero outcome density");
    const double e1 = std::exp(a1 - m);
    const double e2 = std::exp(a2 - m);
    const double norm = e1 + e2;

    BayesState out;
    out.rho11 = e1 / norm;
    const double r22_new = e2 / norm;
    if (state.rho11 > 0.0 && state.rho22() > 0.0) {
        out.rho12 = state.rho12 *
                    std::sqrt(out.rho11 * r22_new / (state.rho11 * state.rho22())) *
                    std::exp(-d.gamma * kernel.tau);
    } else {
        out.rho12 = 0.0;
    }
    return out;
}

double outcome_density(const PovmKernel& kernel, double rho11, double mu) {
    const double g1 = std::exp(kernel.log_likelihood(mu, +1));
    const double g2 = std::exp(kernel.log_likelihood(mu, -1));
    return rho11 * g1 + (1.0 - rho11) * g2;
}

namespace {
// integration window [-1-8 sigma, 1+8 sigma]; the tail remainder is below 1e-14
double mu_window(const PovmKernel& kernel) {
    return 1.0 + 8.0 * std::sqrt(kernel.variance());
}
}  // namespace

double outcome_density_integral(const PovmKernel& kernel, double rho11) {
    const double L = mu_window(kernel);
    auto f = [&](double mu) { return outcome_density(kernel, rho11, mu); };
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, -L, L, 12, 1e-12, &err);
    if (err > 1e-10) {
        throw numeric_error("outcome density quadrature did not converge: err = " +
                            std::to_string(err));
    }
    return v;
}

double mean_purity_parallel_exact(double p0, double tau, double gamma0) {
    if (!(p0 >= 0.5 && p0 <= 1.0)) throw domain_error("p0 must be in [1/2, 1]");
    if (!(tau >= 0.0)) throw domain_error("tau must be >= 0");
    if (tau == 0.0) return p0;
    if (p0 == 1.0) return 1.0;
    const PovmKernel kernel(gamma0, tau);
    const double k = kernel.strength();
    const double z0 = std::sqrt(2.0 * p0 - 1.0);
    const double a0 = std::atanh(std::min(z0, 1.0 - 1e-16));
    const double L = mu_window(kernel);
    // diagonal start: z(mu) = tanh(2 k mu + atanh z0), p = (1+z^2)/2
    auto f = [&](double mu) {
        const double z = std::tanh(2.0 * k * mu + a0);
        return outcome_density(kernel, (1.0 + z0) / 2.0, mu) * 0.5 * (1.0 + z * z);
    };
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, -L, L, 13, 1e-10, &err);
    if (err > 1e-8) {
        throw numeric_error("mean-purity quadrature did not converge: achieved err = " +
                            std::to_string(err));
    }
    return v;
}

double parallel_time_to_mean_purity(double eps, double p0, double gamma0) {
    if (!(eps > 0.0 && eps < 0.5)) throw domain_error("eps must be in (0, 1/2)");
    const double target = 1.0 - eps;
    if (p0 >= target) return 0.0;
    auto g = [&](double tau) { return mean_purity_parallel_exact(p0, tau, gamma0) - target; };
    double lo = 0.125 / gamma0, hi = 2.0 / gamma0;
    while (g(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6 / gamma0) throw numeric_error("mean purity never reaches target");
    }
    auto stop = [](double a, double b) { return std::abs(a - b) < 1e-9; };
    const auto r = boost::math::tools::bisect(g, lo, hi, stop);
    return 0.5 * (r.first + r.second);
}

EquivalenceReport sde_povm_equivalence_check(double z0, double tau, double dt, int n_seeds,
                                             std::uint64_t seed, double eta, double c_tol) {
    if (!(z0 >= -1.0 && z0 <= 1.0)) throw domain_error("z0 must be in [-1, 1]");
    if (!(tau > 0.0) || !(dt > 0.0) || n_seeds <= 0) {
        throw domain_error("equivalence check: need tau > 0, dt > 0, seeds > 0");
    }
    const DetectorParams d = DetectorParams::from_eta(eta, 1.0);
    const PovmKernel kernel(d.gamma0, tau);
    const int n0 = std::max(1, static_cast<int>(std::llround(tau / dt)));
    const double sq = std::sqrt(2.0 * d.gamma0);

    // Euler-Maruyama keeps an O(sqrt(dt)) chi-square residual in atanh(z) that the
    // Milstein correction cancels; the pass bound uses Milstein, the convergence
    // ladder uses plain EM so the order-1/2 signature stays visible.
    auto gap_for = [&](const std::vector<double>& dw, bool milstein) {
        const double h = tau / static_cast<double>(dw.size());
        double z = z0, record = 0.0;
        for (double w : dw) {
            record += z * h + w / sq;
            const double om = 1.0 - z * z;
            double zn = z + om * sq * w;
            if (milstein) zn -= 2.0 * d.gamma0 * z * om * (w * w - h);
            z = std::clamp(zn, -1.0, 1.0);
        }
        const double mu = record / tau;
        BayesState st;
        st.rho11 = 0.5 * (1.0 + z0);
        const double zp = povm_update(st, mu, kernel, d).z();
        return std::abs(z - zp);
    };

    EquivalenceReport rep;
    rep.dt = dt;
    rep.tau = tau;
    rep.seeds = n_seeds;

    std::vector<double> gaps(n_seeds);
    std::vector<std::vector<double>> ladder(3);
    for (int i = 0; i < n_seeds; ++i) {
        BrownianPath path(seed, static_cast<std::uint64_t>(i), n0, tau);
        gaps[i] = gap_for(path.increments(), /*milstein=*/true);
        ladder[0].push_back(gap_for(path.increments(), false));
        path.refine();
        ladder[1].push_back(gap_for(path.increments(), false));
        path.refine();
        ladder[2].push_back(gap_for(path.increments(), false));
    }
    auto median = [](std::vector<double> v) {
        std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
        return v[v.size() / 2];
    };
    rep.max_gap = *std::max_element(gaps.begin(), gaps.end());
    rep.median_gap = median(gaps);
    double h = dt;
    double c = 0.0;
    for (auto& lvl : ladder) {
        rep.ladder_median.push_back(median(lvl));
        c = std::max(c, median(lvl) / std::sqrt(h));
        h *= 0.5;
    }
    rep.calibration_c = c;
    rep.tolerance = c_tol * std::sqrt(dt);
    rep.pass = rep.max_gap <= rep.tolerance;
    return rep;
}

}  // namespace qpure
