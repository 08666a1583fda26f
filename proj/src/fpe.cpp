// SPDX-License-Identifier: Apache-2.0
#include "qpure/fpe.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qpure {

FpeCoeffs fpe_coeffs(double p, double eta) {
    if (!(p >= 0.5 && p <= 1.0)) throw domain_error("fpe_coeffs: p must be in [1/2, 1]");
    if (!(eta > 0.0 && eta <= 1.0)) throw domain_error("fpe_coeffs: eta must be in (0, 1]");
    const double s = 1.0 - p;
    return {2.0 * (1.0 - (2.0 * p - 1.0) / eta + 2.0 * s * s),
            8.0 * (2.0 * p - 1.0) * s * s,
            8.0 * s * s};
}

DensityGrid::DensityGrid(const GridSpec& spec) {
    if (spec.cells < 8) throw domain_error("grid needs at least 8 cells");
    if (!(spec.eps_grid > 0.0 && spec.eps_grid < 0.5)) {
        throw domain_error("eps_grid must be in (0, 1/2)");
    }
    u_min_ = std::log(2.0 * spec.eps_grid);
    du_ = -u_min_ / spec.cells;
    q_.assign(static_cast<std::size_t>(spec.cells), 0.0);
}

double DensityGrid::mass() const {
    double m = 0.0;
    for (double v : q_) m += v;
    return m * du_;
}

void DensityGrid::normalize() {
    const double m = mass();
    if (!(m > 0.0)) throw numeric_error("density has no mass to normalize");
    for (double& v : q_) v /= m;
}

DensityGrid delta_density(const GridSpec& spec, double p0) {
    if (!(p0 >= 0.5 && p0 < 1.0)) throw domain_error("p0 must be in [1/2, 1)");
    DensityGrid g(spec);
    const double u0 = std::log(2.0 * (1.0 - p0));
    const double u_min = std::log(2.0 * spec.eps_grid);
    const double du = -u_min / spec.cells;
    int i0 = static_cast<int>(std::lround((u0 - u_min) / du - 0.5));
    i0 = std::clamp(i0, 1, spec.cells - 1);
    g.values()[static_cast<std::size_t>(i0) - 1] = 1.0;
    g.values()[static_cast<std::size_t>(i0)] = 1.0;
    g.normalize();
    return g;
}

DensityGrid stationary_distribution(double eta, const GridSpec& spec) {
    if (!(eta > 0.0 && eta < 1.0)) {
        throw domain_error(
            "stationary distribution exists as a density only for eta < 1 "
            "(eta = 1 concentrates at p = 1)");
    }
    DensityGrid g(spec);
    const double delta = 1.0 - eta;
    std::vector<double> lw(static_cast<std::size_t>(spec.cells));
    double mx = -HUGE_VAL;
    for (int i = 0; i < spec.cells; ++i) {
        const double u = g.u_center(i);
        const double s = 0.5 * std::exp(u);
        const double p = 1.0 - s;
        // ln [ sqrt(2p-1)/(1-p)^3 exp(-(2p-1) delta / (2 (1-p) eta)) * e^u/2 ]
        const double l = 0.5 * std::log(std::max(2.0 * p - 1.0, 1e-300)) - 3.0 * std::log(s) -
                         (2.0 * p - 1.0) * delta / (2.0 * s * eta) + u - std::log(2.0);
        lw[static_cast<std::size_t>(i)] = l;
        mx = std::max(mx, l);
    }
    for (int i = 0; i < spec.cells; ++i) {
        g.values()[static_cast<std::size_t>(i)] = std::exp(lw[static_cast<std::size_t>(i)] - mx);
    }
    g.normalize();
    return g;
}

namespace {

// Face coefficients of the Chang-Cooper flux
//   J_{j+1/2} = V [ (1-lam) Q_j + lam Q_{j+1} ] - D (Q_{j+1} - Q_j)/du,
// with lam = 1/w - 1/expm1(w), w = V du / D: the zero-flux profile then satisfies
// Q_{j+1}/Q_j = e^w, the discrete Gibbs ratio, which preserves the stationary
// solution and positivity.
struct FaceCoeffs {
    std::vector<double> fa, fb;  // J = fa Q_j + fb Q_{j+1}
    double max_v = 0.0, max_d = 0.0;
};

FaceCoeffs face_coeffs(const DensityGrid& g, double eta) {
    const int n = g.cells();
    const double du = g.du();
    FaceCoeffs fc;
    fc.fa.resize(static_cast<std::size_t>(n) - 1);
    fc.fb.resize(static_cast<std::size_t>(n) - 1);
    const double delta = 1.0 - eta;
    for (int j = 0; j + 1 < n; ++j) {
        const double u = g.u_center(j) + 0.5 * du;  // face between cells j, j+1
        const double s = 0.5 * std::exp(u);
        // Ito transform of the purity FPE to u = ln(2(1-p)):
        //   A_u = 2 [ delta/(eta s) + 2 s ] - 4 (1 + 1/eta),  D = B_u/2 = 4 (1 - 2s),
        //   V = A_u - dD/du = A_u + 8 s.
        const double a_u = 2.0 * (delta / (eta * s) + 2.0 * s) - 4.0 * (1.0 + 1.0 / eta);
        const double v = a_u + 8.0 * s;
        const double d = 4.0 * (1.0 - 2.0 * s);
        const double w = v * du / d;
        double lam;
        if (std::abs(w) < 1e-8) {
            lam = 0.5 - w / 12.0;
        } else if (w > 700.0) {
            lam = 1.0 / w;
        } else if (w < -700.0) {
            lam = 1.0 + 1.0 / w;
        } else {
            lam = 1.0 / w - 1.0 / std::expm1(w);
        }
        fc.fa[static_cast<std::size_t>(j)] = v * (1.0 - lam) + d / du;
        fc.fb[static_cast<std::size_t>(j)] = v * lam - d / du;
        fc.max_v = std::max(fc.max_v, std::abs(v));
        fc.max_d = std::max(fc.max_d, d);
    }
    return fc;
}

// Thomas solve of the implicit system (I + dt L) Q' = Q, L from the flux divergence.
void implicit_steps(DensityGrid& g, const FaceCoeffs& fc, double dt, long long steps) {
    const int n = g.cells();
    const double c = dt / g.du();
    std::vector<double> lower(n, 0.0), diag(n, 1.0), upper(n, 0.0);
    for (int j = 0; j + 1 < n; ++j) {
        const double fa = fc.fa[static_cast<std::size_t>(j)];
        const double fb = fc.fb[static_cast<std::size_t>(j)];
        diag[j] += c * fa;       // outflow through the upper face of cell j
        upper[j] += c * fb;
        diag[j + 1] -= c * fb;   // inflow through the lower face of cell j+1
        lower[j + 1] -= c * fa;
    }
    std::vector<double> cp(n, 0.0), dp(n, 0.0);
    auto& q = g.values();
    for (long long s = 0; s < steps; ++s) {
        cp[0] = upper[0] / diag[0];
        dp[0] = q[0] / diag[0];
        for (int i = 1; i < n; ++i) {
            const double m = diag[i] - lower[i] * cp[i - 1];
            cp[i] = upper[i] / m;
            dp[i] = (q[i] - lower[i] * dp[i - 1]) / m;
        }
        q[n - 1] = dp[n - 1];
        for (int i = n - 2; i >= 0; --i) q[i] = dp[i] - cp[i] * q[i + 1];
    }
}

void explicit_steps(DensityGrid& g, const FaceCoeffs& fc, double dt, long long steps) {
    const int n = g.cells();
    const double du = g.du();
    const double cfl = 0.4 * std::min(du * du / (2.0 * std::max(fc.max_d, 1e-30)),
                                      du / std::max(fc.max_v, 1e-30));
    if (dt > cfl) {
        throw numeric_error("explicit FPE step violates the CFL bound: dt = " +
                            std::to_string(dt) + " > " + std::to_string(cfl));
    }
    const double c = dt / du;
    auto& q = g.values();
    std::vector<double> flux(static_cast<std::size_t>(n) - 1);
    for (long long s = 0; s < steps; ++s) {
        for (int j = 0; j + 1 < n; ++j) {
            flux[j] = fc.fa[static_cast<std::size_t>(j)] * q[j] +
                      fc.fb[static_cast<std::size_t>(j)] * q[j + 1];
        }
        q[0] -= c * flux[0];
        for (int j = 1; j + 1 < n; ++j) q[j] -= c * (flux[j] - flux[j - 1]);
        q[n - 1] += c * flux[n - 2];
    }
}

}  // namespace

void evolve_density(DensityGrid& grid, double eta, double t, const EvolveOptions& opt) {
    if (!(eta > 0.0 && eta <= 1.0)) throw domain_error("eta must be in (0, 1]");
    if (!(t >= 0.0)) throw domain_error("evolution time must be >= 0");
    if (t == 0.0) return;
    if (!(opt.dt > 0.0)) throw domain_error("dt must be > 0");
    const double mass0 = grid.mass();
    const auto steps = static_cast<long long>(std::ceil(t / opt.dt - 1e-12));
    const double dt = t / static_cast<double>(steps);
    const FaceCoeffs fc = face_coeffs(grid, eta);
    if (opt.scheme == FpeScheme::Implicit) {
        implicit_steps(grid, fc, dt, steps);
    } else {
        explicit_steps(grid, fc, dt, steps);
    }
    grid.advance_time(t);
    double qmin = 0.0;
    for (double v : grid.values()) qmin = std::min(qmin, v);
    if (qmin < -1e-12) {
        throw numeric_error("negative density " + std::to_string(qmin) + " after evolution");
    }
    if (std::abs(grid.mass() - mass0) > 1e-8 * std::max(1.0, t)) {
        throw numeric_error("FPE mass drift exceeds tolerance");
    }
}

double density_mean_purity(const DensityGrid& grid) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < grid.cells(); ++i) {
        num += grid.p_center(i) * grid.values()[static_cast<std::size_t>(i)];
        den += grid.values()[static_cast<std::size_t>(i)];
    }
    if (!(den > 0.0)) throw numeric_error("density has no mass");
    return num / den;
}

double density_mean_log_s(const DensityGrid& grid) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < grid.cells(); ++i) {
        num += std::log(1.0 - grid.p_center(i)) * grid.values()[static_cast<std::size_t>(i)];
        den += grid.values()[static_cast<std::size_t>(i)];
    }
    return num / den;
}

double l1_distance(const DensityGrid& a, const DensityGrid& b) {
    if (a.cells() != b.cells() || a.du() != b.du()) {
        throw domain_error("l1_distance: grids must match");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        d += std::abs(a.values()[i] - b.values()[i]);
    }
    return d * a.du();
}

double fpe_mean_purity_crossing_time(double eta, double p0, double target, const GridSpec& spec,
                                     double dt, double t_max) {
    DensityGrid g = delta_density(spec, p0);
    double t = 0.0;
    double m_prev = density_mean_purity(g);
    if (m_prev >= target) return 0.0;
    const EvolveOptions opt{.dt = dt, .scheme = FpeScheme::Implicit};
    while (t < t_max) {
        evolve_density(g, eta, dt, opt);
        t += dt;
        const double m = density_mean_purity(g);
        if (m >= target) {
            return t - dt + dt * (target - m_prev) / (m - m_prev);
        }
        m_prev = m;
    }
    throw numeric_error("FPE mean purity did not reach the target by t_max");
}

}  // namespace qpure
