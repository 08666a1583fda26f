// SPDX-License-Identifier: Apache-2.0
#include "qpure/mtfp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "qpure/ensemble.hpp"  // run_chunked for the scaling study

namespace qpure {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453;
}  // namespace

void MtfpConfig::validate() const {
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw domain_error("epsilon must be in (0, 1/2)");
    if (!(delta >= 0.0 && delta < 1.0)) throw domain_error("delta must be in [0, 1)");
    if (!(p0 >= 0.5 && p0 < 1.0 - epsilon)) throw domain_error("p0 must be in [1/2, 1-eps)");
    if (!(rel_tol > 0.0) || n0 < 64) throw domain_error("bad quadrature controls");
}

double log_psi_hp(double x, double delta) {
    if (!(x >= 0.5 && x < 1.0)) throw domain_error("psi_HP domain is [1/2, 1)");
    const double eta = 1.0 - delta;
    const double f = 1.0 - delta / ((1.0 - x) * eta);
    return (x - 0.5) * f - std::log(2.0 * (1.0 - x)) / eta;
}

double log_psi_full(double x, double delta) {
    if (!(x > 0.5 && x < 1.0)) throw domain_error("psi_full domain is (1/2, 1)");
    const double eta = 1.0 - delta;
    const double w = 2.0 * x - 1.0;
    const double s = 1.0 - x;
    return 1.5 * std::log(2.0 * w) - std::log(4.0 * s) - 0.5 * (delta / eta) * (1.0 / s - 4.0);
}

namespace {

// ln[(e^d - 1)/d]: the exact segment factor for a log-linear integrand.
double log_phi(double d) {
    if (std::abs(d) < 1e-12) return 0.5 * d;
    if (d > 0.0) return d + std::log1p(-std::exp(-d)) - std::log(d);
    return std::log(-std::expm1(d)) - std::log(-d);
}

double logsumexp2(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

struct Mesh {
    std::vector<double> u;  // ascending from ln(2 eps) to 0
    std::size_t outer_end;  // outer integral covers segments [0, outer_end)
};

Mesh build_mesh(double eps, double p0, int n) {
    Mesh m;
    const double lo = std::log(2.0 * eps);
    if (p0 == 0.5) {
        m.u.resize(static_cast<std::size_t>(n) + 1);
        const double h = -lo / n;
        for (int i = 0; i <= n; ++i) m.u[static_cast<std::size_t>(i)] = lo + i * h;
        m.u.back() = 0.0;
        m.outer_end = static_cast<std::size_t>(n);
        return m;
    }
    const double mid = std::log(2.0 * (1.0 - p0));
    const double frac = (mid - lo) / (0.0 - lo);
    const int n1 = std::max(8, static_cast<int>(std::lround(frac * n)));
    const int n2 = std::max(8, n - n1);
    m.u.reserve(static_cast<std::size_t>(n1 + n2) + 1);
    for (int i = 0; i <= n1; ++i) m.u.push_back(lo + (mid - lo) * i / n1);
    for (int i = 1; i <= n2; ++i) m.u.push_back(mid + (0.0 - mid) * i / n2);
    m.u.back() = 0.0;
    m.outer_end = static_cast<std::size_t>(n1);
    return m;
}

// ln of the inner integrand psi/B transformed to the u measure.
double inner_log_integrand(double u, double delta, bool full) {
    if (full) {
        // psi_full/B * |dz/du| = exp(0.5 ln w - 2u - 1.5 ln2 - (delta/2eta)(2 e^-u - 4))
        const double w = -std::expm1(u);
        if (w <= 0.0) return kNegInf;  // u = 0 corner, handled by the endpoint rule
        const double eta = 1.0 - delta;
        return 0.5 * std::log(w) - 2.0 * u - 1.5 * kLn2 -
               0.5 * (delta / eta) * (2.0 * std::exp(-u) - 4.0);
    }
    const double x = 1.0 - 0.5 * std::exp(u);
    return log_psi_hp(x, delta) - u - std::log(4.0);
}

double outer_log_psi(double u, double delta, bool full) {
    const double x = 1.0 - 0.5 * std::exp(u);
    return full ? log_psi_full(x, delta) : log_psi_hp(x, delta);
}

double log_mtfp_mesh(double delta, double eps, double p0, int n, bool full) {
    const Mesh mesh = build_mesh(eps, p0, n);
    const std::size_t m = mesh.u.size();

    std::vector<double> g(m), lp(m);
    for (std::size_t i = 0; i < m; ++i) {
        g[i] = inner_log_integrand(mesh.u[i], delta, full);
        lp[i] = (full && mesh.u[i] == 0.0) ? kNegInf : outer_log_psi(mesh.u[i], delta, full);
    }

    // inner cumulative I(u_i) = int_{u_i}^{0} e^{g} du, log-linear segment rule;
    // the final full-B segment carries the integrable sqrt endpoint analytically.
    std::vector<double> log_inner(m, kNegInf);
    double acc = kNegInf;
    for (std::size_t i = m - 1; i-- > 0;) {
        const double h = mesh.u[i + 1] - mesh.u[i];
        double seg;
        if (full && i == m - 2) {
            seg = g[i] + std::log(2.0 * h / 3.0);
        } else {
            seg = g[i] + std::log(h) + log_phi(g[i + 1] - g[i]);
        }
        acc = logsumexp2(acc, seg);
        log_inner[i] = acc;
    }

    // outer integrand H = -ln psi + u + ln I; at the u=0 corner of the full-B mode
    // the product has the finite limit 1/6.
    std::vector<double> H(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (full && i == m - 1) {
            H[i] = std::log(1.0 / 6.0);
        } else if (log_inner[i] == kNegInf) {
            H[i] = kNegInf;
        } else {
            H[i] = -lp[i] + mesh.u[i] + log_inner[i];
        }
    }

    double total = kNegInf;
    for (std::size_t i = 0; i < mesh.outer_end; ++i) {
        const double h = mesh.u[i + 1] - mesh.u[i];
        double seg;
        if (H[i + 1] == kNegInf) {
            seg = H[i] + std::log(h) - kLn2;  // linear decay into the empty corner
        } else {
            seg = H[i] + std::log(h) + log_phi(H[i + 1] - H[i]);
        }
        total = logsumexp2(total, seg);
    }
    return total;
}

double log_mtfp_converged(const MtfpConfig& cfg, bool full) {
    cfg.validate();
    int n = cfg.n0;
    double prev = log_mtfp_mesh(cfg.delta, cfg.epsilon, cfg.p0, n, full);
    for (int k = 0; k < cfg.max_doublings; ++k) {
        n *= 2;
        const double cur = log_mtfp_mesh(cfg.delta, cfg.epsilon, cfg.p0, n, full);
        if (std::abs(cur - prev) < cfg.rel_tol) return cur;
        prev = cur;
    }
    throw numeric_error("MTFP quadrature did not converge to rel_tol " +
                        std::to_string(cfg.rel_tol) + " by n = " + std::to_string(n));
}

}  // namespace

double log_mtfp(const MtfpConfig& cfg) { return log_mtfp_converged(cfg, false); }

double mtfp_quadrature(const MtfpConfig& cfg) {
    const double v = std::exp(log_mtfp(cfg));
    if (!std::isfinite(v)) {
        throw numeric_error("MTFP exceeds double range; use log_mtfp for large delta/eps");
    }
    return v;
}

double log_mtfp_full_b(const MtfpConfig& cfg) { return log_mtfp_converged(cfg, true); }

double mtfp_full_b(const MtfpConfig& cfg) {
    const double v = std::exp(log_mtfp_full_b(cfg));
    if (!std::isfinite(v)) {
        throw numeric_error("MTFP exceeds double range; use log_mtfp_full_b");
    }
    return v;
}

IdealConstantFit mtfp_ideal_constant(std::span<const double> eps_list) {
    static constexpr std::array<double, 5> kDefault = {1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
    std::vector<double> eps(eps_list.begin(), eps_list.end());
    if (eps.empty()) eps.assign(kDefault.begin(), kDefault.end());
    if (eps.size() < 2) throw domain_error("ideal-constant fit needs at least two points");
    for (double e : eps) {
        if (e > 1e-3 * (1.0 + 1e-12)) {
            throw domain_error("eps = " + std::to_string(e) +
                               " is outside the asymptotic regime (need eps <= 1e-3)");
        }
    }
    IdealConstantFit fit;
    fit.epsilons = eps;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (double e : eps) {
        const double x = std::log(1.0 / e);
        const double y = 8.0 * mtfp_quadrature({.epsilon = e});
        fit.values.push_back(y);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const auto n = static_cast<double>(eps.size());
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.constant = (sy - fit.slope * sx) / n;
    fit.max_residual = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double pred = fit.slope * std::log(1.0 / eps[i]) + fit.constant;
        fit.max_residual = std::max(fit.max_residual, std::abs(fit.values[i] - pred));
    }
    if (fit.max_residual > 0.02) {
        throw numeric_error("ideal-constant fit inconsistent: max residual " +
                            std::to_string(fit.max_residual));
    }
    return fit;
}

ScalingPoint delta_T(double a, double eps) {
    if (!(a >= 0.0)) throw domain_error("a must be >= 0");
    if (!(eps <= 1e-3)) throw domain_error("scaling requires eps <= 1e-3");
    ScalingPoint pt{a, eps, kNegInf, 0.0, std::numeric_limits<double>::quiet_NaN()};
    if (a == 0.0) return pt;
    const double lt = log_mtfp({.epsilon = eps, .delta = a * eps});
    const double l0 = log_mtfp({.epsilon = eps});
    const double diff = lt - l0;
    if (diff <= 0.0) {
        // dT is analytically positive; tolerate quadrature noise of 1e-9 relative
        if (std::exp(l0) * -std::expm1(diff) > 1e-9) {
            throw numeric_error("negative dT at a = " + std::to_string(a));
        }
        return pt;
    }
    pt.log_delta_T = lt + std::log(-std::expm1(-diff));
    pt.delta_T = std::exp(pt.log_delta_T);
    return pt;
}

double local_exponent(double a, double eps) {
    if (!(a >= 10.0)) throw domain_error("local exponent requires a >= 10");
    const double da = std::max(1.0, 0.05 * a);
    const ScalingPoint hi = delta_T(a + da, eps);
    const ScalingPoint lo = delta_T(a - da, eps);
    if (hi.log_delta_T == kNegInf || lo.log_delta_T == kNegInf) {
        throw domain_error("dT vanished at a stencil point");
    }
    return (hi.log_delta_T - lo.log_delta_T) / (2.0 * da);
}

std::vector<ScalingPoint> scaling_study(std::span<const double> eps_list,
                                        std::span<const double> a_grid, int workers,
                                        bool with_exponent) {
    std::vector<ScalingPoint> rows(eps_list.size() * a_grid.size());
    if (rows.empty()) return rows;
    const auto n_rows = static_cast<std::int64_t>(rows.size());
    const int n_workers = workers > 0 ? workers : hardware_workers();
    std::exception_ptr error;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(n_workers)
#else
    (void)n_workers;
#endif
    for (std::int64_t idx = 0; idx < n_rows; ++idx) {
        try {
            const std::size_t ie = static_cast<std::size_t>(idx) / a_grid.size();
            const std::size_t ia = static_cast<std::size_t>(idx) % a_grid.size();
            ScalingPoint pt = delta_T(a_grid[ia], eps_list[ie]);
            if (with_exponent && a_grid[ia] >= 10.0) {
                pt.c1 = local_exponent(a_grid[ia], eps_list[ie]);
            }
            rows[static_cast<std::size_t>(idx)] = pt;
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical(qpure_scaling_error)
#endif
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return rows;
}

}  // namespace qpure
