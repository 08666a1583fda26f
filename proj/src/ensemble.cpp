// SPDX-License-Identifier: Apache-2.0
#include "qpure/ensemble.hpp"

#include <cmath>
#include <limits>

#include "qpure/rng.hpp"
#include "qpure/sde.hpp"

namespace qpure {

namespace {

constexpr double kLogSFloor = 1e-16;  // keeps ln(1-p) finite when a state pins to p=1

double log_s(double p) { return std::log(std::max(1.0 - p, kLogSFloor)); }

// Deterministic Jacobs purity map (continuous-feedback limit of the protocol).
struct JacobsMap {
    double p_inf, decay;
    JacobsMap(const DetectorParams& d, double dt) {
        const double eta = d.eta(), delta = d.delta();
        p_inf = (1.0 + 0.5 * delta / eta) / (1.0 + delta / eta);
        decay = std::exp(-2.0 * d.gamma0 * (1.0 + delta / eta) * dt);
    }
    double operator()(double p) const { return p_inf + (p - p_inf) * decay; }
};

BlochVector aligned_to_z(const BlochVector& v) { return {0.0, 0.0, v.r()}; }

BlochVector equatorial_state(const BlochVector& v, double p_new) {
    const double r_new = std::sqrt(std::max(2.0 * p_new - 1.0, 0.0));
    const double rxy = std::hypot(v.x, v.y);
    if (rxy > 0.0) {
        const double f = r_new / rxy;
        return {v.x * f, v.y * f, 0.0};
    }
    return {r_new, 0.0, 0.0};
}

struct CurvePartial {
    std::vector<double> sum_p, sum_p2, sum_ls, sum_ls2;
    explicit CurvePartial(std::size_t n = 0)
        : sum_p(n, 0.0), sum_p2(n, 0.0), sum_ls(n, 0.0), sum_ls2(n, 0.0) {}
    void add(std::size_t k, double p) {
        const double ls = log_s(p);
        sum_p[k] += p;
        sum_p2[k] += p * p;
        sum_ls[k] += ls;
        sum_ls2[k] += ls * ls;
    }
    void merge(const CurvePartial& o) {
        for (std::size_t k = 0; k < sum_p.size(); ++k) {
            sum_p[k] += o.sum_p[k];
            sum_p2[k] += o.sum_p2[k];
            sum_ls[k] += o.sum_ls[k];
            sum_ls2[k] += o.sum_ls2[k];
        }
    }
};

// Steps one trajectory, invoking on_sample(step_index, p) after every step
// (step 0 = initial state). Returns the interpolated first passage, if any.
template <class OnSample>
std::optional<double> run_one(const ProtocolSpec& spec, const BlochVector& v0, double dt,
                              long long n_steps, std::optional<double> threshold,
                              bool full_bloch_iso, RngStream& rng, OnSample&& on_sample) {
    const double sdt = std::sqrt(dt);
    const DetectorParams& d0 = spec.primary();
    std::optional<double> fpt;

    const bool reduced_iso = spec.kind == ProtocolKind::IsotropicThreeDetector && !full_bloch_iso;
    const JacobsMap jacobs(d0, dt);

    BlochVector v = v0;
    v.clamp_to_ball();
    double p = purity(v);
    on_sample(0, p);
    if (threshold && p >= *threshold) return 0.0;

    for (long long step = 1; step <= n_steps; ++step) {
        double p_new;
        switch (spec.kind) {
            case ProtocolKind::ParallelNoFeedback: {
                const NoiseIncrement n{sdt * rng.normal(), dt};
                v = step_single_detector(v, d0, Axis::Z, n);
                p_new = purity(v);
                break;
            }
            case ProtocolKind::WisemanRalphParallel: {
                v = aligned_to_z(v);
                const NoiseIncrement n{sdt * rng.normal(), dt};
                v = step_single_detector(v, d0, Axis::Z, n);
                p_new = purity(v);
                break;
            }
            case ProtocolKind::JacobsPerpendicular: {
                p_new = jacobs(p);
                v = equatorial_state(v, p_new);
                break;
            }
            default: {  // IsotropicThreeDetector
                if (reduced_iso) {
                    const NoiseIncrement n{sdt * rng.normal(), dt};
                    p_new = step_purity_iso(p, d0, n);
                    v = {std::sqrt(std::max(2.0 * p_new - 1.0, 0.0)), 0.0, 0.0};
                } else {
                    const NoiseIncrement3 n{
                        {sdt * rng.normal(), sdt * rng.normal(), sdt * rng.normal()}, dt};
                    v = step_three_detector(v, spec.detectors, n);
                    p_new = purity(v);
                }
                break;
            }
        }
        if (threshold && !fpt && p_new >= *threshold) {
            const double f = (*threshold - p) / (p_new - p);
            fpt = (static_cast<double>(step) - 1.0 + f) * dt;
        }
        p = p_new;
        on_sample(step, p);
    }
    return fpt;
}

}  // namespace

EnsembleResult run_ensemble(const EnsembleRequest& req) {
    EnsembleResult out;
    out.n_traj = req.n_traj;
    const int points = req.output_points;
    if (req.n_traj < 0) throw domain_error("n_traj must be >= 0");
    if (req.n_traj == 0) return out;

    const auto n_steps = static_cast<long long>(std::llround(req.horizon / req.dt));
    std::vector<long long> sample_steps;
    if (points > 0) {
        out.t_grid.resize(points);
        sample_steps.resize(points);
        for (int k = 0; k < points; ++k) {
            const double frac = points == 1 ? 1.0 : static_cast<double>(k) / (points - 1);
            sample_steps[k] = static_cast<long long>(std::llround(frac * n_steps));
            out.t_grid[k] = static_cast<double>(sample_steps[k]) * req.dt;
        }
    }
    if (req.fpt_threshold) {
        out.fpt.assign(static_cast<std::size_t>(req.n_traj),
                       std::numeric_limits<double>::quiet_NaN());
    }

    const int workers = req.workers > 0 ? req.workers : hardware_workers();
    auto body = [&](std::int64_t i, CurvePartial& acc) {
        RngStream rng(req.seed, static_cast<std::uint64_t>(i));
        std::size_t next = 0;
        auto on_sample = [&](long long step, double p) {
            while (next < sample_steps.size() && sample_steps[next] == step) {
                acc.add(next, p);
                ++next;
            }
        };
        auto fpt = run_one(req.protocol, req.v0, req.dt, n_steps, req.fpt_threshold,
                           req.full_bloch_iso, rng, on_sample);
        if (req.fpt_threshold && fpt) out.fpt[static_cast<std::size_t>(i)] = *fpt;
    };
    auto merge = [](CurvePartial& a, const CurvePartial& b) { a.merge(b); };

    const CurvePartial zero(static_cast<std::size_t>(points));
    const CurvePartial total = req.serial_reference
                                   ? run_chunked_serial(req.n_traj, zero, body, merge)
                                   : run_chunked(req.n_traj, workers, zero, body, merge);

    const auto n = static_cast<double>(req.n_traj);
    out.mean_p.assign(points, 0.0);
    out.se_p.assign(points, 0.0);
    out.mean_log_s.assign(points, 0.0);
    out.se_log_s.assign(points, 0.0);
    for (int k = 0; k < points; ++k) {
        const double mp = total.sum_p[k] / n;
        const double ml = total.sum_ls[k] / n;
        out.mean_p[k] = mp;
        out.mean_log_s[k] = ml;
        if (req.n_traj > 1) {
            const double vp = std::max(total.sum_p2[k] - n * mp * mp, 0.0) / (n - 1.0);
            const double vl = std::max(total.sum_ls2[k] - n * ml * ml, 0.0) / (n - 1.0);
            out.se_p[k] = std::sqrt(vp / n);
            out.se_log_s[k] = std::sqrt(vl / n);
        }
    }
    if (req.fpt_threshold) {
        double sum = 0.0, sum2 = 0.0;
        std::int64_t m = 0;
        for (double f : out.fpt) {
            if (std::isnan(f)) {
                ++out.n_censored;
            } else {
                sum += f;
                sum2 += f * f;
                ++m;
            }
        }
        if (m > 0) out.fpt_mean = sum / static_cast<double>(m);
        if (m > 1) {
            const double var =
                std::max(sum2 - static_cast<double>(m) * out.fpt_mean * out.fpt_mean, 0.0) /
                (static_cast<double>(m) - 1.0);
            out.fpt_std = std::sqrt(var);
            out.fpt_se = out.fpt_std / std::sqrt(static_cast<double>(m));
        }
    }
    return out;
}

std::vector<double> ensemble_terminal_purity(const EnsembleRequest& req) {
    std::vector<double> terminal(static_cast<std::size_t>(req.n_traj), 0.0);
    const auto n_steps = static_cast<long long>(std::llround(req.horizon / req.dt));
    const int workers = req.workers > 0 ? req.workers : hardware_workers();
    auto body = [&](std::int64_t i, int&) {
        RngStream rng(req.seed, static_cast<std::uint64_t>(i));
        double last = 0.0;
        auto on_sample = [&](long long, double p) { last = p; };
        run_one(req.protocol, req.v0, req.dt, n_steps, std::nullopt, req.full_bloch_iso, rng,
                on_sample);
        terminal[static_cast<std::size_t>(i)] = last;
    };
    auto merge = [](int&, const int&) {};
    if (req.serial_reference) {
        run_chunked_serial(req.n_traj, 0, body, merge);
    } else {
        run_chunked(req.n_traj, workers, 0, body, merge);
    }
    return terminal;
}

MtfpMcResult mtfp_monte_carlo(ProtocolKind kind, const DetectorParams& d, double eps, double p0,
                              std::int64_t n, double dt, std::uint64_t seed, int workers,
                              double censor_horizon) {
    if (!(eps > 0.0 && eps < 0.5)) throw domain_error("eps must be in (0, 1/2)");
    if (!(p0 >= 0.5 && p0 < 1.0 - eps)) throw domain_error("p0 must be in [1/2, 1-eps)");
    const double threshold = 1.0 - eps;
    const double horizon = censor_horizon > 0.0 ? censor_horizon : 400.0 / d.gamma0;
    const auto n_steps = static_cast<long long>(std::llround(horizon / dt));
    const double sdt = std::sqrt(dt);

    MtfpMcResult out;
    out.n = n;
    out.fpt.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::quiet_NaN());

    auto body = [&](std::int64_t i, int&) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        double fpt = std::numeric_limits<double>::quiet_NaN();
        switch (kind) {
            case ProtocolKind::IsotropicThreeDetector: {
                double p = p0;
                for (long long k = 0; k < n_steps; ++k) {
                    const double pn = step_purity_iso(p, d, {sdt * rng.normal(), dt});
                    if (pn >= threshold) {
                        fpt = (static_cast<double>(k) + (threshold - p) / (pn - p)) * dt;
                        break;
                    }
                    p = pn;
                }
                break;
            }
            case ProtocolKind::WisemanRalphParallel:
            case ProtocolKind::ParallelNoFeedback: {
                // diagonal dynamics: driftless z-diffusion, purity (1+z^2)/2
                double z = std::sqrt(std::max(2.0 * p0 - 1.0, 0.0));
                const double sq = std::sqrt(2.0 * d.gamma0);
                double p = p0;
                for (long long k = 0; k < n_steps; ++k) {
                    double zn = z + (1.0 - z * z) * sq * sdt * rng.normal();
                    zn = std::clamp(zn, -1.0, 1.0);
                    const double pn = 0.5 * (1.0 + zn * zn);
                    if (pn >= threshold) {
                        fpt = (static_cast<double>(k) + (threshold - p) / (pn - p)) * dt;
                        break;
                    }
                    z = zn;
                    p = pn;
                }
                break;
            }
            case ProtocolKind::JacobsPerpendicular: {
                const JacobsMap map(d, dt);
                if (map.p_inf <= threshold) break;  // level unattainable: censored
                double p = p0;
                for (long long k = 0; k < n_steps; ++k) {
                    const double pn = map(p);
                    if (pn >= threshold) {
                        fpt = (static_cast<double>(k) + (threshold - p) / (pn - p)) * dt;
                        break;
                    }
                    p = pn;
                }
                break;
            }
        }
        out.fpt[static_cast<std::size_t>(i)] = fpt;
    };
    auto merge = [](int&, const int&) {};
    run_chunked(n, workers > 0 ? workers : hardware_workers(), 0, body, merge);

    double sum = 0.0, sum2 = 0.0;
    std::int64_t m = 0;
    for (double f : out.fpt) {
        if (std::isnan(f)) {
            ++out.censored;
        } else {
            sum += f;
            sum2 += f * f;
            ++m;
        }
    }
    if (m > 0) out.mean = sum / static_cast<double>(m);
    if (m > 1) {
        const double var = std::max(sum2 - static_cast<double>(m) * out.mean * out.mean, 0.0) /
                           (static_cast<double>(m) - 1.0);
        out.sd = std::sqrt(var);
        out.se = out.sd / std::sqrt(static_cast<double>(m));
    }
    return out;
}

StationaryMcResult stationary_purity_monte_carlo(const DetectorParams& d, std::int64_t n,
                                                 double dt, double t_burn, double t_end,
                                                 double sample_dt, std::uint64_t seed,
                                                 int workers) {
    if (!(t_end > t_burn)) throw domain_error("t_end must exceed t_burn");
    const auto n_steps = static_cast<long long>(std::llround(t_end / dt));
    const auto burn_steps = static_cast<long long>(std::llround(t_burn / dt));
    const auto stride = std::max<long long>(1, std::llround(sample_dt / dt));
    const double sdt = std::sqrt(dt);

    struct Partial {
        double sum = 0.0, sum2 = 0.0;
        std::int64_t traj = 0, samples = 0;
    };
    auto body = [&](std::int64_t i, Partial& acc) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        double p = 0.5;
        double local = 0.0;
        std::int64_t cnt = 0;
        for (long long k = 1; k <= n_steps; ++k) {
            p = step_purity_iso(p, d, {sdt * rng.normal(), dt});
            if (k >= burn_steps && (k - burn_steps) % stride == 0) {
                local += p;
                ++cnt;
            }
        }
        acc.sum += local / static_cast<double>(cnt);
        acc.sum2 += (local / static_cast<double>(cnt)) * (local / static_cast<double>(cnt));
        acc.traj += 1;
        acc.samples += cnt;
    };
    auto merge = [](Partial& a, const Partial& b) {
        a.sum += b.sum;
        a.sum2 += b.sum2;
        a.traj += b.traj;
        a.samples += b.samples;
    };
    const Partial total =
        run_chunked(n, workers > 0 ? workers : hardware_workers(), Partial{}, body, merge);

    StationaryMcResult out;
    out.n_samples = total.samples;
    const auto m = static_cast<double>(total.traj);
    out.mean_p = total.sum / m;
    if (total.traj > 1) {
        const double var = std::max(total.sum2 - m * out.mean_p * out.mean_p, 0.0) / (m - 1.0);
        out.se = std::sqrt(var / m);
    }
    return out;
}

}  // namespace qpure
