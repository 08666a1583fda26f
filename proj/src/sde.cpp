// SPDX-License-Identifier: Apache-2.0
#include "qpure/sde.hpp"

#include <cmath>
#include <string>

namespace qpure {

namespace {

// Chord-motion inflation of EM steps is O(Gamma dt) per step even on the sphere;
// allow a chi-square tail above it, error beyond (signals dt too large).
double overshoot_slack(double max_rate, double dt) {
    return std::max(kRadialSlack, 128.0 * max_rate * dt);
}

BlochVector finish_bloch_step(BlochVector v, double max_rate, double dt) {
    const double r2 = v.r2();
    if (!std::isfinite(r2)) throw numeric_error("non-finite state after SDE step");
    if (r2 > 1.0) {
        const double r = std::sqrt(r2);
        if (r > 1.0 + overshoot_slack(max_rate, dt)) {
            throw overshoot_error("integrator overshoot r = " + std::to_string(r) +
                                  "; dt is too large for this state");
        }
        v.x /= r;
        v.y /= r;
        v.z /= r;
    }
    return v;
}

void check_dt(double dt, double max_rate) {
    if (!(dt > 0.0)) throw domain_error("dt must be > 0");
    if (dt * max_rate > kMaxStepPerRate * (1.0 + 1e-12)) {
        throw domain_error("dt exceeds the hard cap 0.01/Gamma");
    }
}

}  // namespace

BlochVector step_single_detector(const BlochVector& v, const DetectorParams& d, Axis axis,
                                 const NoiseIncrement& n) {
    validate(v);
    check_dt(n.dt, d.total_rate());
    const double g = d.gamma0;
    const double gtot = d.total_rate();  // gamma0/eta
    const double sq = std::sqrt(2.0 * g);
    std::array<double, 3> c = {v.x, v.y, v.z};
    const int k = static_cast<int>(axis);
    const double m = c[k];
    std::array<double, 3> out{};
    out[k] = m + (1.0 - m * m) * sq * n.dW;
    for (int j = 0; j < 3; ++j) {
        if (j == k) continue;
        out[j] = c[j] - gtot * c[j] * n.dt - m * c[j] * sq * n.dW;
    }
    return finish_bloch_step({out[0], out[1], out[2]}, gtot, n.dt);
}

BlochVector step_three_detector(const BlochVector& v, const std::array<DetectorParams, 3>& d,
                                const NoiseIncrement3& n) {
    validate(v);
    double max_rate = 0.0;
    for (const auto& dp : d) max_rate = std::max(max_rate, dp.total_rate());
    check_dt(n.dt, max_rate);

    const std::array<double, 3> c = {v.x, v.y, v.z};
    std::array<double, 3> gtot{}, sq{};
    for (int k = 0; k < 3; ++k) {
        gtot[k] = d[k].total_rate();
        sq[k] = std::sqrt(2.0 * d[k].gamma0);
    }
    std::array<double, 3> out{};
    for (int k = 0; k < 3; ++k) {
        const int a = (k + 1) % 3, b = (k + 2) % 3;
        double dv = -(gtot[a] + gtot[b]) * c[k] * n.dt;
        dv += (1.0 - c[k] * c[k]) * sq[k] * n.dW[k];
        dv -= c[k] * c[a] * sq[a] * n.dW[a];
        dv -= c[k] * c[b] * sq[b] * n.dW[b];
        out[k] = c[k] + dv;
    }
    return finish_bloch_step({out[0], out[1], out[2]}, max_rate, n.dt);
}

double step_radial(double r, const DetectorParams& d, const NoiseIncrement& n) {
    if (!(r > 0.0 && r <= 1.0 + kRadialSlack)) {
        throw domain_error("radial step requires r in (0, 1]");
    }
    if (r <= kRadialMin) {
        throw domain_error("radial equation singular near the origin; use step_purity_iso");
    }
    check_dt(n.dt, d.total_rate());
    r = std::min(r, 1.0);
    const double g = d.gamma0;
    const double eta = d.eta();
    double out =
        r + 2.0 * g * (1.0 / r - r / eta) * n.dt + std::sqrt(2.0 * g) * (1.0 - r * r) * n.dW;
    if (out < 0.0) out = -out;
    if (out > 1.0) {
        if (out > 1.0 + kRadialSlack) {
            throw overshoot_error("radial overshoot r = " + std::to_string(out));
        }
        out = 1.0;
    }
    return out;
}

double step_purity_iso(double p, const DetectorParams& d, const NoiseIncrement& n) {
    if (!(p >= 0.5 && p <= 1.0 + kRadialSlack)) {
        throw domain_error("purity step requires p in [1/2, 1]");
    }
    check_dt(n.dt, d.total_rate());
    p = std::min(p, 1.0);
    const double g = d.gamma0;
    const double eta = d.eta();
    const double s = 1.0 - p;
    const double drift = 2.0 * g * (1.0 - (2.0 * p - 1.0) / eta + 2.0 * s * s);
    const double noise = 2.0 * std::sqrt(2.0 * g) * s * std::sqrt(std::max(2.0 * p - 1.0, 0.0));
    double out = p + drift * n.dt + noise * n.dW;
    if (out < 0.5) out = 1.0 - out;  // reflecting boundary at the totally mixed state
    if (out > 1.0) {
        if (out > 1.0 + kRadialSlack) {
            throw overshoot_error("purity overshoot p = " + std::to_string(out));
        }
        out = 1.0;
    }
    return out;
}

double measurement_record(double expectation, const DetectorParams& d, const NoiseIncrement& n) {
    return expectation * n.dt + n.dW / std::sqrt(2.0 * d.gamma0);
}

std::optional<double> first_passage_time(std::span<const double> purities,
                                         std::span<const double> times, double threshold) {
    if (purities.size() != times.size() || purities.empty()) {
        throw domain_error("first_passage_time: series and times must match and be non-empty");
    }
    if (purities[0] >= threshold) return times[0];
    for (std::size_t i = 1; i < purities.size(); ++i) {
        if (purities[i] >= threshold) {
            const double f = (threshold - purities[i - 1]) / (purities[i] - purities[i - 1]);
            return times[i - 1] + f * (times[i] - times[i - 1]);
        }
    }
    return std::nullopt;
}

namespace {

struct JacobsMap {
    double p_inf;
    double decay;  // e^{-2 G (1 + delta/eta) dt}
    JacobsMap(const DetectorParams& d, double dt) {
        const double eta = d.eta();
        const double delta = d.delta();
        p_inf = (1.0 + 0.5 * delta / eta) / (1.0 + delta / eta);
        decay = std::exp(-2.0 * d.gamma0 * (1.0 + delta / eta) * dt);
    }
    [[nodiscard]] double operator()(double p) const { return p_inf + (p - p_inf) * decay; }
};

}  // namespace

TrajectoryRecord simulate_trajectory(const BlochVector& v0, const ProtocolSpec& spec,
                                     const SimulateOptions& opt) {
    validate(v0);
    double max_rate = 0.0;
    const int nd = spec.kind == ProtocolKind::IsotropicThreeDetector ? 3 : 1;
    for (int k = 0; k < nd; ++k) max_rate = std::max(max_rate, spec.detectors[k].total_rate());
    check_dt(opt.dt, max_rate);
    if (!(opt.horizon >= 0.0)) throw domain_error("horizon must be >= 0");
    if (opt.record_every < 1) throw domain_error("record_every must be >= 1");
    if (opt.with_records && opt.record_every != 1) {
        throw domain_error("per-step records require record_every = 1");
    }

    TrajectoryRecord rec;
    rec.seed = opt.seed;
    rec.protocol = spec.kind;

    BlochVector v = v0;
    v.clamp_to_ball();
    RngStream rng(opt.seed, opt.trajectory_id);
    const JacobsMap jacobs(spec.primary(), opt.dt);

    double t = 0.0;
    double p = purity(v);
    rec.times.push_back(t);
    rec.states.push_back(v);
    rec.purities.push_back(p);
    if (opt.stop_threshold && p >= *opt.stop_threshold) {
        rec.first_passage = 0.0;
        return rec;
    }

    const auto n_steps = static_cast<long long>(std::llround(opt.horizon / opt.dt));
    const double sdt = std::sqrt(opt.dt);
    for (long long step = 0; step < n_steps; ++step) {
        const Rotation fb = control_rotation(spec, v);
        v = fb.apply(v);

        std::array<double, 3> dR{};
        switch (spec.kind) {
            case ProtocolKind::ParallelNoFeedback:
            case ProtocolKind::WisemanRalphParallel: {
                const NoiseIncrement n{sdt * rng.normal(), opt.dt};
                if (opt.with_records) dR[2] = measurement_record(v.z, spec.primary(), n);
                v = step_single_detector(v, spec.primary(), Axis::Z, n);
                break;
            }
            case ProtocolKind::JacobsPerpendicular: {
                // continuous-feedback limit: deterministic purity growth in the
                // equatorial plane; the record stays available when requested
                if (opt.with_records) {
                    const NoiseIncrement n{sdt * rng.normal(), opt.dt};
                    dR[2] = measurement_record(v.z, spec.primary(), n);
                }
                const double pn = jacobs(purity(v));
                const double r_old = v.r();
                const double r_new = std::sqrt(std::max(2.0 * pn - 1.0, 0.0));
                if (r_old > 0.0) {
                    const double f = r_new / r_old;
                    v = {v.x * f, v.y * f, v.z * f};
                } else {
                    v = {r_new, 0.0, 0.0};
                }
                break;
            }
            case ProtocolKind::IsotropicThreeDetector: {
                const NoiseIncrement3 n{{sdt * rng.normal(), sdt * rng.normal(),
                                         sdt * rng.normal()},
                                        opt.dt};
                if (opt.with_records) {
                    dR[0] = measurement_record(v.x, spec.detectors[0], {n.dW[0], n.dt});
                    dR[1] = measurement_record(v.y, spec.detectors[1], {n.dW[1], n.dt});
                    dR[2] = measurement_record(v.z, spec.detectors[2], {n.dW[2], n.dt});
                }
                v = step_three_detector(v, spec.detectors, n);
                break;
            }
        }
        t = static_cast<double>(step + 1) * opt.dt;
        const double p_new = purity(v);
        if (opt.with_records) rec.records.push_back(dR);
        if ((step + 1) % opt.record_every == 0 || step + 1 == n_steps) {
            rec.times.push_back(t);
            rec.states.push_back(v);
            rec.purities.push_back(p_new);
        }
        if (opt.stop_threshold && p_new >= *opt.stop_threshold) {
            const double f = (*opt.stop_threshold - p) / (p_new - p);
            rec.first_passage = (t - opt.dt) + f * opt.dt;
            return rec;
        }
        p = p_new;
    }
    if (opt.stop_threshold) rec.censored = true;
    return rec;
}

}  // namespace qpure
