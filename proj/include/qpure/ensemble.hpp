// SPDX-License-Identifier: Apache-2.0
//
// Reproducible trajectory ensembles. Trajectories are processed in fixed chunks of
// 64; each chunk accumulates sequentially into its own partial and partials merge
// in chunk order, so the OpenMP path and the serial reference produce bit-identical
// aggregates for any worker count.
#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <optional>
#include <vector>

#include "qpure/bloch.hpp"
#include "qpure/protocols.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qpure {

inline constexpr std::int64_t kEnsembleChunk = 64;

inline int hardware_workers() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// body(i, partial) accumulates trajectory i; merge(into, from) combines partials.
// Exceptions from worker threads are captured and rethrown on the caller.
template <class Partial, class Body, class Merge>
Partial run_chunked(std::int64_t n, int workers, const Partial& zero, Body&& body, Merge&& merge) {
    const std::int64_t n_chunks = (n + kEnsembleChunk - 1) / kEnsembleChunk;
    std::vector<Partial> partials(static_cast<std::size_t>(n_chunks), zero);
    std::exception_ptr error;
    const int n_workers = workers > 0 ? workers : hardware_workers();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(n_workers)
#else
    (void)n_workers;
#endif
    for (std::int64_t c = 0; c < n_chunks; ++c) {
        try {
            const std::int64_t lo = c * kEnsembleChunk;
            const std::int64_t hi = std::min(n, lo + kEnsembleChunk);
            for (std::int64_t i = lo; i < hi; ++i) body(i, partials[static_cast<std::size_t>(c)]);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical(qpure_run_chunked_error)
#endif
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    Partial total = zero;
    for (const auto& part : partials) merge(total, part);
    return total;
}

// Serial reference for the runner above; kept for testing and benchmarking.
template <class Partial, class Body, class Merge>
Partial run_chunked_serial(std::int64_t n, const Partial& zero, Body&& body, Merge&& merge) {
    const std::int64_t n_chunks = (n + kEnsembleChunk - 1) / kEnsembleChunk;
    std::vector<Partial> partials(static_cast<std::size_t>(n_chunks), zero);
    for (std::int64_t c = 0; c < n_chunks; ++c) {
        const std::int64_t lo = c * kEnsembleChunk;
        const std::int64_t hi = std::min(n, lo + kEnsembleChunk);
        for (std::int64_t i = lo; i < hi; ++i) body(i, partials[static_cast<std::size_t>(c)]);
    }
    Partial total = zero;
    for (const auto& part : partials) merge(total, part);
    return total;
}

struct EnsembleRequest {
    ProtocolSpec protocol = ProtocolSpec::single(ProtocolKind::ParallelNoFeedback, {});
    BlochVector v0{};
    double dt = 1e-3;
    double horizon = 1.0;
    std::optional<double> fpt_threshold;  // record first passage of this purity
    std::int64_t n_traj = 0;
    std::uint64_t seed = 0;
    int workers = 0;        // 0: hardware default
    int output_points = 0;  // 0: no mean curves
    bool full_bloch_iso = false;  // isotropic: step the 3-D system instead of the
                                  // exact radial reduction
    bool serial_reference = false;
};

struct EnsembleResult {
    std::vector<double> t_grid;
    std::vector<double> mean_p, se_p;
    std::vector<double> mean_log_s, se_log_s;
    std::vector<double> fpt;  // NaN = censored; empty when no threshold requested
    std::int64_t n_traj = 0;
    std::int64_t n_censored = 0;
    double fpt_mean = 0.0, fpt_se = 0.0, fpt_std = 0.0;  // over uncensored only
};

// Runs the ensemble, continuing each trajectory to the horizon (first passages are
// recorded on the way, not used to stop).
EnsembleResult run_ensemble(const EnsembleRequest& req);

// Terminal purity of each trajectory at the horizon (for distribution tests).
std::vector<double> ensemble_terminal_purity(const EnsembleRequest& req);

struct MtfpMcResult {
    double mean = 0.0, se = 0.0, sd = 0.0;
    std::int64_t n = 0, censored = 0;
    std::vector<double> fpt;  // NaN = censored
};

// Mean first-passage time of purity 1-eps from p0, stopping each trajectory at the
// crossing. The isotropic protocol uses the exact radial (purity) reduction.
MtfpMcResult mtfp_monte_carlo(ProtocolKind kind, const DetectorParams& d, double eps, double p0,
                              std::int64_t n, double dt, std::uint64_t seed, int workers,
                              double censor_horizon = 0.0 /* 0: automatic */);

// Time-averaged stationary mean purity of the isotropic protocol (radial reduction):
// burn-in to t_burn, then average purity samples every `sample_dt` until t_end.
struct StationaryMcResult {
    double mean_p = 0.0, se = 0.0;
    std::int64_t n_samples = 0;
};
StationaryMcResult stationary_purity_monte_carlo(const DetectorParams& d, std::int64_t n,
                                                 double dt, double t_burn, double t_end,
                                                 double sample_dt, std::uint64_t seed,
                                                 int workers);

}  // namespace qpure
