// SPDX-License-Identifier: Apache-2.0
//
// Euler-Maruyama integrators for the single- and three-detector Bloch equations,
// their radial/purity reductions, measurement records and trajectory simulation.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qpure/bloch.hpp"
#include "qpure/detector.hpp"
#include "qpure/protocols.hpp"
#include "qpure/rng.hpp"

namespace qpure {

// Switch point below which the radial equation (singular drift ~ 1/r) must not be
// stepped; use the purity form instead, which is regular through p = 1/2.
inline constexpr double kRadialMin = 1e-6;

// Hard cap on the step size (in units of 1/Gamma): dt * Gamma <= 0.01.
inline constexpr double kMaxStepPerRate = 1e-2;

struct NoiseIncrement {
    double dW;
    double dt;
};

struct NoiseIncrement3 {
    std::array<double, 3> dW;
    double dt;
};

enum class Axis { X = 0, Y = 1, Z = 2 };

// One Ito step of the single-detector equations, measurement along `axis`
// (for z: dz = (1-z^2) sqrt(2 G0) dW, dx = -(G0/eta) x dt - z x sqrt(2 G0) dW, dy alike).
BlochVector step_single_detector(const BlochVector& v, const DetectorParams& d, Axis axis,
                                 const NoiseIncrement& n);

// One Ito step of the full three-detector system; detectors may differ per axis.
BlochVector step_three_detector(const BlochVector& v, const std::array<DetectorParams, 3>& d,
                                const NoiseIncrement3& n);

// Radial reduction dr = 2 G0 (1/r - r/eta) dt + sqrt(2 G0)(1 - r^2) dW_r.
// Refuses r <= kRadialMin (singular origin); callers switch to step_purity_iso.
double step_radial(double r, const DetectorParams& d, const NoiseIncrement& n);

// Purity reduction dp = 2 G0 [1 - (2p-1)/eta + 2(1-p)^2] dt + 2 sqrt(2 G0)(1-p) sqrt(2p-1) dW_r.
// Regular at p = 1/2 (handles the totally mixed start); reflects below 1/2.
double step_purity_iso(double p, const DetectorParams& d, const NoiseIncrement& n);

// Record increment dR = <X> dt + dW / sqrt(2 G0), with the same dW as the state step.
double measurement_record(double expectation, const DetectorParams& d, const NoiseIncrement& n);

// Linear-interpolated first crossing of `threshold` by the sampled series p(t).
// Returns nullopt when the series never reaches the threshold (censored).
std::optional<double> first_passage_time(std::span<const double> purities,
                                         std::span<const double> times, double threshold);

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<BlochVector> states;
    std::vector<double> purities;
    std::vector<std::array<double, 3>> records;  // dR per axis; empty unless requested
    std::uint64_t seed = 0;
    ProtocolKind protocol = ProtocolKind::ParallelNoFeedback;
    std::optional<double> first_passage;  // nullopt when censored or no threshold given
    bool censored = false;
};

struct SimulateOptions {
    double dt = 1e-3;
    double horizon = 1.0;
    std::optional<double> stop_threshold;  // purity level 1 - eps
    std::uint64_t seed = 0;
    std::uint64_t trajectory_id = 0;  // stream index within an ensemble
    int record_every = 1;
    bool with_records = false;
};

// Steps the chosen protocol (feedback rotation at the start of every interval,
// then one measurement step), recording state, purity and optionally the
// measurement records; stops at the horizon or at first passage of the threshold.
TrajectoryRecord simulate_trajectory(const BlochVector& v0, const ProtocolSpec& spec,
                                     const SimulateOptions& opt);

}  // namespace qpure
