// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "qpure/errors.hpp"

namespace qpure {

// Continuous detector: measurement rate gamma0, extra dephasing gamma.
// Total decoherence Gamma = gamma0 + gamma, efficiency eta = gamma0/Gamma,
// inefficiency delta = 1 - eta (kept exact as the float complement of eta).
struct DetectorParams {
    double gamma0 = 1.0;
    double gamma = 0.0;

    static DetectorParams from_rates(double gamma0, double gamma);
    static DetectorParams from_eta(double eta, double gamma0 = 1.0);
    static DetectorParams from_delta(double delta, double gamma0 = 1.0);

    [[nodiscard]] double total_rate() const { return gamma0 + gamma; }
    [[nodiscard]] double eta() const { return gamma0 / total_rate(); }
    [[nodiscard]] double delta() const { return 1.0 - eta(); }
};

inline DetectorParams DetectorParams::from_rates(double gamma0, double gamma) {
    if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) throw domain_error("gamma0 must be > 0");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw domain_error("gamma must be >= 0");
    return {gamma0, gamma};
}

inline DetectorParams DetectorParams::from_eta(double eta, double gamma0) {
    if (!(eta > 0.0 && eta <= 1.0)) throw domain_error("eta must be in (0, 1]");
    return from_rates(gamma0, gamma0 * (1.0 - eta) / eta);
}

inline DetectorParams DetectorParams::from_delta(double delta, double gamma0) {
    if (!(delta >= 0.0 && delta < 1.0)) throw domain_error("delta must be in [0, 1)");
    return from_eta(1.0 - delta, gamma0);
}

}  // namespace qpure
