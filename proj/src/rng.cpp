// SPDX-License-Identifier: Apache-2.0
#include "qpure/rng.hpp"

#include <cmath>

#include "qpure/errors.hpp"

namespace qpure {

BrownianPath::BrownianPath(std::uint64_t seed, std::uint64_t trajectory, int n0, double t_end)
    : seed_(seed), trajectory_(trajectory), t_end_(t_end) {
    if (n0 <= 0 || !(t_end > 0.0)) throw domain_error("BrownianPath: need n0 > 0 and t_end > 0");
    RngStream rs(seed_, trajectory_, /*substream=*/0);
    const double sdt = std::sqrt(t_end / n0);
    dw_.resize(static_cast<std::size_t>(n0));
    for (auto& w : dw_) w = sdt * rs.normal();
}

void BrownianPath::refine() {
    ++level_;
    RngStream rs(seed_, trajectory_, static_cast<std::uint64_t>(level_));
    const std::size_t n = dw_.size();
    const double h = t_end_ / static_cast<double>(n);  // coarse step being split
    std::vector<double> fine(2 * n);
    const double half_sd = 0.5 * std::sqrt(h);
    for (std::size_t k = 0; k < n; ++k) {
        // conditional midpoint: each half gets W/2 +- xi*sqrt(h)/2
        const double xi = rs.normal();
        fine[2 * k] = 0.5 * dw_[k] + half_sd * xi;
        fine[2 * k + 1] = 0.5 * dw_[k] - half_sd * xi;
    }
    dw_ = std::move(fine);
}

}  // namespace qpure
