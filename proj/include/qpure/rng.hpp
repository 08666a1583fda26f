// SPDX-License-Identifier: Apache-2.0
//
// Reproducible per-trajectory random streams. Trajectory i of a run with master
// seed S draws from a generator keyed by (S, i), so an ensemble gives the same
// numbers for any worker count and scheduling order.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qpure {

// SplitMix64 finalizer; used only to key generators, never as the main stream.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    return mix64(h ^ c);
}

class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0)
        : eng_(derive_seed(seed, stream, substream)) {}

    double normal() { return gauss_(eng_); }
    double uniform() { return unif_(eng_); }

  private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> gauss_{0.0, 1.0};
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

// One realization of a Wiener path on [0, t_end], refinable in place by Brownian
// bridge midpoint subdivision. Level L has n0 * 2^L increments; refining keeps the
// coarse path's partial sums, so dt-convergence studies see the same noise.
class BrownianPath {
  public:
    BrownianPath(std::uint64_t seed, std::uint64_t trajectory, int n0, double t_end);

    void refine();  // halve dt

    [[nodiscard]] const std::vector<double>& increments() const { return dw_; }
    [[nodiscard]] double dt() const { return t_end_ / static_cast<double>(dw_.size()); }
    [[nodiscard]] int level() const { return level_; }

  private:
    std::uint64_t seed_, trajectory_;
    double t_end_;
    int level_ = 0;
    std::vector<double> dw_;
};

}  // namespace qpure
