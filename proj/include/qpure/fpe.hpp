// SPDX-License-Identifier: Apache-2.0
//
// Fokker-Planck solver for the purity of the three-detector measurement:
// coefficients, stationary distribution, conservative Chang-Cooper evolution and
// moments. The grid lives in u = ln(2(1-p)), uniform on [ln(2 eps_grid), 0], which
// resolves the high-purity region where the dynamics concentrates.
#pragma once

#include <cmath>
#include <vector>

#include "qpure/errors.hpp"

namespace qpure {

struct FpeCoeffs {
    double drift;         // A(p) = 2 [1 - (2p-1)/eta + 2 (1-p)^2]
    double diffusion;     // B(p) = 8 (2p-1)(1-p)^2
    double diffusion_hp;  // B_HP(p) = 8 (1-p)^2
};
FpeCoeffs fpe_coeffs(double p, double eta);

struct GridSpec {
    int cells = 1600;
    double eps_grid = 1e-8;  // impurity floor of the grid
};

class DensityGrid {
  public:
    DensityGrid(const GridSpec& spec);

    [[nodiscard]] int cells() const { return static_cast<int>(q_.size()); }
    [[nodiscard]] double du() const { return du_; }
    [[nodiscard]] double u_center(int i) const { return u_min_ + (i + 0.5) * du_; }
    [[nodiscard]] double p_center(int i) const { return 1.0 - 0.5 * std::exp(u_center(i)); }
    [[nodiscard]] double time() const { return time_; }

    [[nodiscard]] std::vector<double>& values() { return q_; }
    [[nodiscard]] const std::vector<double>& values() const { return q_; }

    [[nodiscard]] double mass() const;
    void normalize();

    void advance_time(double dt) { time_ += dt; }

  private:
    double u_min_, du_, time_ = 0.0;
    std::vector<double> q_;
};

// Normalized bump two cells wide at p0 (regularized delta initial condition).
DensityGrid delta_density(const GridSpec& spec, double p0);

// Analytic stationary distribution (eta < 1) discretized on the grid and
// normalized. For eta = 1 the stationary limit is the point mass at p = 1.
DensityGrid stationary_distribution(double eta, const GridSpec& spec);

enum class FpeScheme { Implicit, Explicit };

struct EvolveOptions {
    double dt = 1e-3;
    FpeScheme scheme = FpeScheme::Implicit;  // unconditionally stable, mass-exact
};

// Conservative Chang-Cooper evolution to time() + t. Zero-flux boundaries; the
// explicit scheme enforces its CFL bound and throws when dt violates it.
void evolve_density(DensityGrid& grid, double eta, double t, const EvolveOptions& opt = {});

double density_mean_purity(const DensityGrid& grid);
double density_mean_log_s(const DensityGrid& grid);
double l1_distance(const DensityGrid& a, const DensityGrid& b);

// Time at which the FPE mean purity first reaches `target`, starting from the
// delta bump at p0 (linear interpolation between steps).
double fpe_mean_purity_crossing_time(double eta, double p0, double target,
                                     const GridSpec& spec = {.cells = 2400, .eps_grid = 1e-8},
                                     double dt = 2e-4, double t_max = 50.0);

}  // namespace qpure
