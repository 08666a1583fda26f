// SPDX-License-Identifier: Apache-2.0
//
// qpure: trajectory ensembles, Fokker-Planck evolutions, first-passage tables and
// the inefficiency scaling study for continuous-measurement qubit purification.
// Output: CSV with '#' header comments; every file records the exact command that
// reproduces it byte for byte. All times are in units of 1/gamma0.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpure/bayes.hpp"
#include "qpure/bloch.hpp"
#include "qpure/detector.hpp"
#include "qpure/ensemble.hpp"
#include "qpure/errors.hpp"
#include "qpure/fpe.hpp"
#include "qpure/mtfp.hpp"
#include "qpure/protocols.hpp"
#include "qpure/sde.hpp"
#include "qpure/version.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitCheckFailed = 3;

std::string fx(double v) {  // shortest formatting that round-trips exactly
    char b[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(b, sizeof b, "%.*g", prec, v);
        if (std::strtod(b, nullptr) == v) break;
    }
    return b;
}

std::string fs(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.12g", v);
    return b;
}

std::string join_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += fx(v[i]);
    }
    return s;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw qpure::numeric_error("cannot open output file: " + path);
    out << content;
    if (!out) throw qpure::numeric_error("failed writing output file: " + path);
}

void header(std::ostringstream& os, const std::string& command) {
    os << "# command: " << command << "\n";
    os << "# version: qpure " << qpure::kVersion << "\n";
    os << "# time-unit: 1/gamma0\n";
}

struct DetectorChoice {
    double gamma0 = 1.0;
    std::optional<double> eta, delta;

    [[nodiscard]] qpure::DetectorParams params() const {
        if (eta) return qpure::DetectorParams::from_eta(*eta, gamma0);
        if (delta) return qpure::DetectorParams::from_delta(*delta, gamma0);
        return qpure::DetectorParams::from_eta(1.0, gamma0);
    }
    [[nodiscard]] std::string canonical() const {
        std::string s = " --gamma0 " + fx(gamma0);
        if (eta) s += " --eta " + fx(*eta);
        if (delta) s += " --delta " + fx(*delta);
        return s;
    }
};

void add_detector_flags(CLI::App* cmd, DetectorChoice& det) {
    cmd->add_option("--gamma0", det.gamma0, "measurement rate Gamma0")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    auto* oe = cmd->add_option("--eta", det.eta, "detector efficiency in (0, 1]")
                   ->check(CLI::Range(1e-12, 1.0));
    auto* od = cmd->add_option("--delta", det.delta, "detector inefficiency in [0, 1)")
                   ->check(CLI::Range(0.0, 1.0 - 1e-12));
    oe->excludes(od);
    od->excludes(oe);
}

qpure::ProtocolKind parse_protocol(const std::string& name) {
    if (name == "parallel") return qpure::ProtocolKind::ParallelNoFeedback;
    if (name == "jacobs") return qpure::ProtocolKind::JacobsPerpendicular;
    if (name == "wr") return qpure::ProtocolKind::WisemanRalphParallel;
    if (name == "iso") return qpure::ProtocolKind::IsotropicThreeDetector;
    throw qpure::domain_error("unknown protocol: " + name);
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string protocol = "iso";
    DetectorChoice det;
    std::int64_t trajectories = 0;
    double dt = 1e-3;
    double horizon = 1.0;
    std::optional<double> epsilon;
    double x0 = 0.0, y0 = 0.0, z0 = 0.0;
    std::uint64_t seed = 0;
    int workers = 0;
    int output_points = 101;
    bool full3d = false;
    std::string out;
};

std::string canonical_simulate(const SimulateArgs& a) {
    std::string s = "qpure simulate --protocol " + a.protocol + a.det.canonical();
    s += " --trajectories " + std::to_string(a.trajectories);
    s += " --dt " + fx(a.dt) + " --horizon " + fx(a.horizon);
    if (a.epsilon) s += " --epsilon " + fx(*a.epsilon);
    s += " --x0 " + fx(a.x0) + " --y0 " + fx(a.y0) + " --z0 " + fx(a.z0);
    s += " --seed " + std::to_string(a.seed);
    s += " --output-points " + std::to_string(a.output_points);
    if (a.full3d) s += " --full3d";
    s += " --out " + a.out;
    return s;
}

int run_simulate(const SimulateArgs& a) {
    qpure::EnsembleRequest req;
    const auto kind = parse_protocol(a.protocol);
    const auto d = a.det.params();
    req.protocol = kind == qpure::ProtocolKind::IsotropicThreeDetector
                       ? qpure::ProtocolSpec::isotropic(d)
                       : qpure::ProtocolSpec::single(kind, d);
    req.v0 = {a.x0, a.y0, a.z0};
    req.dt = a.dt;
    req.horizon = a.horizon;
    if (a.epsilon) req.fpt_threshold = 1.0 - *a.epsilon;
    req.n_traj = a.trajectories;
    req.seed = a.seed;
    req.workers = a.workers;
    req.output_points = a.output_points;
    req.full_bloch_iso = a.full3d;

    const qpure::EnsembleResult res = qpure::run_ensemble(req);

    std::ostringstream os;
    header(os, canonical_simulate(a));
    os << "# table: trajectories\n";
    os << "traj,fpt,censored\n";
    if (a.epsilon) {
        for (std::size_t i = 0; i < res.fpt.size(); ++i) {
            const bool cen = std::isnan(res.fpt[i]);
            os << i << ',' << (cen ? "nan" : fx(res.fpt[i])) << ',' << (cen ? 1 : 0) << "\n";
        }
    }
    os << "# table: curves\n";
    os << "t,mean_p,se_p,mean_log_s,se_log_s\n";
    for (std::size_t k = 0; k < res.t_grid.size(); ++k) {
        os << fx(res.t_grid[k]) << ',' << fx(res.mean_p[k]) << ',' << fs(res.se_p[k]) << ','
           << fx(res.mean_log_s[k]) << ',' << fs(res.se_log_s[k]) << "\n";
    }
    os << "# table: summary\n";
    os << "key,value\n";
    os << "n_trajectories," << res.n_traj << "\n";
    if (a.epsilon) {
        os << "n_censored," << res.n_censored << "\n";
        os << "fpt_mean," << fx(res.fpt_mean) << "\n";
        os << "fpt_se," << fx(res.fpt_se) << "\n";
        os << "fpt_std," << fx(res.fpt_std) << "\n";
    }
    write_file(a.out, os.str());
    return 0;
}

// ---------------------------------------------------------------------------
// mtfp

struct MtfpArgs {
    std::vector<double> epsilons{1e-4};
    std::vector<double> deltas{0.0};
    double p0 = 0.5;
    std::string mode = "hp";
    std::string out;
};

int run_mtfp(const MtfpArgs& a) {
    std::ostringstream os;
    std::string cmd = "qpure mtfp --epsilon " + join_list(a.epsilons) + " --delta " +
                      join_list(a.deltas) + " --p0 " + fx(a.p0) + " --mode " + a.mode +
                      " --out " + a.out;
    header(os, cmd);
    os << "delta,epsilon,a,T_bar,T_bar_ideal,delta_T\n";
    const bool full = a.mode == "full";
    for (double eps : a.epsilons) {
        const qpure::MtfpConfig ideal{.epsilon = eps, .delta = 0.0, .p0 = a.p0};
        const double t0 = full ? qpure::mtfp_full_b(ideal) : qpure::mtfp_quadrature(ideal);
        for (double delta : a.deltas) {
            const qpure::MtfpConfig cfg{.epsilon = eps, .delta = delta, .p0 = a.p0};
            const double t = full ? qpure::mtfp_full_b(cfg) : qpure::mtfp_quadrature(cfg);
            os << fx(delta) << ',' << fx(eps) << ',' << fx(delta / eps) << ',' << fx(t) << ','
               << fx(t0) << ',' << fx(t - t0) << "\n";
        }
    }
    write_file(a.out, os.str());
    return 0;
}

// ---------------------------------------------------------------------------
// scaling

struct ScalingArgs {
    std::vector<double> fig3_eps{1e-3, 1e-4, 1e-5, 1e-6};
    double fig3_da = 0.25;
    double fig3_amax = 5.0;
    std::vector<double> fig4_eps{1e-7};
    std::vector<double> fig4_a{20, 30, 45, 60, 100, 140, 200, 300, 450, 600, 1000, 1400, 2000};
    int workers = 0;
    std::string out;
};

int run_scaling(const ScalingArgs& a) {
    std::string cmd = "qpure scaling --fig3-eps " + join_list(a.fig3_eps) + " --fig3-da " +
                      fx(a.fig3_da) + " --fig3-amax " + fx(a.fig3_amax) + " --fig4-eps " +
                      join_list(a.fig4_eps) + " --fig4-a " + join_list(a.fig4_a) + " --out " +
                      a.out;

    std::vector<double> a3;
    for (double x = 0.0; x <= a.fig3_amax + 1e-12; x += a.fig3_da) a3.push_back(x);
    const auto rows3 = qpure::scaling_study(a.fig3_eps, a3, a.workers, /*with_exponent=*/false);
    std::ostringstream os3;
    header(os3, cmd);
    os3 << "a,epsilon,delta_T\n";
    for (const auto& r : rows3) {
        os3 << fx(r.a) << ',' << fx(r.epsilon) << ',' << fx(r.delta_T) << "\n";
    }
    write_file(a.out + "_fig3.csv", os3.str());

    const auto rows4 = qpure::scaling_study(a.fig4_eps, a.fig4_a, a.workers, true);
    std::ostringstream os4;
    header(os4, cmd);
    os4 << "a,epsilon,ln_delta_T,C1\n";
    for (const auto& r : rows4) {
        os4 << fx(r.a) << ',' << fx(r.epsilon) << ',' << fx(r.log_delta_T) << ',' << fx(r.c1)
            << "\n";
    }
    write_file(a.out + "_fig4.csv", os4.str());
    return 0;
}

// ---------------------------------------------------------------------------
// protocols

struct ProtocolsArgs {
    std::vector<double> epsilons{1e-3, 1e-4, 1e-5};
    bool bayes = false;
    std::int64_t mc = 0;
    double mc_dt = 1e-3;
    std::uint64_t seed = 0;
    bool have_seed = false;
    int workers = 0;
    std::string out;
};

int run_protocols(const ProtocolsArgs& a) {
    using qpure::ProtocolKind;
    std::string cmd = "qpure protocols --epsilons " + join_list(a.epsilons);
    if (a.bayes) cmd += " --bayes";
    if (a.mc > 0) {
        cmd += " --mc " + std::to_string(a.mc) + " --mc-dt " + fx(a.mc_dt) + " --seed " +
               std::to_string(a.seed);
    }
    cmd += " --out " + a.out;

    std::ostringstream os;
    header(os, cmd);
    os << "epsilon,tau_perp,tau_par,tau_iso_ideal,T_log_par,T_log_iso,"
          "ratio_perp,ratio_iso,ratio_mtfp";
    if (a.bayes) os << ",tau_par_exact";
    if (a.mc > 0) os << ",mc_mtfp_iso,mc_mtfp_iso_se,mc_mtfp_wr,mc_mtfp_wr_se,mc_tlog_iso";
    os << "\n";
    const auto d = qpure::DetectorParams::from_eta(1.0);
    for (double eps : a.epsilons) {
        const double tp = qpure::tau_perp(eps);
        const double tpar = qpure::tau_parallel(eps);
        const double tiso = qpure::tau_iso_ideal(eps);
        const double tlp = qpure::analytic_mtfp_estimate(ProtocolKind::WisemanRalphParallel, eps).value;
        const double tli = qpure::analytic_mtfp_estimate(ProtocolKind::IsotropicThreeDetector, eps).value;
        os << fx(eps) << ',' << fx(tp) << ',' << fx(tpar) << ',' << fx(tiso) << ',' << fx(tlp)
           << ',' << fx(tli) << ',' << fx(tpar / tp) << ',' << fx(tpar / tiso) << ','
           << fx(tlp / tli);
        if (a.bayes) os << ',' << fx(qpure::parallel_time_to_mean_purity(eps));
        if (a.mc > 0) {
            const auto iso = qpure::mtfp_monte_carlo(ProtocolKind::IsotropicThreeDetector, d, eps,
                                                     0.5, a.mc, a.mc_dt, a.seed, a.workers);
            const auto wr = qpure::mtfp_monte_carlo(ProtocolKind::WisemanRalphParallel, d, eps,
                                                    0.5, a.mc, a.mc_dt, a.seed + 1, a.workers);
            // <ln s(t)> crossing of ln(eps) from the ensemble mean curve
            qpure::EnsembleRequest req;
            req.protocol = qpure::ProtocolSpec::isotropic(d);
            req.dt = a.mc_dt;
            req.horizon = 3.0 * iso.mean + 1.0;
            req.n_traj = a.mc;
            req.seed = a.seed + 2;
            req.workers = a.workers;
            req.output_points = 601;
            const auto curves = qpure::run_ensemble(req);
            double tlog = std::numeric_limits<double>::quiet_NaN();
            const double target = std::log(eps);
            for (std::size_t k = 1; k < curves.t_grid.size(); ++k) {
                if (curves.mean_log_s[k] <= target) {
                    const double f = (target - curves.mean_log_s[k - 1]) /
                                     (curves.mean_log_s[k] - curves.mean_log_s[k - 1]);
                    tlog = curves.t_grid[k - 1] + f * (curves.t_grid[k] - curves.t_grid[k - 1]);
                    break;
                }
            }
            os << ',' << fx(iso.mean) << ',' << fs(iso.se) << ',' << fx(wr.mean) << ','
               << fs(wr.se) << ',' << fx(tlog);
        }
        os << "\n";
    }
    write_file(a.out, os.str());
    return 0;
}

// ---------------------------------------------------------------------------
// fpe

struct FpeArgs {
    DetectorChoice det;
    double p0 = 0.5;
    double t_end = 10.0;
    double dt = 1e-3;
    int cells = 1600;
    double eps_grid = 1e-8;
    int curve_samples = 101;
    bool stationary = false;
    bool explicit_scheme = false;
    std::string out;
};

int run_fpe(const FpeArgs& a) {
    const auto d = a.det.params();
    const double eta = d.eta();
    std::string cmd = "qpure fpe" + a.det.canonical() + " --p0 " + fx(a.p0) + " --t-end " +
                      fx(a.t_end) + " --dt " + fx(a.dt) + " --cells " + std::to_string(a.cells) +
                      " --eps-grid " + fx(a.eps_grid);
    if (a.stationary) cmd += " --stationary";
    if (a.explicit_scheme) cmd += " --explicit";
    cmd += " --out " + a.out;

    const qpure::GridSpec spec{a.cells, a.eps_grid};
    std::ostringstream os;
    header(os, cmd);
    if (a.stationary) {
        const auto st = qpure::stationary_distribution(eta, spec);
        os << "# table: density (stationary)\n";
        os << "u,p,density_u\n";
        for (int i = 0; i < st.cells(); ++i) {
            os << fx(st.u_center(i)) << ',' << fx(st.p_center(i)) << ','
               << fx(st.values()[static_cast<std::size_t>(i)]) << "\n";
        }
        os << "# table: summary\nkey,value\n";
        os << "mean_p," << fx(qpure::density_mean_purity(st)) << "\n";
        os << "mass," << fx(st.mass()) << "\n";
        write_file(a.out, os.str());
        return 0;
    }

    auto g = qpure::delta_density(spec, a.p0);
    const qpure::EvolveOptions opt{.dt = a.dt,
                                   .scheme = a.explicit_scheme ? qpure::FpeScheme::Explicit
                                                               : qpure::FpeScheme::Implicit};
    os << "# table: mean-curve\n";
    os << "t,mean_p,mean_log_s,mass\n";
    const int samples = std::max(2, a.curve_samples);
    double t = 0.0;
    os << fx(0.0) << ',' << fx(qpure::density_mean_purity(g)) << ','
       << fx(qpure::density_mean_log_s(g)) << ',' << fx(g.mass()) << "\n";
    for (int k = 1; k < samples; ++k) {
        const double t_next = a.t_end * k / (samples - 1);
        qpure::evolve_density(g, eta, t_next - t, opt);
        t = t_next;
        os << fx(t) << ',' << fx(qpure::density_mean_purity(g)) << ','
           << fx(qpure::density_mean_log_s(g)) << ',' << fx(g.mass()) << "\n";
    }
    os << "# table: density (t = " << fx(a.t_end) << ")\n";
    os << "u,p,density_u\n";
    for (int i = 0; i < g.cells(); ++i) {
        os << fx(g.u_center(i)) << ',' << fx(g.p_center(i)) << ','
           << fx(g.values()[static_cast<std::size_t>(i)]) << "\n";
    }
    write_file(a.out, os.str());
    return 0;
}

// ---------------------------------------------------------------------------
// bayes-check

struct BayesCheckArgs {
    double z0 = 0.0;
    double tau = 1.0;
    double dt = 1e-3;
    int seeds = 100;
    std::uint64_t seed = 0;
    double eta = 1.0;
    double c_tol = 1.6;
    std::string out;
};

int run_bayes_check(const BayesCheckArgs& a) {
    const auto rep =
        qpure::sde_povm_equivalence_check(a.z0, a.tau, a.dt, a.seeds, a.seed, a.eta, a.c_tol);
    std::cout << "sde-povm equivalence: z0=" << fs(a.z0) << " tau=" << fs(a.tau)
              << " dt=" << fs(a.dt) << " seeds=" << a.seeds << "\n";
    std::cout << "  max gap      = " << fs(rep.max_gap) << "\n";
    std::cout << "  median gap   = " << fs(rep.median_gap) << "\n";
    std::cout << "  tolerance    = " << fs(rep.tolerance) << " (c_tol * sqrt(dt))\n";
    std::cout << "  calibrated C = " << fs(rep.calibration_c) << " (median/sqrt(dt) on the dt ladder)\n";
    std::cout << "  ladder medians (dt, dt/2, dt/4):";
    for (double v : rep.ladder_median) std::cout << ' ' << fs(v);
    std::cout << "\n  " << (rep.pass ? "PASS" : "FAIL") << "\n";
    if (!a.out.empty()) {
        std::ostringstream os;
        std::string cmd = "qpure bayes-check --z0 " + fx(a.z0) + " --tau " + fx(a.tau) +
                          " --dt " + fx(a.dt) + " --seeds " + std::to_string(a.seeds) +
                          " --seed " + std::to_string(a.seed) + " --eta " + fx(a.eta) +
                          " --c-tol " + fx(a.c_tol) + " --out " + a.out;
        header(os, cmd);
        os << "key,value\n";
        os << "max_gap," << fx(rep.max_gap) << "\n";
        os << "median_gap," << fx(rep.median_gap) << "\n";
        os << "tolerance," << fx(rep.tolerance) << "\n";
        os << "calibrated_c," << fx(rep.calibration_c) << "\n";
        os << "pass," << (rep.pass ? 1 : 0) << "\n";
        write_file(a.out, os.str());
    }
    return rep.pass ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"continuous-measurement qubit purification toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value configuration file");
    app.allow_config_extras(false);

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "run a trajectory ensemble");
    c_sim->add_option("--protocol", sim.protocol, "parallel|jacobs|wr|iso")
        ->check(CLI::IsMember({"parallel", "jacobs", "wr", "iso"}))
        ->capture_default_str();
    add_detector_flags(c_sim, sim.det);
    c_sim->add_option("--trajectories", sim.trajectories, "ensemble size")
        ->check(CLI::NonNegativeNumber)
        ->required();
    c_sim->add_option("--dt", sim.dt, "time step (1/gamma0)")->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_sim->add_option("--horizon", sim.horizon, "simulated time (1/gamma0)")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    c_sim->add_option("--epsilon", sim.epsilon, "record first passage of purity 1-eps")
        ->check(CLI::Range(1e-12, 0.49999));
    c_sim->add_option("--x0", sim.x0, "initial Bloch x")->capture_default_str();
    c_sim->add_option("--y0", sim.y0, "initial Bloch y")->capture_default_str();
    c_sim->add_option("--z0", sim.z0, "initial Bloch z")->capture_default_str();
    c_sim->add_option("--seed", sim.seed, "master seed (required: no silent nondeterminism)")
        ->required();
    c_sim->add_option("--workers", sim.workers, "worker threads (default: cores)");
    c_sim->add_option("--output-points", sim.output_points, "points of the mean curves")
        ->check(CLI::Range(0, 1000000))->capture_default_str();
    c_sim->add_flag("--full3d", sim.full3d, "step the full 3-D system for iso");
    c_sim->add_option("--out", sim.out, "output CSV")->required();

    MtfpArgs mt;
    auto* c_mtfp = app.add_subcommand("mtfp", "mean first-passage-time table");
    c_mtfp->add_option("--epsilon", mt.epsilons, "target impurity list")->delimiter(',')
        ->capture_default_str();
    c_mtfp->add_option("--delta", mt.deltas, "inefficiency list")->delimiter(',')
        ->capture_default_str();
    c_mtfp->add_option("--p0", mt.p0, "initial purity")->check(CLI::Range(0.5, 0.999999))
        ->capture_default_str();
    c_mtfp->add_option("--mode", mt.mode, "hp|full diffusion coefficient")
        ->check(CLI::IsMember({"hp", "full"}))->capture_default_str();
    c_mtfp->add_option("--out", mt.out, "output CSV")->required();

    ScalingArgs sc;
    auto* c_sc = app.add_subcommand("scaling", "inefficiency scaling study data");
    c_sc->add_option("--fig3-eps", sc.fig3_eps, "epsilons for the small-a table")->delimiter(',')
        ->capture_default_str();
    c_sc->add_option("--fig3-da", sc.fig3_da, "a-grid spacing")->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_sc->add_option("--fig3-amax", sc.fig3_amax, "largest a")->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_sc->add_option("--fig4-eps", sc.fig4_eps, "epsilons for the large-a table")->delimiter(',')
        ->capture_default_str();
    c_sc->add_option("--fig4-a", sc.fig4_a, "a values for the large-a table")->delimiter(',')
        ->capture_default_str();
    c_sc->add_option("--workers", sc.workers, "worker threads");
    c_sc->add_option("--out", sc.out, "output base path (two files)")->required();

    ProtocolsArgs pr;
    auto* c_pr = app.add_subcommand("protocols", "protocol timescale comparison table");
    c_pr->add_option("--epsilons", pr.epsilons, "impurity levels")->delimiter(',')
        ->capture_default_str();
    c_pr->add_flag("--bayes", pr.bayes, "append the exact parallel mean-purity time");
    c_pr->add_option("--mc", pr.mc, "append Monte Carlo cross-checks with this ensemble size");
    c_pr->add_option("--mc-dt", pr.mc_dt, "Monte Carlo time step")->check(CLI::PositiveNumber)
        ->capture_default_str();
    auto* pr_seed = c_pr->add_option("--seed", pr.seed, "master seed for --mc");
    c_pr->add_option("--workers", pr.workers, "worker threads");
    c_pr->add_option("--out", pr.out, "output CSV")->required();
    c_pr->callback([&pr, pr_seed]() {
        pr.have_seed = pr_seed->count() > 0;
        if (pr.mc > 0 && !pr.have_seed) {
            throw CLI::ValidationError("--mc requires --seed (no silent nondeterminism)");
        }
    });

    FpeArgs fp;
    auto* c_fp = app.add_subcommand("fpe", "purity Fokker-Planck evolution");
    add_detector_flags(c_fp, fp.det);
    c_fp->add_option("--p0", fp.p0, "initial purity (delta bump)")
        ->check(CLI::Range(0.5, 0.999999))->capture_default_str();
    c_fp->add_option("--t-end", fp.t_end, "evolution time")->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    c_fp->add_option("--dt", fp.dt, "time step")->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_fp->add_option("--cells", fp.cells, "grid cells")->check(CLI::Range(8, 1000000))
        ->capture_default_str();
    c_fp->add_option("--eps-grid", fp.eps_grid, "grid impurity floor")
        ->check(CLI::Range(1e-14, 0.4))->capture_default_str();
    c_fp->add_option("--curve-samples", fp.curve_samples, "points of the mean curve")
        ->check(CLI::Range(2, 1000000))->capture_default_str();
    c_fp->add_flag("--stationary", fp.stationary, "emit the stationary distribution instead");
    c_fp->add_flag("--explicit", fp.explicit_scheme, "use the explicit CFL-guarded scheme");
    c_fp->add_option("--out", fp.out, "output CSV")->required();

    BayesCheckArgs bc;
    auto* c_bc = app.add_subcommand("bayes-check", "SDE vs finite-time Bayes update self-test");
    c_bc->add_option("--z0", bc.z0, "initial z (diagonal state)")->check(CLI::Range(-1.0, 1.0))
        ->capture_default_str();
    c_bc->add_option("--tau", bc.tau, "integration window")->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_bc->add_option("--dt", bc.dt, "time step")->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_bc->add_option("--seeds", bc.seeds, "number of noise realizations")
        ->check(CLI::Range(1, 1000000))->capture_default_str();
    c_bc->add_option("--seed", bc.seed, "master seed")->required();
    c_bc->add_option("--eta", bc.eta, "detector efficiency")->check(CLI::Range(1e-12, 1.0))
        ->capture_default_str();
    c_bc->add_option("--c-tol", bc.c_tol, "gap tolerance in units of sqrt(dt)")
        ->check(CLI::PositiveNumber)->capture_default_str();
    c_bc->add_option("--out", bc.out, "optional report CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*c_sim) return run_simulate(sim);
        if (*c_mtfp) return run_mtfp(mt);
        if (*c_sc) return run_scaling(sc);
        if (*c_pr) return run_protocols(pr);
        if (*c_fp) return run_fpe(fp);
        if (*c_bc) return run_bayes_check(bc);
    } catch (const qpure::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
