// Acceptance suite: one statistical criterion per section, each printed as a
// single [PASS]/[FAIL] line. Exit code is the number of failed criteria.
// Individual criteria can be selected by number on the command line.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nullrec/coefficients.hpp"
#include "nullrec/deterministic.hpp"
#include "nullrec/limit.hpp"
#include "nullrec/localtime.hpp"
#include "nullrec/parallel.hpp"
#include "nullrec/paths.hpp"
#include "nullrec/sde.hpp"
#include "nullrec/stats.hpp"
#include "nullrec/timechange.hpp"
#include "nullrec/verify.hpp"

using namespace nullrec;

namespace {

constexpr double kSqrt2OverPi = 0.79788456080286536;

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

// 1. Monte Carlo E L^W(1,0) within 2% of sqrt(2/pi) for both estimators
//    (1e4 paths, h = 1e-5). Oracle: E|W(1)|.
void criterion_1() {
    const TimeGrid grid = make_grid(0.0, 1.0, 100000);
    const std::size_t n = 10000;
    const double delta = default_bandwidth(grid);
    std::vector<double> occ(n), tan(n);
    parallel_chunks(n, kEnsembleChunk, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            const SamplePath w = sample_brownian(grid, 1, SeedSpec{101, k});
            occ[k] = local_time_occupation(w, 0.0, delta).terminal();
            tan[k] = local_time_tanaka(w, 0.0).raw_terminal;
        }
    });
    const double mo = mean_se(occ).mean;
    const double mt = mean_se(tan).mean;
    const double eo = std::abs(mo - kSqrt2OverPi) / kSqrt2OverPi;
    const double et = std::abs(mt - kSqrt2OverPi) / kSqrt2OverPi;
    report(1, eo <= 0.02 && et <= 0.02, "local-time mean for both estimators",
           "occupation=" + fmt(mo) + " tanaka=" + fmt(mt) + " target=" + fmt(kSqrt2OverPi) +
               " rel err " + fmt(eo) + "/" + fmt(et) + " tol 0.02");
}

// 2. Occupation-density identity: per-path relative discrepancy <= 5% at
//    eps = 0.1, h = 1e-5, frozen-y Gaussian kernel.
void criterion_2() {
    const CoefficientSet cs = build_catalog_entry("constant_psi", {{"c", 1.0}});
    const TimeGrid grid = make_grid(0.0, 1.0, 100000);
    const OdeSolution ode = solve_ode(cs, Eigen::VectorXd::Zero(1), grid);
    double worst = 0.0;
    bool all = true;
    for (std::size_t k = 0; k < 5; ++k) {
        const SamplePath w = sample_brownian(grid, 1, SeedSpec{202, k});
        const VerificationReport r = occupation_identity_check(w, cs, ode, 0.1);
        worst = std::max(worst, r.checks.front().value);
        all = all && r.pass();
    }
    report(2, all && worst <= 0.05, "occupation-density identity",
           "max per-path relative discrepancy " + fmt(worst) + " tol 0.05");
}

// 3. Strong rate: log-log slope of sup_t E|Y - y|^2 vs eps equals 1.0 +- 0.15
//    over {0.4, 0.2, 0.1, 0.05}, oscillator, 2e3 paths per eps.
void criterion_3() {
    const CoefficientSet cs = build_catalog_entry("oscillator");
    const EpsilonSchedule sched(std::vector<double>{0.4, 0.2, 0.1, 0.05}, 1e-2);
    VerifyOptions opts;
    opts.master_seed = 303;
    const VerificationReport r =
        check_lemma_rate(cs, Eigen::Vector2d(1.0, 0.0), 1.0, 2, sched, 2000, opts);
    report(3, r.pass(), "deviation moment rate in eps",
           "slope=" + fmt(r.slope) + " target 1.0 +- 0.15");
}

// 4. Occupation-functional moments: p = 1 uniformly bounded, t-slope 0.5 +- 0.1,
//    small-eps limit within 5% of |psi|_1 sqrt(2t/pi).
void criterion_4() {
    const PsiFunction psi{"gaussian", [](double x) { return std::exp(-x * x); },
                          std::sqrt(M_PI)};
    const EpsilonSchedule sched(std::vector<double>{0.4, 0.2, 0.1, 0.05}, 1e-2);
    VerifyOptions opts;
    opts.master_seed = 404;
    // the level-smoothing bias of the estimator at eps = 0.05 is about -3.5%
    // of the limit, so the Monte Carlo noise must stay well under the
    // remaining 1.5% of the 5% gate
    const VerificationReport r = check_lemma_L1_bound(psi, 1.0, 1, sched, 12000, opts);
    std::string detail = "slope=" + fmt(r.slope);
    for (const auto& c : r.checks)
        if (c.name == "small_eps_limit")
            detail += " limit=" + fmt(c.value) + " target=" + fmt(c.threshold) + " rtol 0.05";
    report(4, r.pass(), "L1 moment bound and sqrt(t) scaling", detail);
}

// 5. Conditional characteristic function: empirical vs exact within 3 MC
//    standard errors at 5 probe lambdas, 1e4 W2-resamples.
void criterion_5() {
    const CoefficientSet cs = build_catalog_entry("oscillator");
    const double eps = 0.1;
    const TimeGrid grid = make_grid(0.0, 1.0, 10000);  // h = h_ref eps^2 = 1e-4
    const OdeSolution ode = solve_ode(cs, Eigen::Vector2d(1.0, 0.0), grid);
    std::vector<Eigen::VectorXd> lambdas;
    lambdas.push_back(Eigen::Vector2d(1.0, 0.0));
    lambdas.push_back(Eigen::Vector2d(0.0, 1.0));
    lambdas.push_back(Eigen::Vector2d(0.7, 0.7));
    lambdas.push_back(Eigen::Vector2d(-1.0, 0.5));
    lambdas.push_back(Eigen::Vector2d(2.0, 0.0));
    VerifyOptions opts;
    opts.master_seed = 505;
    const VerificationReport r = check_char_function(cs, ode, eps, 1.0, lambdas, 10000, opts);
    double worst_ratio = 0.0;
    for (const auto& c : r.checks)
        if (c.threshold > 0.0) worst_ratio = std::max(worst_ratio, c.value / c.threshold);
    report(5, r.pass(), "conditional characteristic-function identity",
           "5 lambdas, worst |emp-exact|/3SE = " + fmt(worst_ratio));
}

// 6. Weak convergence: coordinatewise KS between zeta_eps(1) and zeta0(1)
//    <= 0.05 at eps = 0.05 (1e4 per side), non-increasing along the schedule,
//    and E|zeta_eps(1)|^2 within 10% of |sigma|^2_L2 sqrt(2/pi) = sqrt(2).
void criterion_6() {
    const CoefficientSet cs = build_catalog_entry("oscillator");
    const EpsilonSchedule sched(std::vector<double>{0.4, 0.2, 0.1, 0.05}, 1e-2);
    VerifyOptions opts;
    opts.master_seed = 606;
    opts.ks_threshold = 0.05;
    opts.second_moment_ref = std::sqrt(2.0);
    opts.second_moment_rtol = 0.10;
    opts.limit_grid_steps = 512;
    opts.limit_h_inner = 1e-4;
    const VerificationReport r =
        check_weak_convergence(cs, Eigen::Vector2d(1.0, 0.0), 1.0, {1.0}, sched, 10000, opts);
    std::string detail;
    for (const auto& c : r.checks) {
        if (c.name == "ks_final") detail += "maxKS=" + fmt(c.value) + " tol 0.05";
        if (c.name == "second_moment") detail += " E|zeta|^2=" + fmt(c.value) + " target 1.41421";
    }
    report(6, r.pass(), "weak convergence of the deviation process", detail);
}

// 7. Limit pair reduction: psi == 1 reproduces the unit pipeline
//    path-identically on shared seeds; psi == 2 gives E L^{X0}(1,0) within 3%
//    of sqrt(8/pi).
void criterion_7() {
    bool identical = true;
    {
        const CoefficientSet cs = build_catalog_entry("constant_psi", {{"c", 1.0}});
        const TimeGrid grid = make_grid(0.0, 1.0, 100);
        const OdeSolution ode = solve_ode(cs, Eigen::VectorXd::Zero(1), grid);
        const DiffusionKernel kernel = diffusion_kernel(cs, ode);
        const FundamentalMatrix Phi = fundamental_matrix(cs, ode);
        for (std::size_t trial = 0; trial < 10; ++trial) {
            const SeedSpec seed{707, trial};
            const CorollaryPair pair = sample_corollary_pair(cs, ode, grid, seed, 1e-4);
            const FractionalKineticPath V = sample_V(grid, 1, seed, 1e-4);
            const LimitDeviationPath zeta = sample_zeta0(kernel, Phi, V);
            for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
                if (pair.X0.value(k) != V.W1.value(k)) identical = false;
                if (pair.LX0.L[k] != V.L.L[k]) identical = false;
                if (pair.zeta0.zeta.value(k) != zeta.zeta.value(k)) identical = false;
            }
        }
    }

    const CoefficientSet two = build_catalog_entry("constant_psi", {{"c", 2.0}});
    const TimeGrid grid = make_grid(0.0, 1.0, 100);
    const OdeSolution ode = solve_ode(two, Eigen::VectorXd::Zero(1), grid);
    const std::size_t n = 20000;
    std::vector<double> lt(n);
    parallel_chunks(n, kEnsembleChunk, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k)
            lt[k] = sample_corollary_pair(two, ode, grid, SeedSpec{717, k}, 5e-5).LX0.terminal();
    });
    const double mean = mean_se(lt).mean;
    const double target = std::sqrt(8.0 / M_PI);
    const double rel = std::abs(mean - target) / target;
    report(7, identical && rel <= 0.03, "time-changed limit pair reduction",
           std::string("psi=1 path-identical: ") + (identical ? "yes" : "NO") +
               ", E L^{X0}(1,0)=" + fmt(mean) + " target=" + fmt(target) + " rel err " +
               fmt(rel) + " tol 0.03");
}

// 8. Drift-only limit: E zeta~0(1) within 3% of B sqrt(2/pi) for constant
//    B-vector and Db1 == 0; prelimit order-one deviations KS-close to zeta~0
//    at the smallest eps (threshold 0.07, 1e4 samples per side).
void criterion_8() {
    const double amp = 1.0;  // b2 amplitude; forcing vector B = amp sqrt(2 pi)
    const CoefficientSet cs = build_catalog_entry("drift_only", {{"B", amp}});
    const double Bvec = amp * std::sqrt(2.0 * M_PI);
    const double target_mean = Bvec * kSqrt2OverPi;  // = 2 amp

    const TimeGrid lgrid = make_grid(0.0, 1.0, 100);
    const OdeSolution lode = solve_ode(cs, Eigen::VectorXd::Zero(1), lgrid);
    const FundamentalMatrix lphi = fundamental_matrix(cs, lode);
    const std::size_t n = 10000;
    std::vector<double> limit_vals(n);
    parallel_chunks(n, kEnsembleChunk, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            const FractionalKineticPath V = sample_V(lgrid, 1, SeedSpec{808, k}, 1e-4);
            limit_vals[k] = sample_zeta_tilde0(cs, lphi, lode, V.L).zeta.value(lgrid.n_steps());
        }
    });
    const double mean = mean_se(limit_vals).mean;
    const double rel = std::abs(mean - target_mean) / target_mean;

    // prelimit at eps = 0.05 with the quadratic step rule
    const double eps = 0.05;
    const EpsilonSchedule sched(std::vector<double>{eps}, 1e-2);
    const TimeGrid grid = sched.grid_for(eps, 1.0);
    std::vector<double> pre(n);
    parallel_chunks(n, kEnsembleChunk, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            const SamplePath Y = simulate_Y_unit_phi(cs, eps, Eigen::VectorXd::Zero(1), grid,
                                                     SeedSpec{818, k});
            pre[k] = Y.value(grid.n_steps()) / eps;  // y(t) == 0
        }
    });
    const double ks = ks_two_sample(pre, limit_vals);
    report(8, rel <= 0.03 && ks <= 0.07, "drift-only order-one limit",
           "E zeta~0(1)=" + fmt(mean) + " target=" + fmt(target_mean) + " rel " + fmt(rel) +
               " tol 0.03; KS=" + fmt(ks) + " tol 0.07");
}

// 9. Figure-regime demo: deterministic artifact; max deviation from cos(t)
//    scales linearly in |sigma| (ratio within 1% across {10, 100}).
void criterion_9() {
    const SeedSpec seed{909, 0};
    const OscillatorDemoResult d100 = oscillator_demo(0.1, 100.0, 10.0, seed, 4096);
    const OscillatorDemoResult d100b = oscillator_demo(0.1, 100.0, 10.0, seed, 4096);
    std::ostringstream a, b;
    write_csv(d100, a);
    write_csv(d100b, b);
    const bool deterministic = a.str() == b.str();

    const OscillatorDemoResult d10 = oscillator_demo(0.1, 10.0, 10.0, seed, 4096);
    double m100 = 0.0, m10 = 0.0;
    for (std::size_t k = 0; k < d100.grid.n_nodes(); ++k) {
        m100 = std::max(m100, std::abs(d100.approx[k] - d100.cosine[k]));
        m10 = std::max(m10, std::abs(d10.approx[k] - d10.cosine[k]));
    }
    const double ratio = m100 / m10;
    const bool linear = std::abs(ratio - 10.0) / 10.0 <= 0.01;
    report(9, deterministic && linear, "oscillator demo artifact",
           std::string("deterministic: ") + (deterministic ? "yes" : "NO") +
               ", amplitude ratio=" + fmt(ratio) + " target 10 +- 1%");
}

// 10. Property suites from the module invariants.
void criterion_10() {
    std::vector<std::string> failures;

    {  // local-time monotonicity and flatness off the level
        const TimeGrid grid = make_grid(0.0, 1.0, 20000);
        for (std::size_t k = 0; k < 10; ++k) {
            const SamplePath w = sample_brownian(grid, 1, SeedSpec{1001, k});
            const double delta = default_bandwidth(grid);
            const LocalTimeCurve occ = local_time_occupation(w, 0.0, delta);
            const LocalTimeCurve tan = local_time_tanaka(w, 0.0);
            if (occ.L.front() != 0.0 || tan.L.front() != 0.0) failures.push_back("L(0)!=0");
            for (std::size_t j = 0; j + 1 < grid.n_nodes(); ++j) {
                if (occ.L[j + 1] < occ.L[j] || tan.L[j + 1] < tan.L[j]) {
                    failures.push_back("monotonicity");
                    break;
                }
                if (std::abs(w.value(j)) > delta && occ.L[j + 1] != occ.L[j]) {
                    failures.push_back("occupation flatness");
                    break;
                }
            }
        }
    }

    {  // V grows only with L
        const TimeGrid grid = make_grid(0.0, 1.0, 256);
        for (std::size_t k = 0; k < 10; ++k) {
            const FractionalKineticPath V = sample_V(grid, 2, SeedSpec{1002, k}, 1e-4);
            for (std::size_t j = 0; j + 1 < grid.n_nodes(); ++j) {
                const double dL = V.L.L[j + 1] - V.L.L[j];
                const double dV = (V.V.state(j + 1) - V.V.state(j)).norm();
                if (dV != 0.0 && dL <= 0.0) {
                    failures.push_back("V flatness");
                    break;
                }
            }
        }
    }

    {  // cocycle of the fundamental matrix
        const CoefficientSet cs = build_catalog_entry("oscillator");
        const OdeSolution ode = solve_ode(cs, Eigen::Vector2d(1.0, 0.0), make_grid(0.0, 2.0, 1000));
        const FundamentalMatrix Phi = fundamental_matrix(cs, ode);
        for (std::size_t s = 0; s <= 900; s += 90) {
            const std::size_t u = s + 50, t = s + 100;
            if ((Phi.at(t, s) - Phi.at(t, u) * Phi.at(u, s)).norm() > 1e-6) {
                failures.push_back("cocycle");
                break;
            }
        }
    }

    {  // matrix square-root round trip
        std::mt19937_64 eng(99);
        std::normal_distribution<double> normal;
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::MatrixXd M(3, 3);
            for (int i = 0; i < 9; ++i) M(i / 3, i % 3) = normal(eng);
            const Eigen::MatrixXd A = M * M.transpose();
            const Eigen::MatrixXd S = psd_sqrt(A);
            if ((S * S - A).norm() > 1e-8 * std::max(1.0, A.norm())) {
                failures.push_back("psd sqrt round-trip");
                break;
            }
        }
    }

    {  // time-change round trip
        const CoefficientSet cs = build_catalog_entry("psi_y");
        const TimeGrid grid = make_grid(0.0, 1.0, 1000);
        const CoupledTrajectory traj = simulate_pair_general(
            cs, 0.2, 0.0, Eigen::VectorXd::Constant(1, 0.5), grid, SeedSpec{1003, 0});
        const TimeChange tc = compute_time_change(traj, cs);
        for (std::size_t k = 0; k <= 1000; k += 97)
            if (std::abs(tc.t_of_s(tc.s_of_t[k]) - grid.node(k)) > grid.step()) {
                failures.push_back("time-change round trip");
                break;
            }
    }

    {  // determinism of every seeded operation
        const TimeGrid grid = make_grid(0.0, 1.0, 200);
        const SeedSpec seed{1004, 5};
        if (!(sample_brownian(grid, 2, seed) == sample_brownian(grid, 2, seed)))
            failures.push_back("determinism: sample_brownian");
        const CoefficientSet osc = build_catalog_entry("oscillator");
        const Eigen::Vector2d y0(1.0, 0.0);
        if (!(simulate_Y_unit_phi(osc, 0.1, y0, grid, seed) ==
              simulate_Y_unit_phi(osc, 0.1, y0, grid, seed)))
            failures.push_back("determinism: simulate_Y_unit_phi");
        const CoefficientSet cp = build_catalog_entry("constant_psi");
        const Eigen::VectorXd z0 = Eigen::VectorXd::Zero(1);
        const CoupledTrajectory ta = simulate_pair_general(cp, 0.1, 0.0, z0, grid, seed);
        const CoupledTrajectory tb = simulate_pair_general(cp, 0.1, 0.0, z0, grid, seed);
        if (!(ta.X == tb.X && ta.Y == tb.Y)) failures.push_back("determinism: pair_general");
        const OdeSolution ode = solve_ode(osc, y0, grid);
        if (!(simulate_J(osc, 0.1, ode, grid, seed) == simulate_J(osc, 0.1, ode, grid, seed)))
            failures.push_back("determinism: simulate_J");
        const FractionalKineticPath va = sample_V(grid, 2, seed, 1e-3);
        const FractionalKineticPath vb = sample_V(grid, 2, seed, 1e-3);
        if (!(va.V == vb.V && va.L.L == vb.L.L)) failures.push_back("determinism: sample_V");
        const OdeSolution code = solve_ode(cp, z0, grid);
        const CorollaryPair ca = sample_corollary_pair(cp, code, grid, seed, 1e-3);
        const CorollaryPair cb = sample_corollary_pair(cp, code, grid, seed, 1e-3);
        if (!(ca.X0 == cb.X0 && ca.zeta0.zeta == cb.zeta0.zeta))
            failures.push_back("determinism: corollary pair");
    }

    std::string detail = "local-time, V-flatness, cocycle, sqrt, time-change, determinism";
    if (!failures.empty()) {
        detail = "failed:";
        for (const auto& f : failures) detail += " " + f;
    }
    report(10, failures.empty(), "module property suites", detail);
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    auto enabled = [&](int c) { return wanted.empty() || wanted.count(c) > 0; };

    if (enabled(1)) criterion_1();
    if (enabled(2)) criterion_2();
    if (enabled(3)) criterion_3();
    if (enabled(4)) criterion_4();
    if (enabled(5)) criterion_5();
    if (enabled(6)) criterion_6();
    if (enabled(7)) criterion_7();
    if (enabled(8)) criterion_8();
    if (enabled(9)) criterion_9();
    if (enabled(10)) criterion_10();

    if (g_failures == 0)
        std::printf("acceptance: all criteria passed\n");
    else
        std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return g_failures;
}
