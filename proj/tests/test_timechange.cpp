#include <doctest.h>

#include <cmath>
#include <random>

#include "nullrec/coefficients.hpp"
#include "nullrec/quadrature.hpp"
#include "nullrec/stats.hpp"
#include "nullrec/timechange.hpp"

using namespace nullrec;

TEST_CASE("constant psi: s(t) = c^2 t exactly") {
    const TimeGrid grid = make_grid(0.0, 1.0, 500);
    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(1);

    const CoefficientSet unit = build_catalog_entry("constant_psi", {{"c", 1.0}});
    const CoupledTrajectory t1 = simulate_pair_general(unit, 0.2, 0.0, y0, grid, SeedSpec{1, 0});
    const TimeChange tc1 = compute_time_change(t1, unit);
    CHECK(tc1.slope_ok);
    for (std::size_t k = 0; k < grid.n_nodes(); ++k)
        CHECK(tc1.s_of_t[k] == doctest::Approx(grid.node(k)).epsilon(1e-12));

    const CoefficientSet two = build_catalog_entry("constant_psi", {{"c", 2.0}});
    const CoupledTrajectory t2 = simulate_pair_general(two, 0.2, 0.0, y0, grid, SeedSpec{1, 0});
    const TimeChange tc2 = compute_time_change(t2, two);
    for (std::size_t k = 0; k < grid.n_nodes(); ++k)
        CHECK(tc2.s_of_t[k] == doctest::Approx(4.0 * grid.node(k)).epsilon(1e-12));
}

TEST_CASE("inverse round trip within one grid step") {
    const CoefficientSet cs = build_catalog_entry("psi_y", {{"c0", 1.0}, {"q", 1.0}});
    const TimeGrid grid = make_grid(0.0, 1.0, 2000);
    Eigen::VectorXd y0 = Eigen::VectorXd::Constant(1, 0.5);
    const CoupledTrajectory traj = simulate_pair_general(cs, 0.2, 0.0, y0, grid, SeedSpec{8, 2});
    const TimeChange tc = compute_time_change(traj, cs);
    CHECK(tc.slope_ok);

    std::mt19937_64 eng(5);
    std::uniform_int_distribution<std::size_t> node(0, grid.n_steps());
    for (int i = 0; i < 200; ++i) {
        const std::size_t k = node(eng);
        CHECK(std::abs(tc.t_of_s(tc.s_of_t[k]) - grid.node(k)) <= grid.step());
    }
    // exact round trip at breakpoints of the strictly increasing curve
    CHECK(tc.t_of_s(tc.s_of_t[0]) == grid.node(0));
    CHECK(tc.t_of_s(tc.s_of_t.back()) == grid.node(grid.n_steps()));
}

TEST_CASE("bi-Lipschitz sandwich c1^2 t <= s(t) <= c2^2 t") {
    const CoefficientSet cs = build_catalog_entry("psi_bump", {{"c0", 1.0}, {"p", 1.0}});
    const TimeGrid grid = make_grid(0.0, 1.0, 1000);
    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(1);
    const CoupledTrajectory traj = simulate_pair_general(cs, 0.3, 0.0, y0, grid, SeedSpec{4, 0});
    const TimeChange tc = compute_time_change(traj, cs);
    const double c1_sq = cs.c1 * cs.c1;
    const double c2_sq = cs.c2 * cs.c2;
    for (std::size_t k = 1; k < grid.n_nodes(); ++k) {
        const double t = grid.node(k);
        CHECK(tc.s_of_t[k] >= c1_sq * t * (1.0 - 1e-12));
        CHECK(tc.s_of_t[k] <= c2_sq * t * (1.0 + 1e-12));
    }
}

TEST_CASE("transform is the identity on already-unit entries") {
    const CoefficientSet cs = build_catalog_entry("constant_psi", {{"c", 1.0}, {"a", 0.7}});
    const CoefficientSet out = transformed_coefficients(cs);
    Eigen::VectorXd y(1);
    for (double x : {-1.5, 0.0, 0.4, 2.2}) {
        for (double yv : {-0.7, 0.0, 1.1}) {
            y[0] = yv;
            CHECK(out.sigma(x, y)(0, 0) == cs.sigma(x, y)(0, 0));
            CHECK(out.b2(x, y)[0] == cs.b2(x, y)[0]);
            CHECK(out.psi1(y) == 1.0);
            CHECK(out.psi2(x, y) == 0.0);
            CHECK(out.b_hat(x) == cs.b_hat(x));
            CHECK(out.sigma_hat_sq(x) == cs.sigma_hat_sq(x));
        }
    }
    CHECK(out.c1 == 1.0);
    CHECK(out.c2 == 1.0);
    CHECK(out.l1_sigma_hat_sq == cs.l1_sigma_hat_sq);
}

TEST_CASE("constant psi = 2 rescales the coefficients") {
    // override psi1 of the gaussian_bump entry (which has nonzero b2 and sigma)
    CoefficientSet cs = build_catalog_entry("gaussian_bump", {{"A", 1.0}});
    cs.psi1 = [](const Eigen::VectorXd&) { return 2.0; };
    cs.c1 = 2.0;
    cs.c2 = 2.0;
    const CoefficientSet out = transformed_coefficients(cs);
    Eigen::VectorXd y(1);
    for (double x : {-0.9, 0.0, 1.3}) {
        for (double yv : {-0.2, 0.8}) {
            y[0] = yv;
            CHECK(out.b2(x, y)[0] == doctest::Approx(cs.b2(x, y)[0] / 4.0).epsilon(1e-15));
            CHECK(out.sigma(x, y)(0, 0) ==
                  doctest::Approx(cs.sigma(x, y)(0, 0) / 2.0).epsilon(1e-15));
        }
    }
    CHECK(out.l1_sigma_hat_sq == doctest::Approx(cs.l1_sigma_hat_sq / 4.0));
    CHECK(out.l1_b_hat == doctest::Approx(cs.l1_b_hat / 4.0));
}

TEST_CASE("transformed envelope keeps the L1 property (psi2 Gaussian bump)") {
    const double c0 = 2.0, p = 1.0, a = 1.0;
    const CoefficientSet cs =
        build_catalog_entry("psi_bump", {{"c0", c0}, {"p", p}, {"a", a}});
    const CoefficientSet out = transformed_coefficients(cs);

    // declared envelope norm has the closed form a^2 sqrt(pi) / c0^2
    const double declared = l1_norm_envelope(out, EnvelopeKind::sigma_hat_sq);
    CHECK(declared == doctest::Approx(a * a * std::sqrt(M_PI) / (c0 * c0)));

    // the true transformed trace integrates to something between the
    // (c0 + p)^{-2} and c0^{-2} scalings of the Gaussian mass
    Eigen::VectorXd y = Eigen::VectorXd::Zero(1);
    auto trace = [&](double x) {
        const Eigen::MatrixXd s = out.sigma(x, y);
        return s.squaredNorm();
    };
    const double integral = integrate_real_line(trace);
    CHECK(integral <= declared * (1.0 + 1e-9));
    CHECK(integral >= a * a * std::sqrt(M_PI) / ((c0 + p) * (c0 + p)) * (1.0 - 1e-9));
}

TEST_CASE("verify_timechange_limit: constant psi sits at the quadrature floor") {
    const CoefficientSet cs = build_catalog_entry("constant_psi", {{"c", 2.0}});
    const TimeGrid ogrid = make_grid(0.0, 0.5, 128);
    const OdeSolution ode = solve_ode(cs, Eigen::VectorXd::Zero(1), ogrid);
    const EpsilonSchedule sched(std::vector<double>{0.4, 0.2}, 1e-2);
    const VerificationReport report = verify_timechange_limit(cs, ode, sched, 8);
    INFO(report.to_text());
    CHECK(report.pass());
}

TEST_CASE("verify_timechange_limit: psi2 bump discrepancy decreases in eps") {
    const CoefficientSet cs = build_catalog_entry("psi_bump", {{"c0", 1.0}, {"p", 1.0}});
    const TimeGrid ogrid = make_grid(0.0, 0.5, 128);
    const OdeSolution ode = solve_ode(cs, Eigen::VectorXd::Zero(1), ogrid);
    const EpsilonSchedule sched(std::vector<double>{0.4, 0.2, 0.1, 0.05}, 1e-2);
    TimechangeVerifyOptions opts;
    opts.master_seed = 99;
    const VerificationReport report = verify_timechange_limit(cs, ode, sched, 200, opts);
    INFO(report.to_text());
    CHECK(report.pass());
}

TEST_CASE("verify_timechange_limit: y-dependent psi1 decreases like eps") {
    const CoefficientSet cs = build_catalog_entry("psi_y", {{"c0", 1.0}, {"q", 1.0}});
    const TimeGrid ogrid = make_grid(0.0, 0.5, 128);
    const OdeSolution ode = solve_ode(cs, Eigen::VectorXd::Constant(1, 0.5), ogrid);
    const EpsilonSchedule sched(std::vector<double>{0.4, 0.2, 0.1, 0.05}, 1e-2);
    TimechangeVerifyOptions opts;
    opts.master_seed = 7;
    const VerificationReport report = verify_timechange_limit(cs, ode, sched, 400, opts);
    INFO(report.to_text());
    CHECK(report.pass());

    // Lipschitz composition with the Lemma rate: discrepancy roughly linear in eps
    std::vector<double> eps, disc;
    for (const auto& pt : report.points) {
        eps.push_back(pt.x);
        disc.push_back(pt.estimate);
    }
    const SlopeFit fit = loglog_fit(eps, disc);
    CHECK(fit.slope >= 0.5);
    CHECK(fit.slope <= 1.6);
}

TEST_CASE("transform rejects violated psi bounds") {
    CoefficientSet cs = build_catalog_entry("constant_psi", {{"c", 1.0}});
    cs.c1 = 0.0;
    CHECK_THROWS_AS(transformed_coefficients(cs), std::invalid_argument);
}
