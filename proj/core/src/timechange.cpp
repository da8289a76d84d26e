#include "nullrec/timechange.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "nullrec/parallel.hpp"
#include "nullrec/paths.hpp"
#include "nullrec/stats.hpp"

namespace nullrec {

double TimeChange::t_of_s(double s) const {
    if (s <= s_of_t.front()) return grid.node(0);
    if (s >= s_of_t.back()) return grid.node(grid.n_steps());
    const auto it = std::upper_bound(s_of_t.begin(), s_of_t.end(), s);
    const auto k = static_cast<std::size_t>(std::distance(s_of_t.begin(), it)) - 1;
    const double s0 = s_of_t[k];
    const double s1 = s_of_t[k + 1];
    const double frac = s1 > s0 ? (s - s0) / (s1 - s0) : 0.0;
    return grid.node(k) + frac * grid.step();
}

TimeChange compute_time_change(const CoupledTrajectory& traj, const CoefficientSet& cs) {
    if (!(cs.c1 > 0.0))
        throw std::invalid_argument("compute_time_change: psi bound condition violated");
    const TimeGrid& grid = traj.grid;
    const double h = grid.step();

    TimeChange tc;
    tc.grid = grid;
    tc.c1_sq = cs.c1 * cs.c1;
    tc.c2_sq = cs.c2 * cs.c2;
    tc.s_of_t.resize(grid.n_nodes());
    tc.s_of_t[0] = 0.0;

    auto integrand = [&](std::size_t k) {
        const double p = cs.psi1(traj.Y.state(k)) + cs.psi2(traj.X.value(k), traj.Y.state(k));
        return p * p;
    };

    const double tol = 1e-9;
    double g_prev = integrand(0);
    for (std::size_t k = 0; k + 1 < grid.n_nodes(); ++k) {
        const double g_next = integrand(k + 1);
        const double ds = h * (0.5 * (g_prev + g_next));
        tc.s_of_t[k + 1] = tc.s_of_t[k] + ds;
        const double slope = ds / h;
        if (slope < tc.c1_sq * (1.0 - tol) || slope > tc.c2_sq * (1.0 + tol)) {
            tc.slope_ok = false;
            if (tc.violations.size() < 16)
                tc.violations.push_back("slope " + std::to_string(slope) + " outside [c1^2,c2^2] at node " +
                                        std::to_string(k));
        }
        g_prev = g_next;
    }
    return tc;
}

CoefficientSet transformed_coefficients(const CoefficientSet& cs) {
    if (!(cs.c1 > 0.0))
        throw std::invalid_argument("transformed_coefficients: psi bound condition violated");
    CoefficientSet out = cs;
    out.name = cs.name + "~timechange";

    const auto psi1 = cs.psi1;
    const auto psi2 = cs.psi2;
    if (!cs.b2_is_zero) {
        const auto b2 = cs.b2;
        out.b2 = [b2, psi1, psi2](double x, const Eigen::VectorXd& y) {
            const double p = psi1(y) + psi2(x, y);
            return (b2(x, y) / (p * p)).eval();
        };
    }
    if (!cs.sigma_is_zero) {
        const auto sigma = cs.sigma;
        out.sigma = [sigma, psi1, psi2](double x, const Eigen::VectorXd& y) {
            const double p = psi1(y) + psi2(x, y);
            return (sigma(x, y) / p).eval();
        };
    }
    out.psi1 = [](const Eigen::VectorXd&) { return 1.0; };
    out.psi2 = [](double, const Eigen::VectorXd&) { return 0.0; };

    const double c1_sq = cs.c1 * cs.c1;
    const auto b_hat = cs.b_hat;
    const auto sigma_hat_sq = cs.sigma_hat_sq;
    out.b_hat = [b_hat, c1_sq](double x) { return b_hat(x) / c1_sq; };
    out.sigma_hat_sq = [sigma_hat_sq, c1_sq](double x) { return sigma_hat_sq(x) / c1_sq; };
    out.l1_b_hat = cs.l1_b_hat / c1_sq;
    out.l1_sigma_hat_sq = cs.l1_sigma_hat_sq / c1_sq;

    // Conservative Lipschitz bounds from the quotient rule; the psi terms
    // vanish for constant-psi entries. Envelope suprema are probed on a wide
    // x-range and padded.
    const double sup_psi_lip = cs.lip_psi1 + cs.lip_psi2;
    double sup_b = 0.0, sup_s = 0.0;
    if (sup_psi_lip > 0.0) {
        for (int i = 0; i <= 512; ++i) {
            const double x = -20.0 + 40.0 * static_cast<double>(i) / 512.0;
            sup_b = std::max(sup_b, cs.b_hat(x));
            sup_s = std::max(sup_s, std::sqrt(std::max(cs.sigma_hat_sq(x), 0.0)));
        }
        sup_b *= 1.5;
        sup_s *= 1.5;
    }
    out.lip_b2 = cs.lip_b2 / c1_sq + 2.0 * sup_b * cs.c2 * sup_psi_lip / (c1_sq * c1_sq);
    out.lip_sigma = cs.lip_sigma / cs.c1 + sup_s * sup_psi_lip / c1_sq;
    out.c1 = 1.0;
    out.c2 = 1.0;
    out.lip_psi1 = 0.0;
    out.lip_psi2 = 0.0;
    return out;
}

VerificationReport verify_timechange_limit(const CoefficientSet& cs, const OdeSolution& ode,
                                           const EpsilonSchedule& schedule, std::size_t n_paths,
                                           const TimechangeVerifyOptions& opts) {
    if (!cs.b1_is_bounded)
        throw std::invalid_argument("verify_timechange_limit: requires bounded b1");
    const double T = ode.grid.t_end();

    VerificationReport report;
    report.test_name = "verify_timechange_limit";
    report.params["entry"] = cs.name;
    report.params["n_paths"] = n_paths;
    report.params["master_seed"] = opts.master_seed;
    report.params["h_ref"] = schedule.h_ref;
    report.params["T"] = T;

    std::vector<double> discrepancies;
    const bool degenerate = cs.lip_psi1 == 0.0 && cs.lip_psi2 == 0.0 && cs.c1 == cs.c2;
    for (double eps : schedule.values) {
        const TimeGrid grid = schedule.grid_for(eps, T);
        const OdeSolution flow = solve_ode(cs, ode.y0, grid);

        // s0(t) on this grid by the same trapezoid rule.
        std::vector<double> s0(grid.n_nodes());
        s0[0] = 0.0;
        {
            auto p = [&](std::size_t k) {
                const double v = cs.psi1(flow.y[k]);
                return v * v;
            };
            double g_prev = p(0);
            for (std::size_t k = 0; k + 1 < grid.n_nodes(); ++k) {
                const double g_next = p(k + 1);
                s0[k + 1] = s0[k] + grid.step() * (0.5 * (g_prev + g_next));
                g_prev = g_next;
            }
        }

        std::vector<double> sup_sq(n_paths);
        parallel_chunks(
            n_paths, kEnsembleChunk,
            [&](std::size_t, std::size_t begin, std::size_t end) {
                for (std::size_t k = begin; k < end; ++k) {
                    const CoupledTrajectory traj = simulate_pair_general(
                        cs, eps, opts.x0, ode.y0, grid, SeedSpec{opts.master_seed, k});
                    const TimeChange tc = compute_time_change(traj, cs);
                    double worst = 0.0;
                    for (std::size_t j = 0; j < grid.n_nodes(); ++j)
                        worst = std::max(worst, std::abs(tc.s_of_t[j] - s0[j]));
                    sup_sq[k] = worst * worst;
                }
            },
            opts.threads);

        const MeanSE m = mean_se(sup_sq);
        report.points.push_back({"eps=" + std::to_string(eps), eps, m.mean, m.se});
        discrepancies.push_back(m.mean);
    }

    if (degenerate) {
        // Constant psi: discrepancy is pure quadrature error.
        const double worst = *std::max_element(discrepancies.begin(), discrepancies.end());
        report.add_check("quadrature_floor", worst, 1e-16, worst <= 1e-16,
                         "constant psi1, psi2 == 0");
    } else {
        bool decreasing = true;
        for (std::size_t i = 1; i < discrepancies.size(); ++i)
            if (!(discrepancies[i] < discrepancies[i - 1])) decreasing = false;
        report.add_check("monotone_decrease", decreasing ? 1.0 : 0.0, 1.0, decreasing,
                         "E sup|s_eps - s0|^2 decreasing along the schedule");
    }
    return report;
}

void write_csv(const TimeChange& tc, std::ostream& os,
               const std::map<std::string, std::string>& meta) {
    for (const auto& [key, val] : meta) os << "# " << key << "=" << val << "\n";
    os << "t,s\n";
    for (std::size_t k = 0; k < tc.s_of_t.size(); ++k)
        os << format_g17(tc.grid.node(k)) << "," << format_g17(tc.s_of_t[k]) << "\n";
}

}  // namespace nullrec
