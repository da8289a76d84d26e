#include "nullrec/verify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "nullrec/limit.hpp"
#include "nullrec/localtime.hpp"
#include "nullrec/parallel.hpp"
#include "nullrec/paths.hpp"
#include "nullrec/stats.hpp"

namespace nullrec {

namespace {
constexpr double kSqrt2OverPi = 0.79788456080286536;

std::string eps_label(double eps) { return "eps=" + std::to_string(eps); }
}  // namespace

double abs_moment_normal(int p) {
    if (p < 1) throw std::invalid_argument("abs_moment_normal: p must be >= 1");
    // E|Z|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi)
    return std::pow(2.0, 0.5 * p) * std::tgamma(0.5 * (p + 1)) / std::sqrt(M_PI);
}

VerificationReport check_lemma_L1_bound(const PsiFunction& psi, double t, int p,
                                        const EpsilonSchedule& schedule, std::size_t n_paths,
                                        const VerifyOptions& opts) {
    if (!(t > 0.0)) throw std::invalid_argument("check_lemma_L1_bound: t must be positive");
    if (psi.l1_norm < 0.0)
        throw std::invalid_argument("check_lemma_L1_bound: psi must be nonnegative integrable");

    const std::vector<double> t_sweep = {0.25, 0.5, 1.0, 2.0};
    const double t_max = std::max(t, t_sweep.back());

    VerificationReport report;
    report.test_name = "check_lemma_L1_bound";
    report.params["psi"] = psi.name;
    report.params["l1_norm"] = psi.l1_norm;
    report.params["t"] = t;
    report.params["p"] = p;
    report.params["n_paths"] = n_paths;
    report.params["h_ref"] = schedule.h_ref;
    report.params["master_seed"] = opts.master_seed;

    const double limit_at = [&](double tt) {
        return std::pow(psi.l1_norm, p) * std::pow(tt, 0.5 * p) * abs_moment_normal(p);
    }(t);

    std::vector<double> eps_estimates, eps_ses;
    std::vector<double> sweep_estimates(t_sweep.size(), 0.0);

    for (std::size_t ie = 0; ie < schedule.values.size(); ++ie) {
        const double eps = schedule.values[ie];
        const bool smallest = (ie + 1 == schedule.values.size());
        const TimeGrid grid = schedule.grid_for(eps, t_max);
        const double h = grid.step();
        const double sqh = std::sqrt(h);

        // Probe node indices: the argument t, plus the t-sweep on the last eps.
        std::vector<std::size_t> probes{grid.nearest_node(t)};
        if (smallest)
            for (double tt : t_sweep) probes.push_back(grid.nearest_node(tt));

        std::vector<std::vector<double>> samples(probes.size(),
                                                 std::vector<double>(n_paths, 0.0));
        parallel_chunks(
            n_paths, kEnsembleChunk,
            [&](std::size_t, std::size_t begin, std::size_t end) {
                for (std::size_t k = begin; k < end; ++k) {
                    GaussianStream g(SeedSpec{opts.master_seed, k}, kChannelW1);
                    double xf = 0.0;  // eps^{-1} W(t_j)
                    double acc = 0.0;
                    const std::size_t last = *std::max_element(probes.begin(), probes.end());
                    for (std::size_t j = 0; j <= last; ++j) {
                        for (std::size_t ip = 0; ip < probes.size(); ++ip)
                            if (probes[ip] == j)
                                samples[ip][k] = std::pow(std::abs(acc / eps), p);
                        if (j == last) break;
                        acc += psi.f(xf) * h;
                        xf += (sqh * g.next()) / eps;
                    }
                }
            },
            opts.threads);

        const MeanSE m = mean_se(samples[0]);
        report.points.push_back({eps_label(eps) + " t=" + std::to_string(t), eps, m.mean, m.se});
        eps_estimates.push_back(m.mean);
        eps_ses.push_back(m.se);

        if (smallest) {
            for (std::size_t ip = 1; ip < probes.size(); ++ip) {
                const MeanSE ms = mean_se(samples[ip]);
                sweep_estimates[ip - 1] = ms.mean;
                report.points.push_back(
                    {"t=" + std::to_string(t_sweep[ip - 1]), t_sweep[ip - 1], ms.mean, ms.se});
            }
        }
    }

    if (psi.l1_norm == 0.0) {
        const double worst = *std::max_element(eps_estimates.begin(), eps_estimates.end());
        report.add_check("zero_psi", worst, 0.0, worst == 0.0, "psi == 0 forces zero moments");
        return report;
    }

    const double worst = *std::max_element(eps_estimates.begin(), eps_estimates.end());
    report.add_upper_bound_check("uniform_bound", worst, opts.bound_factor * limit_at,
                                 "max over schedule vs factor * closed-form limit");

    const double expected_slope = 0.5 * p;
    bool sweep_ok = true;
    for (double v : sweep_estimates)
        if (!(v > 0.0)) sweep_ok = false;
    if (sweep_ok) {
        const std::vector<double> ts = {0.25, 0.5, 1.0, 2.0};
        const SlopeFit fit = loglog_fit(ts, sweep_estimates);
        report.slope = fit.slope;
        report.slope_se = fit.slope_se;
        const double tol = opts.t_slope_tol * 2.0 * expected_slope;  // 0.1 per 0.5 of slope
        report.add_check("t_slope", fit.slope, expected_slope,
                         std::abs(fit.slope - expected_slope) <= tol,
                         "log-log slope in t vs p/2");
    }

    const double final_est = eps_estimates.back();
    report.tolerance = opts.limit_rtol;
    report.add_check("small_eps_limit", final_est, limit_at,
                     std::abs(final_est - limit_at) <= opts.limit_rtol * limit_at,
                     "smallest-eps estimate vs |psi|_1^p t^{p/2} E|Z|^p");
    return report;
}

VerificationReport check_lemma_rate(const CoefficientSet& cs, const Eigen::VectorXd& y0, double T,
                                    int p, const EpsilonSchedule& schedule, std::size_t n_paths,
                                    const VerifyOptions& opts) {
    VerificationReport report;
    report.test_name = "check_lemma_rate";
    report.params["entry"] = cs.name;
    report.params["T"] = T;
    report.params["p"] = p;
    report.params["n_paths"] = n_paths;
    report.params["h_ref"] = schedule.h_ref;
    report.params["master_seed"] = opts.master_seed;

    if (cs.b2_is_zero && cs.sigma_is_zero) {
        report.add_check("degenerate_skip", 0.0, 0.0, true,
                         "no perturbation: moments at discretization floor, test skipped");
        return report;
    }

    std::vector<double> sups, sup_ses;
    for (double eps : schedule.values) {
        const TimeGrid grid = schedule.grid_for(eps, T);
        const OdeSolution flow = solve_ode(cs, y0, grid);
        const std::size_t n_nodes = grid.n_nodes();
        const std::size_t n_chunks = (n_paths + kEnsembleChunk - 1) / kEnsembleChunk;

        std::vector<std::vector<double>> chunk_sum(n_chunks), chunk_sumsq(n_chunks);
        parallel_chunks(
            n_paths, kEnsembleChunk,
            [&](std::size_t c, std::size_t begin, std::size_t end) {
                auto& sum = chunk_sum[c];
                auto& sumsq = chunk_sumsq[c];
                sum.assign(n_nodes, 0.0);
                sumsq.assign(n_nodes, 0.0);
                for (std::size_t k = begin; k < end; ++k) {
                    const SamplePath Y =
                        simulate_Y_unit_phi(cs, eps, y0, grid, SeedSpec{opts.master_seed, k});
                    for (std::size_t j = 0; j < n_nodes; ++j) {
                        const double v = std::pow((Y.state(j) - flow.y[j]).norm(), p);
                        sum[j] += v;
                        sumsq[j] += v * v;
                    }
                }
            },
            opts.threads);

        std::vector<double> node_sum(n_nodes, 0.0), node_sumsq(n_nodes, 0.0);
        for (std::size_t c = 0; c < n_chunks; ++c) {
            for (std::size_t j = 0; j < n_nodes; ++j) {
                node_sum[j] += chunk_sum[c][j];
                node_sumsq[j] += chunk_sumsq[c][j];
            }
        }

        double sup = 0.0;
        std::size_t argmax = 0;
        const double dn = static_cast<double>(n_paths);
        for (std::size_t j = 0; j < n_nodes; ++j) {
            const double mean = node_sum[j] / dn;
            if (mean > sup) {
                sup = mean;
                argmax = j;
            }
        }
        const double mean = node_sum[argmax] / dn;
        const double var = std::max(0.0, (node_sumsq[argmax] - dn * mean * mean) / (dn - 1.0));
        const double se = std::sqrt(var / dn);
        report.points.push_back({eps_label(eps), eps, sup, se});
        sups.push_back(sup);
        sup_ses.push_back(se);
    }

    const SlopeFit fit = loglog_fit(schedule.values, sups);
    report.slope = fit.slope;
    report.slope_se = fit.slope_se;
    const double expected = 0.5 * p;
    const double tol = opts.rate_slope_rtol * expected;
    report.tolerance = tol;
    report.add_check("rate_slope", fit.slope, expected, std::abs(fit.slope - expected) <= tol,
                     "log-log slope of sup_t E|Y-y|^p vs eps, target p/2");
    return report;
}

VerificationReport check_reduction(const CoefficientSet& cs, const Eigen::VectorXd& y0, double T,
                                   const EpsilonSchedule& schedule, std::size_t n_paths,
                                   const VerifyOptions& opts) {
    VerificationReport report;
    report.test_name = "check_reduction";
    report.params["entry"] = cs.name;
    report.params["T"] = T;
    report.params["n_paths"] = n_paths;
    report.params["h_ref"] = schedule.h_ref;
    report.params["master_seed"] = opts.master_seed;

    std::vector<double> D, D_se, R;
    for (double eps : schedule.values) {
        const TimeGrid grid = schedule.grid_for(eps, T);
        const OdeSolution flow = solve_ode(cs, y0, grid);
        const double h = grid.step();
        const double sqh = std::sqrt(h);
        const int r = cs.noise_dim;

        std::vector<double> sup_yz(n_paths), sup_yy(n_paths);
        parallel_chunks(
            n_paths, kEnsembleChunk,
            [&](std::size_t, std::size_t begin, std::size_t end) {
                Eigen::VectorXd dW2(r);
                for (std::size_t k = begin; k < end; ++k) {
                    // Y, J and Z coupled on the same (W1, W2) streams.
                    GaussianStream g1(SeedSpec{opts.master_seed, k}, kChannelW1);
                    GaussianStream g2(SeedSpec{opts.master_seed, k}, kChannelW2);
                    Eigen::VectorXd y = y0, z = y0;
                    double xf = 0.0;
                    double wyz = 0.0, wyy = 0.0;
                    for (std::size_t j = 0; j + 1 < grid.n_nodes(); ++j) {
                        Eigen::VectorXd drift = cs.b1(y);
                        if (!cs.b2_is_zero) drift += cs.b2(xf, y);
                        Eigen::VectorXd ynext = y + h * drift;
                        Eigen::VectorXd znext = z + h * cs.b1(z);
                        const double dW1 = sqh * g1.next();
                        for (int jj = 0; jj < r; ++jj) dW2[jj] = sqh * g2.next();
                        if (!cs.sigma_is_zero) {
                            ynext += cs.sigma(xf, y) * dW2;
                            znext += cs.sigma(xf, flow.y[j]) * dW2;  // dJ with frozen slow arg
                        }
                        xf += dW1 / eps;
                        y = ynext;
                        z = znext;
                        wyz = std::max(wyz, (y - z).squaredNorm());
                        wyy = std::max(wyy, (y - flow.y[j + 1]).squaredNorm());
                    }
                    sup_yz[k] = wyz;
                    sup_yy[k] = wyy;
                }
            },
            opts.threads);

        const MeanSE myz = mean_se(sup_yz);
        const MeanSE myy = mean_se(sup_yy);
        report.points.push_back({eps_label(eps) + " D", eps, myz.mean / eps, myz.se / eps});
        report.points.push_back({eps_label(eps) + " R", eps, myy.mean / eps, myy.se / eps});
        D.push_back(myz.mean / eps);
        D_se.push_back(myz.se / eps);
        R.push_back(myy.mean / eps);
    }

    const double floor = 1e-18;
    if (*std::max_element(D.begin(), D.end()) <= floor) {
        report.add_check("coupled_identical", *std::max_element(D.begin(), D.end()), floor, true,
                         "Y and Z coincide under the coupled scheme");
        return report;
    }

    bool decreasing = true;
    for (std::size_t i = 1; i < D.size(); ++i)
        if (!(D[i] <= D[i - 1] + 3.0 * (D_se[i] + D_se[i - 1]))) decreasing = false;
    report.add_check("monotone_decrease", decreasing ? 1.0 : 0.0, 1.0, decreasing,
                     "eps^{-1} E sup|Y-Z|^2 decreasing along the schedule (3 SE slack)");
    report.add_check("reduction_smaller_than_deviation", D.back(), R.back(), D.back() < R.back(),
                     "at smallest eps, coupling error below deviation scale");
    return report;
}

VerificationReport check_char_function(const CoefficientSet& cs, const OdeSolution& ode,
                                       double eps, double t,
                                       const std::vector<Eigen::VectorXd>& lambdas,
                                       std::size_t n_resamples, const VerifyOptions& opts) {
    if (!(eps > 0.0)) throw std::invalid_argument("check_char_function: eps must be positive");
    const TimeGrid& grid = ode.grid;
    const std::size_t kt = grid.nearest_node(t);
    const double h = grid.step();
    const double sqh = std::sqrt(h);
    const int d = cs.dim;
    const int r = cs.noise_dim;

    // One fixed W1 path; sigma matrices along it are frozen for all resamples.
    std::vector<Eigen::MatrixXd> sig(kt);
    Eigen::MatrixXd cond_cov = Eigen::MatrixXd::Zero(d, d);
    {
        GaussianStream g1(SeedSpec{opts.master_seed, 0}, kChannelW1);
        double xf = 0.0;
        for (std::size_t j = 0; j < kt; ++j) {
            sig[j] = cs.sigma(xf, ode.y[j]);
            cond_cov += sig[j] * sig[j].transpose() * (h / eps);
            xf += (sqh * g1.next()) / eps;
        }
    }

    // Conditionally on W1 the discrete J(t) is exactly Gaussian with the
    // covariance above, so the comparison carries no discretization bias.
    const double inv_sqrt_eps = 1.0 / std::sqrt(eps);
    std::vector<std::vector<double>> proj(lambdas.size(), std::vector<double>(n_resamples));
    parallel_chunks(
        n_resamples, kEnsembleChunk,
        [&](std::size_t, std::size_t begin, std::size_t end) {
            Eigen::VectorXd dW2(r);
            for (std::size_t k = begin; k < end; ++k) {
                GaussianStream g2(SeedSpec{opts.master_seed, k}, kChannelW2);
                Eigen::VectorXd J = Eigen::VectorXd::Zero(d);
                for (std::size_t j = 0; j < kt; ++j) {
                    for (int jj = 0; jj < r; ++jj) dW2[jj] = sqh * g2.next();
                    J += sig[j] * dW2;
                }
                for (std::size_t il = 0; il < lambdas.size(); ++il)
                    proj[il][k] = inv_sqrt_eps * lambdas[il].dot(J);
            }
        },
        opts.threads);

    VerificationReport report;
    report.test_name = "check_char_function";
    report.params["entry"] = cs.name;
    report.params["eps"] = eps;
    report.params["t"] = t;
    report.params["n_resamples"] = n_resamples;
    report.params["master_seed"] = opts.master_seed;

    for (std::size_t il = 0; il < lambdas.size(); ++il) {
        const Eigen::VectorXd& lam = lambdas[il];
        std::vector<double> cosv(n_resamples), sinv(n_resamples);
        for (std::size_t k = 0; k < n_resamples; ++k) {
            cosv[k] = std::cos(proj[il][k]);
            sinv[k] = std::sin(proj[il][k]);
        }
        const MeanSE mc = mean_se(cosv);
        const MeanSE ms = mean_se(sinv);
        const double exact = std::exp(-0.5 * lam.dot(cond_cov * lam));
        const double dist = std::hypot(mc.mean - exact, ms.mean);
        const double se = std::hypot(mc.se, ms.se);
        report.points.push_back(
            {"lambda" + std::to_string(il), static_cast<double>(il), mc.mean, mc.se});
        const bool pass = dist <= 3.0 * se + 1e-15;
        report.add_check("charfn_lambda" + std::to_string(il), dist, 3.0 * se, pass,
                         "|empirical - exact| vs 3 SE");
    }
    return report;
}

VerificationReport check_weak_convergence(const CoefficientSet& cs, const Eigen::VectorXd& y0,
                                          double T, const std::vector<double>& probe_times,
                                          const EpsilonSchedule& schedule, std::size_t n_paths,
                                          const VerifyOptions& opts,
                                          WeakConvergenceSamples* samples) {
    if (probe_times.empty())
        throw std::invalid_argument("check_weak_convergence: need at least one probe time");
    const int d = cs.dim;
    const std::size_t n_probes = probe_times.size();

    VerificationReport report;
    report.test_name = "check_weak_convergence";
    report.params["entry"] = cs.name;
    report.params["T"] = T;
    report.params["n_paths"] = n_paths;
    report.params["h_ref"] = schedule.h_ref;
    report.params["master_seed"] = opts.master_seed;
    report.params["limit_grid_steps"] = opts.limit_grid_steps;
    report.params["limit_h_inner"] = opts.limit_h_inner;

    if (cs.b2_is_zero && cs.sigma_is_zero) {
        // Both laws are point masses at the discretization floor.
        const double eps_min = schedule.values.back();
        const TimeGrid grid = schedule.grid_for(eps_min, T);
        const OdeSolution flow = solve_ode(cs, y0, grid);
        const SamplePath Y = simulate_Y_unit_phi(cs, eps_min, y0, grid,
                                                 SeedSpec{opts.master_seed, 0});
        const SamplePath dev = deviation(Y, flow, eps_min, DeviationOrder::half);
        double worst = 0.0;
        for (std::size_t k = 0; k < dev.n_nodes(); ++k)
            worst = std::max(worst, dev.state(k).norm());
        const double floor = 10.0 * grid.step() * T / std::sqrt(eps_min);
        report.add_check("degenerate_floor", worst, floor, worst <= floor,
                         "no perturbation: deviations at the scheme floor, KS skipped");
        return report;
    }

    // Limit-process sample, shared across the schedule.
    const TimeGrid lgrid(0.0, T, opts.limit_grid_steps);
    const OdeSolution lflow = solve_ode(cs, y0, lgrid);
    const DiffusionKernel kernel = diffusion_kernel(cs, lflow);
    const FundamentalMatrix Phi = fundamental_matrix(cs, lflow);
    std::vector<std::size_t> lprobe(n_probes);
    for (std::size_t ip = 0; ip < n_probes; ++ip) lprobe[ip] = lgrid.nearest_node(probe_times[ip]);

    std::vector<std::vector<std::vector<double>>> limit_samples(
        n_probes, std::vector<std::vector<double>>(d, std::vector<double>(n_paths)));
    parallel_chunks(
        n_paths, kEnsembleChunk,
        [&](std::size_t, std::size_t begin, std::size_t end) {
            for (std::size_t k = begin; k < end; ++k) {
                const FractionalKineticPath V =
                    sample_V(lgrid, d, SeedSpec{opts.master_seed, k}, opts.limit_h_inner);
                const LimitDeviationPath zeta = sample_zeta0(kernel, Phi, V);
                for (std::size_t ip = 0; ip < n_probes; ++ip)
                    for (int j = 0; j < d; ++j)
                        limit_samples[ip][j][k] = zeta.zeta.value(lprobe[ip], j);
            }
        },
        opts.threads);

    // Prelimit sweeps.
    std::vector<std::vector<std::vector<double>>> ks(schedule.values.size());
    double second_moment = std::numeric_limits<double>::quiet_NaN();
    double second_moment_se = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t ie = 0; ie < schedule.values.size(); ++ie) {
        const double eps = schedule.values[ie];
        const TimeGrid grid = schedule.grid_for(eps, T);
        const OdeSolution flow = solve_ode(cs, y0, grid);
        std::vector<std::size_t> probe(n_probes);
        for (std::size_t ip = 0; ip < n_probes; ++ip)
            probe[ip] = grid.nearest_node(probe_times[ip]);

        std::vector<std::vector<std::vector<double>>> pre(
            n_probes, std::vector<std::vector<double>>(d, std::vector<double>(n_paths)));
        parallel_chunks(
            n_paths, kEnsembleChunk,
            [&](std::size_t, std::size_t begin, std::size_t end) {
                for (std::size_t k = begin; k < end; ++k) {
                    const SamplePath Y = simulate_Y_unit_phi(
                        cs, eps, y0, grid,
                        SeedSpec{opts.master_seed + 1000003 * (ie + 1), k});
                    for (std::size_t ip = 0; ip < n_probes; ++ip) {
                        const Eigen::VectorXd dev =
                            (Y.state(probe[ip]) - flow.y[probe[ip]]) / std::sqrt(eps);
                        for (int j = 0; j < d; ++j) pre[ip][j][k] = dev[j];
                    }
                }
            },
            opts.threads);

        ks[ie].assign(n_probes, std::vector<double>(d, 0.0));
        for (std::size_t ip = 0; ip < n_probes; ++ip)
            for (int j = 0; j < d; ++j)
                ks[ie][ip][j] = ks_two_sample(pre[ip][j], limit_samples[ip][j]);

        double worst = 0.0;
        for (std::size_t ip = 0; ip < n_probes; ++ip)
            for (int j = 0; j < d; ++j) worst = std::max(worst, ks[ie][ip][j]);
        report.points.push_back({eps_label(eps) + " maxKS", eps, worst, 0.0});

        if (ie + 1 == schedule.values.size()) {
            // Joint second moment at the last probe time.
            std::vector<double> sq(n_paths, 0.0);
            for (std::size_t k = 0; k < n_paths; ++k) {
                double s = 0.0;
                for (int j = 0; j < d; ++j) s += pre[n_probes - 1][j][k] * pre[n_probes - 1][j][k];
                sq[k] = s;
            }
            const MeanSE m = mean_se(sq);
            second_moment = m.mean;
            second_moment_se = m.se;
            report.points.push_back({eps_label(eps) + " E|zeta|^2", eps, m.mean, m.se});
            if (samples != nullptr) {
                samples->probe_times = probe_times;
                samples->prelimit = pre;
                samples->limit = limit_samples;
            }
        }
    }

    // Checks: threshold at the smallest eps, monotone trend, second moment.
    const std::size_t last = schedule.values.size() - 1;
    double worst_final = 0.0;
    for (std::size_t ip = 0; ip < n_probes; ++ip)
        for (int j = 0; j < d; ++j) worst_final = std::max(worst_final, ks[last][ip][j]);
    report.tolerance = opts.ks_threshold;
    report.add_upper_bound_check("ks_final", worst_final, opts.ks_threshold,
                                 "max coordinatewise KS at the smallest eps");

    if (schedule.values.size() > 1) {
        const double slack =
            2.0 * std::sqrt(2.0 / static_cast<double>(n_paths));  // two-sample KS noise scale
        std::size_t violations = 0;
        for (std::size_t ip = 0; ip < n_probes; ++ip) {
            for (int j = 0; j < d; ++j) {
                for (std::size_t ie = 1; ie < schedule.values.size(); ++ie)
                    if (ks[ie][ip][j] > ks[ie - 1][ip][j] + slack) ++violations;
            }
        }
        report.add_check("ks_trend", static_cast<double>(violations), 0.0, violations == 0,
                         "KS non-increasing along the schedule (noise slack)");
    }

    if (std::isfinite(opts.second_moment_ref)) {
        const double rel = std::abs(second_moment - opts.second_moment_ref) /
                           opts.second_moment_ref;
        report.add_check("second_moment", second_moment, opts.second_moment_ref,
                         rel <= opts.second_moment_rtol,
                         "E|zeta_eps|^2 at final probe vs closed form, rtol " +
                             std::to_string(opts.second_moment_rtol));
        report.points.push_back({"second_moment_se", 0.0, second_moment_se, 0.0});
    }
    return report;
}

OscillatorDemoResult oscillator_demo(double sqrt_eps, double sigma_l2, double T, SeedSpec seed,
                                     std::size_t n_steps, double h_inner_factor) {
    if (!(T > 0.0)) throw std::invalid_argument("oscillator_demo: T must be positive");
    const TimeGrid grid(0.0, T, n_steps);
    const double h_inner = grid.step() / std::max(1.0, h_inner_factor);
    const FractionalKineticPath V = sample_V(grid, 1, seed, h_inner);

    OscillatorDemoResult out;
    out.grid = grid;
    out.cosine.resize(grid.n_nodes());
    out.approx.resize(grid.n_nodes());
    out.V.resize(grid.n_nodes());

    // int_0^t cos(t-s) dV = cos(t) * int cos(s) dV + sin(t) * int sin(s) dV.
    double C = 0.0, S = 0.0;
    out.cosine[0] = 1.0;
    out.approx[0] = 1.0;
    out.V[0] = 0.0;
    for (std::size_t k = 0; k + 1 < grid.n_nodes(); ++k) {
        const double tk = grid.node(k);
        const double dV = V.V.value(k + 1) - V.V.value(k);
        C += std::cos(tk) * dV;
        S += std::sin(tk) * dV;
        const double tn = grid.node(k + 1);
        out.cosine[k + 1] = std::cos(tn);
        out.approx[k + 1] =
            std::cos(tn) + sqrt_eps * sigma_l2 * (std::cos(tn) * C + std::sin(tn) * S);
        out.V[k + 1] = V.V.value(k + 1);
    }
    return out;
}

void write_csv(const OscillatorDemoResult& demo, std::ostream& os,
               const std::map<std::string, std::string>& meta) {
    for (const auto& [key, val] : meta) os << "# " << key << "=" << val << "\n";
    os << "t,cos,approx,V\n";
    for (std::size_t k = 0; k < demo.grid.n_nodes(); ++k) {
        os << format_g17(demo.grid.node(k)) << "," << format_g17(demo.cosine[k]) << ","
           << format_g17(demo.approx[k]) << "," << format_g17(demo.V[k]) << "\n";
    }
}

}  // namespace nullrec
