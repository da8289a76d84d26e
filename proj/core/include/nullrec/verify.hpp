#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "nullrec/coefficients.hpp"
#include "nullrec/deterministic.hpp"
#include "nullrec/report.hpp"
#include "nullrec/rng.hpp"
#include "nullrec/sde.hpp"

namespace nullrec {

/// Shared knobs of the statistical checks; fields irrelevant to a given check
/// are ignored. Defaults are the calibrated desk-scale values.
struct VerifyOptions {
    std::uint64_t master_seed = 20260810;
    int threads = 0;

    // check_lemma_L1_bound
    double bound_factor = 3.0;   // uniform bound = factor * closed-form limit
    double limit_rtol = 0.05;    // small-eps closed-form tolerance
    double t_slope_tol = 0.1;    // per unit of expected slope p/2

    // check_lemma_rate
    double rate_slope_rtol = 0.15;

    // check_weak_convergence
    std::size_t limit_grid_steps = 512;
    double limit_h_inner = 1e-4;
    double ks_threshold = 0.05;
    double second_moment_ref = std::numeric_limits<double>::quiet_NaN();
    double second_moment_rtol = 0.10;
};

/// Scalar psi >= 0 with its known L1 norm, the input of the L1-bound check.
struct PsiFunction {
    std::string name;
    std::function<double(double)> f;
    double l1_norm = 0.0;
};

/// E|Z|^p for Z standard normal.
double abs_moment_normal(int p);

/// Moment bound of the fast-occupation functional: Monte Carlo estimates of
/// E|eps^{-1} int_0^t psi(eps^{-1} W(r)) dr|^p per epsilon; asserts uniform
/// boundedness, the sqrt(t) scaling in t, and the small-eps closed-form limit
/// |psi|_1^p t^{p/2} E|Z|^p.
VerificationReport check_lemma_L1_bound(const PsiFunction& psi, double t, int p,
                                        const EpsilonSchedule& schedule, std::size_t n_paths,
                                        const VerifyOptions& opts = {});

/// Strong rate of Y_eps -> y: log-log regression of sup_t E|Y-y|^p against
/// eps; asserts slope p/2 within rate_slope_rtol * p/2.
VerificationReport check_lemma_rate(const CoefficientSet& cs, const Eigen::VectorXd& y0, double T,
                                    int p, const EpsilonSchedule& schedule, std::size_t n_paths,
                                    const VerifyOptions& opts = {});

/// Reduction to the frozen-argument system: couples Y and Z on identical
/// noise streams and asserts eps^{-1} E sup|Y - Z|^2 decreasing along the
/// schedule and below eps^{-1} E sup|Y - y|^2 at the smallest eps.
VerificationReport check_reduction(const CoefficientSet& cs, const Eigen::VectorXd& y0, double T,
                                   const EpsilonSchedule& schedule, std::size_t n_paths,
                                   const VerifyOptions& opts = {});

/// Conditional characteristic function of eps^{-1/2} J(t) given one fixed W1
/// path: empirical over W2 resamples against the exact conditional Gaussian,
/// within 3 Monte Carlo standard errors per lambda.
VerificationReport check_char_function(const CoefficientSet& cs, const OdeSolution& ode,
                                       double eps, double t,
                                       const std::vector<Eigen::VectorXd>& lambdas,
                                       std::size_t n_resamples, const VerifyOptions& opts = {});

/// Raw marginal samples of the two-sample comparison at the smallest epsilon,
/// indexed [probe][coordinate][path]; filled on request for CSV export.
struct WeakConvergenceSamples {
    std::vector<double> probe_times;
    std::vector<std::vector<std::vector<double>>> prelimit;
    std::vector<std::vector<std::vector<double>>> limit;
};

/// Weak convergence of zeta_eps to zeta0: coordinatewise two-sample KS at the
/// probe times against equal-size limit-process samples, plus the optional
/// closed-form second-moment cross-check at the last probe time.
VerificationReport check_weak_convergence(const CoefficientSet& cs, const Eigen::VectorXd& y0,
                                          double T, const std::vector<double>& probe_times,
                                          const EpsilonSchedule& schedule, std::size_t n_paths,
                                          const VerifyOptions& opts = {},
                                          WeakConvergenceSamples* samples = nullptr);

/// The oscillator approximation q(t) = cos t + sqrt_eps * sigma_l2 *
/// int_0^t cos(t-s) dV(s), deterministic given the seed.
struct OscillatorDemoResult {
    TimeGrid grid;
    std::vector<double> cosine;
    std::vector<double> approx;
    std::vector<double> V;
};

OscillatorDemoResult oscillator_demo(double sqrt_eps, double sigma_l2, double T, SeedSpec seed,
                                     std::size_t n_steps = 4096, double h_inner_factor = 32);

/// CSV: t, cos(t), approximation, V.
void write_csv(const OscillatorDemoResult& demo, std::ostream& os,
               const std::map<std::string, std::string>& meta = {});

}  // namespace nullrec
