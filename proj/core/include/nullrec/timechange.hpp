#pragma once

#include <string>
#include <vector>

#include "nullrec/coefficients.hpp"
#include "nullrec/deterministic.hpp"
#include "nullrec/report.hpp"
#include "nullrec/sde.hpp"

namespace nullrec {

/// The time change s(t) = int_0^t (psi1(Y) + psi2(X, Y))^2 du and its
/// piecewise-linear monotone inverse. Per-step slopes lie in [c1^2, c2^2].
struct TimeChange {
    TimeGrid grid;
    std::vector<double> s_of_t;  // one value per node, s_of_t[0] = 0
    double c1_sq = 1.0, c2_sq = 1.0;
    bool slope_ok = true;
    std::vector<std::string> violations;

    double s_at(std::size_t k) const { return s_of_t[k]; }

    /// Inverse by monotone piecewise-linear interpolation; exact at breakpoints.
    double t_of_s(double s) const;
};

TimeChange compute_time_change(const CoupledTrajectory& traj, const CoefficientSet& cs);

/// The reduction to the unit-psi system:
///   b2~ = b2 / (psi1+psi2)^2,  sigma~ = sigma / (psi1+psi2),  psi1~ == 1.
/// Envelopes are divided by c1^2 (conservative domination). Identity on
/// entries that already have psi1 == 1, psi2 == 0.
CoefficientSet transformed_coefficients(const CoefficientSet& cs);

struct TimechangeVerifyOptions {
    std::uint64_t master_seed = 2026;
    double x0 = 0.0;
    int threads = 0;
};

/// Monte Carlo check that s_eps -> s0(t) = int_0^t psi1^2(y(u)) du:
/// E sup_t |s_eps(t) - s0(t)|^2 per epsilon, with a monotone-decrease check.
VerificationReport verify_timechange_limit(const CoefficientSet& cs, const OdeSolution& ode,
                                           const EpsilonSchedule& schedule, std::size_t n_paths,
                                           const TimechangeVerifyOptions& opts = {});

/// CSV: `t,s` columns.
void write_csv(const TimeChange& tc, std::ostream& os,
               const std::map<std::string, std::string>& meta = {});

}  // namespace nullrec
