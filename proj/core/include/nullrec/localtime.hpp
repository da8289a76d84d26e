#pragma once

#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "nullrec/coefficients.hpp"
#include "nullrec/deterministic.hpp"
#include "nullrec/paths.hpp"
#include "nullrec/report.hpp"

namespace nullrec {

enum class LocalTimeMethod { occupation, tanaka };

/// Nondecreasing estimate of t -> L(t, x) at a fixed level x, with L(0) = 0.
struct LocalTimeCurve {
    TimeGrid grid;
    double level = 0.0;
    std::vector<double> L;  // one value per node
    LocalTimeMethod method = LocalTimeMethod::occupation;
    double bandwidth = std::numeric_limits<double>::quiet_NaN();     // occupation only
    double raw_terminal = std::numeric_limits<double>::quiet_NaN();  // tanaka only

    double terminal() const { return L.back(); }
};

/// Occupation-density estimator: L(t,x) = (2 delta)^{-1} Leb{s <= t : |W - x| <= delta},
/// discretized as a left-endpoint Riemann sum. Nondecreasing by construction.
LocalTimeCurve local_time_occupation(const SamplePath& path, double x, double delta);

/// Default bandwidth sqrt(h), balancing the O(delta) density bias against the
/// O(h/delta) occupation-counting error.
double default_bandwidth(const TimeGrid& grid);

/// Tanaka-functional estimator
///   L(t,x) = |W(t)-x| - |W(0)-x| - sum sgn(W(t_k)-x)(W(t_{k+1})-W(t_k)),
/// sgn(0) = 0, followed by a monotone envelope (running max, floored at 0).
/// The raw terminal value is retained for unbiased moment checks.
LocalTimeCurve local_time_tanaka(const SamplePath& path, double x);

struct IdentityCheckOptions {
    double delta = std::numeric_limits<double>::quiet_NaN();  // NaN -> sqrt(h)
    std::size_t n_quad = 65;      // spatial quadrature nodes (Simpson; odd)
    double x_half_width = 6.0;    // quadrature truncation: sigma_hat_sq tails beyond
                                  // this are below 1e-10 for the Gaussian catalog
    double rel_tolerance = 0.05;  // reported pass threshold
};

/// Checks the occupation-density identity
///   eps^{-1} int_0^t (ss^T)(eps^{-1} W(s), y(s)) ds
///     = int_R int_0^t (ss^T)(x, y(s)) L^W(ds, eps x) dx
/// with the left side a time Riemann sum and the right side an x-quadrature of
/// Stieltjes sums against occupation local-time curves at levels eps*x.
VerificationReport occupation_identity_check(const SamplePath& path, const CoefficientSet& cs,
                                             const OdeSolution& ode, double eps,
                                             const IdentityCheckOptions& opts = {});

/// CSV: `t,L` after comment lines with method, level, bandwidth.
void write_csv(const LocalTimeCurve& curve, std::ostream& os,
               const std::map<std::string, std::string>& meta = {});

}  // namespace nullrec
