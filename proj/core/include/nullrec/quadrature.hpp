#pragma once

#include <functional>

namespace nullrec {

struct QuadratureSpec {
    double rel_tol = 1e-8;     // relative tolerance of the integral
    double r0 = 8.0;           // initial half-width of the truncated domain
    int max_doublings = 44;    // domain growth cap before declaring divergence
};

/// Adaptive Gauss-Kronrod integral of f over a finite interval.
double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-10);

/// Integral of f over the whole real line. The domain [-R, R] is grown until
/// the tail contribution of the integrand itself falls below tolerance, per
/// the L^1 envelope assumption; throws IntegrationError if it never settles.
double integrate_real_line(const std::function<double(double)>& f,
                           const QuadratureSpec& spec = {});

}  // namespace nullrec
