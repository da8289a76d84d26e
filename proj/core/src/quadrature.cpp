#include "nullrec/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "nullrec/errors.hpp"

namespace nullrec {

namespace {
using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
}

double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          double rel_tol) {
    double error = 0.0;
    const double v = GK::integrate(f, a, b, 12, rel_tol, &error);
    if (!std::isfinite(v))
        throw IntegrationError("integrate_interval: non-finite integral");
    return v;
}

double integrate_real_line(const std::function<double(double)>& f, const QuadratureSpec& spec) {
    double r = spec.r0;
    double total = integrate_interval(f, -r, r, spec.rel_tol);
    for (int i = 0; i < spec.max_doublings; ++i) {
        const double left = integrate_interval(f, -2.0 * r, -r, spec.rel_tol);
        const double right = integrate_interval(f, r, 2.0 * r, spec.rel_tol);
        const double tail = left + right;
        total += tail;
        r *= 2.0;
        const double scale = std::max(std::abs(total), 1e-300);
        if (std::abs(tail) <= spec.rel_tol * scale) return total;
    }
    throw IntegrationError("integrate_real_line: tail did not settle (integrand not integrable?)");
}

}  // namespace nullrec
