#include "nullrec/localtime.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace nullrec {

double default_bandwidth(const TimeGrid& grid) { return std::sqrt(grid.step()); }

LocalTimeCurve local_time_occupation(const SamplePath& path, double x, double delta) {
    if (path.dim() != 1)
        throw std::invalid_argument("local_time_occupation: path must be 1-dimensional");
    if (!(delta > 0.0))
        throw std::invalid_argument("local_time_occupation: delta must be positive");

    LocalTimeCurve curve;
    curve.grid = path.grid();
    curve.level = x;
    curve.method = LocalTimeMethod::occupation;
    curve.bandwidth = delta;
    curve.L.resize(path.n_nodes());

    const double h = path.grid().step();
    const double w = h / (2.0 * delta);
    double acc = 0.0;
    curve.L[0] = 0.0;
    for (std::size_t k = 0; k + 1 < path.n_nodes(); ++k) {
        if (std::abs(path.value(k) - x) <= delta) acc += w;
        curve.L[k + 1] = acc;
    }
    return curve;
}

LocalTimeCurve local_time_tanaka(const SamplePath& path, double x) {
    if (path.dim() != 1)
        throw std::invalid_argument("local_time_tanaka: path must be 1-dimensional");

    LocalTimeCurve curve;
    curve.grid = path.grid();
    curve.level = x;
    curve.method = LocalTimeMethod::tanaka;
    curve.L.resize(path.n_nodes());

    const double w0 = std::abs(path.value(0) - x);
    double stoch = 0.0;  // running sum of sgn(W - x) dW
    double raw = 0.0;
    double envelope = 0.0;
    curve.L[0] = 0.0;
    for (std::size_t k = 0; k + 1 < path.n_nodes(); ++k) {
        const double wk = path.value(k) - x;
        const double sgn = wk > 0.0 ? 1.0 : (wk < 0.0 ? -1.0 : 0.0);
        stoch += sgn * (path.value(k + 1) - path.value(k));
        raw = std::abs(path.value(k + 1) - x) - w0 - stoch;
        envelope = std::max(envelope, raw);
        curve.L[k + 1] = envelope;
    }
    curve.raw_terminal = raw;
    return curve;
}

VerificationReport occupation_identity_check(const SamplePath& path, const CoefficientSet& cs,
                                             const OdeSolution& ode, double eps,
                                             const IdentityCheckOptions& opts) {
    if (path.dim() != 1)
        throw std::invalid_argument("occupation_identity_check: path must be 1-dimensional");
    if (!(eps > 0.0))
        throw std::invalid_argument("occupation_identity_check: eps must be positive");
    if (path.grid() != ode.grid)
        throw std::invalid_argument("occupation_identity_check: path and ode must share a grid");

    const TimeGrid& grid = path.grid();
    const double h = grid.step();
    const int d = cs.dim;
    const std::size_t n = grid.n_nodes();
    const double delta = std::isfinite(opts.delta) ? opts.delta : default_bandwidth(grid);

    // Left side: time Riemann sum of the matrix integrand.
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const Eigen::MatrixXd s = cs.sigma(path.value(k) / eps, ode.y[k]);
        lhs += (s * s.transpose()) * (h / eps);
    }

    // Right side: Simpson quadrature in x of Stieltjes sums against the
    // occupation local time at levels eps*x, all levels in one path sweep.
    std::size_t n_quad = opts.n_quad | 1;  // force odd
    if (n_quad < 3) n_quad = 3;
    const double a = -opts.x_half_width;
    const double dx = 2.0 * opts.x_half_width / static_cast<double>(n_quad - 1);

    std::vector<double> weights(n_quad);
    for (std::size_t i = 0; i < n_quad; ++i) {
        double w = (i == 0 || i + 1 == n_quad) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        weights[i] = w * dx / 3.0;
    }

    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(d, d);
    const double occ_w = h / (2.0 * delta);
    for (std::size_t i = 0; i < n_quad; ++i) {
        const double x = a + static_cast<double>(i) * dx;
        const double level = eps * x;
        // Stieltjes sum: sigma sigma^T(x, y(t_k)) dL_k, dL_k = occ increment at t_k.
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (std::abs(path.value(k) - level) <= delta) {
                const Eigen::MatrixXd s = cs.sigma(x, ode.y[k]);
                acc += (s * s.transpose()) * occ_w;
            }
        }
        rhs += weights[i] * acc;
    }

    const double scale = std::max({lhs.norm(), rhs.norm(), 1e-300});
    const double rel = (lhs - rhs).norm() / scale;
    const bool both_zero = lhs.norm() == 0.0 && rhs.norm() == 0.0;

    VerificationReport report;
    report.test_name = "occupation_identity_check";
    report.params["entry"] = cs.name;
    report.params["eps"] = eps;
    report.params["h"] = h;
    report.params["delta"] = delta;
    report.params["n_quad"] = n_quad;
    report.points.push_back({"lhs_norm", 0.0, lhs.norm(), 0.0});
    report.points.push_back({"rhs_norm", 0.0, rhs.norm(), 0.0});
    report.tolerance = opts.rel_tolerance;
    report.add_check("relative_discrepancy", both_zero ? 0.0 : rel, opts.rel_tolerance,
                     both_zero || rel <= opts.rel_tolerance);
    return report;
}

void write_csv(const LocalTimeCurve& curve, std::ostream& os,
               const std::map<std::string, std::string>& meta) {
    os << "# method=" << (curve.method == LocalTimeMethod::occupation ? "occupation" : "tanaka")
       << "\n";
    os << "# level=" << format_g17(curve.level) << "\n";
    if (std::isfinite(curve.bandwidth)) os << "# delta=" << format_g17(curve.bandwidth) << "\n";
    if (std::isfinite(curve.raw_terminal))
        os << "# raw_terminal=" << format_g17(curve.raw_terminal) << "\n";
    for (const auto& [key, val] : meta) os << "# " << key << "=" << val << "\n";
    os << "t,L\n";
    for (std::size_t k = 0; k < curve.L.size(); ++k)
        os << format_g17(curve.grid.node(k)) << "," << format_g17(curve.L[k]) << "\n";
}

}  // namespace nullrec
