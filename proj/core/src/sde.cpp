#include "nullrec/sde.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "nullrec/errors.hpp"

namespace nullrec {

EpsilonSchedule::EpsilonSchedule(std::vector<double> vals, double h_ref_)
    : values(std::move(vals)), h_ref(h_ref_) {
    if (values.empty()) throw std::invalid_argument("EpsilonSchedule: empty");
    if (!(h_ref > 0.0)) throw std::invalid_argument("EpsilonSchedule: h_ref must be positive");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0))
            throw std::invalid_argument("EpsilonSchedule: all epsilon must be positive");
        if (i > 0 && !(values[i] < values[i - 1]))
            throw std::invalid_argument("EpsilonSchedule: must be strictly decreasing");
    }
}

TimeGrid EpsilonSchedule::grid_for(double eps, double T) const {
    const double h = step_for(eps);
    const auto n = static_cast<std::size_t>(std::ceil(T / h));
    return TimeGrid(0.0, T, n == 0 ? 1 : n);
}

namespace {

void check_finite(const Eigen::VectorXd& y, std::size_t node, const char* what) {
    if (!y.allFinite())
        throw BlowUpError(std::string(what) + ": non-finite state at node " + std::to_string(node),
                          node);
}

std::atomic<std::size_t> g_resolution_warnings{0};

// The coefficients vary on the O(eps) spatial scale of the fast motion, so
// grids coarser than h_ref * eps^2 under-resolve them. Warn, do not fail.
void warn_resolution(const char* what, double h, double eps) {
    if (h <= kDefaultHRef * eps * eps) return;
    if (g_resolution_warnings.fetch_add(1) == 0)
        std::fprintf(stderr,
                     "nullrec: %s: grid step %.3g exceeds h_ref*eps^2 = %.3g; "
                     "fast-scale coefficients may be under-resolved\n",
                     what, h, kDefaultHRef * eps * eps);
}

}  // namespace

std::size_t resolution_warning_count() { return g_resolution_warnings.load(); }

SamplePath simulate_Y_unit_phi(const CoefficientSet& cs, double eps, const Eigen::VectorXd& y0,
                               const TimeGrid& grid, SeedSpec seed) {
    if (y0.size() != cs.dim) throw std::invalid_argument("simulate_Y_unit_phi: y0 dim mismatch");
    if (!(eps > 0.0)) throw std::invalid_argument("simulate_Y_unit_phi: eps must be positive");
    warn_resolution("simulate_Y_unit_phi", grid.step(), eps);

    GaussianStream g1(seed, kChannelW1);
    GaussianStream g2(seed, kChannelW2);
    const double h = grid.step();
    const double sqh = std::sqrt(h);
    const int r = cs.noise_dim;

    SamplePath path(grid, cs.dim);
    path.set_state(0, y0);
    Eigen::VectorXd y = y0;
    // Fast argument eps^{-1} W1(t_k), accumulated as dW1/eps so that
    // simulate_pair_general with psi == 1 reproduces it bit-for-bit.
    double xf = 0.0;
    Eigen::VectorXd dW2(r);
    for (std::size_t k = 0; k + 1 < grid.n_nodes(); ++k) {
        Eigen::VectorXd drift = cs.b1(y);
        if (!cs.b2_is_zero) drift += cs.b2(xf, y);
        Eigen::VectorXd ynext = y + h * drift;
        const double dW1 = sqh * g1.next();
        for (int j = 0; j < r; ++j) dW2[j] = sqh * g2.next();
        if (!cs.sigma_is_zero) ynext += cs.sigma(xf, y) * dW2;
        xf += dW1 / eps;
        y = ynext;
        check_finite(y, k + 1, "simulate_Y_unit_phi");
        path.set_state(k + 1, y);
    }
    return path;
}

CoupledTrajectory simulate_pair_general(const CoefficientSet& cs, double eps, double x0,
                                        const Eigen::VectorXd& y0, const TimeGrid& grid,
                                        SeedSpec seed) {
    if (y0.size() != cs.dim)
        throw std::invalid_argument("simulate_pair_general: y0 dim mismatch");
    if (!(eps > 0.0)) throw std::invalid_argument("simulate_pair_general: eps must be positive");
    if (!(cs.c1 > 0.0))
        throw std::invalid_argument("simulate_pair_general: psi bound condition violated (c1 <= 0)");
    warn_resolution("simulate_pair_general", grid.step(), eps);

    GaussianStream g1(seed, kChannelW1);
    GaussianStream g2(seed, kChannelW2);
    const double h = grid.step();
    const double sqh = std::sqrt(h);
    const int r = cs.noise_dim;

    CoupledTrajectory traj{grid, SamplePath(grid, 1), SamplePath(grid, cs.dim), eps, seed};
    double x = x0;
    Eigen::VectorXd y = y0;
    traj.X.value(0) = x0;
    traj.Y.set_state(0, y0);
    Eigen::VectorXd dW2(r);
    for (std::size_t k = 0; k + 1 < grid.n_nodes(); ++k) {
        const double phi = cs.psi1(y) + cs.psi2(x, y);
        Eigen::VectorXd drift = cs.b1(y);
        if (!cs.b2_is_zero) drift += cs.b2(x, y);
        Eigen::VectorXd ynext = y + h * drift;
        const double dW1 = sqh * g1.next();
        for (int j = 0; j < r; ++j) dW2[j] = sqh * g2.next();
        if (!cs.sigma_is_zero) ynext += cs.sigma(x, y) * dW2;
        x += (phi * dW1) / eps;
        y = ynext;
        if (!std::isfinite(x))
            throw BlowUpError("simulate_pair_general: non-finite X at node " + std::to_string(k + 1),
                              k + 1);
        check_finite(y, k + 1, "simulate_pair_general");
        traj.X.value(k + 1) = x;
        traj.Y.set_state(k + 1, y);
    }
    return traj;
}

SamplePath simulate_J(const CoefficientSet& cs, double eps, const OdeSolution& ode,
                      const TimeGrid& grid, SeedSpec seed) {
    if (ode.grid != grid) throw std::invalid_argument("simulate_J: ode must be on the same grid");
    if (!(eps > 0.0)) throw std::invalid_argument("simulate_J: eps must be positive");

    GaussianStream g1(seed, kChannelW1);
    GaussianStream g2(seed, kChannelW2);
    const double h = grid.step();
    const double sqh = std::sqrt(h);
    const int r = cs.noise_dim;

    SamplePath path(grid, cs.dim);
    Eigen::VectorXd j = Eigen::VectorXd::Zero(cs.dim);
    double xf = 0.0;  // eps^{-1} W1(t_k), same accumulation as simulate_Y_unit_phi
    Eigen::VectorXd dW2(r);
    for (std::size_t k = 0; k + 1 < grid.n_nodes(); ++k) {
        const double dW1 = sqh * g1.next();
        for (int jj = 0; jj < r; ++jj) dW2[jj] = sqh * g2.next();
        if (!cs.sigma_is_zero) j += cs.sigma(xf, ode.y[k]) * dW2;
        xf += dW1 / eps;
        check_finite(j, k + 1, "simulate_J");
        path.set_state(k + 1, j);
    }
    return path;
}

SamplePath simulate_Z(const CoefficientSet& cs, const SamplePath& J, const Eigen::VectorXd& y0) {
    if (J.dim() != cs.dim) throw std::invalid_argument("simulate_Z: J dim mismatch");
    if (y0.size() != cs.dim) throw std::invalid_argument("simulate_Z: y0 dim mismatch");
    const TimeGrid& grid = J.grid();
    const double h = grid.step();

    SamplePath path(grid, cs.dim);
    Eigen::VectorXd z = y0;
    path.set_state(0, z);
    for (std::size_t k = 0; k + 1 < grid.n_nodes(); ++k) {
        z += h * cs.b1(z) + (J.state(k + 1) - J.state(k));
        check_finite(z, k + 1, "simulate_Z");
        path.set_state(k + 1, z);
    }
    return path;
}

SamplePath deviation(const SamplePath& Y, const OdeSolution& ode, double eps,
                     DeviationOrder order) {
    if (Y.grid() != ode.grid)
        throw std::invalid_argument("deviation: trajectory and flow must share a grid");
    if (Y.dim() != static_cast<int>(ode.y0.size()))
        throw std::invalid_argument("deviation: dimension mismatch");
    const double scale = order == DeviationOrder::half ? 1.0 / std::sqrt(eps) : 1.0 / eps;
    SamplePath out(Y.grid(), Y.dim());
    for (std::size_t k = 0; k < Y.n_nodes(); ++k)
        out.set_state(k, scale * (Y.state(k) - ode.y[k]));
    return out;
}

}  // namespace nullrec
