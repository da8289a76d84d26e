#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nullrec/coefficients.hpp"
#include "nullrec/deterministic.hpp"
#include "nullrec/grid.hpp"
#include "nullrec/paths.hpp"
#include "nullrec/rng.hpp"

namespace nullrec {

/// Decreasing sequence of epsilon values with the step rule h(eps) = h_ref*eps^2.
/// The quadratic rule resolves coefficient variation on the O(eps) spatial
/// scale of the fast motion.
struct EpsilonSchedule {
    std::vector<double> values;
    double h_ref = 1e-2;

    EpsilonSchedule() = default;
    EpsilonSchedule(std::vector<double> vals, double h_ref_ = 1e-2);

    double step_for(double eps) const { return h_ref * eps * eps; }

    /// Grid on [0, T] with step h_ref*eps^2 (node count rounded up).
    TimeGrid grid_for(double eps, double T) const;
};

/// Joint state of the general fast/slow system at one epsilon.
struct CoupledTrajectory {
    TimeGrid grid;
    SamplePath X;  // 1-dim fast state
    SamplePath Y;  // d-dim slow state
    double eps = 1.0;
    SeedSpec seed;
};

// Noise channels derived from one SeedSpec: W1 on channel 0, W2 on channel 1.
// Keeping the per-step draw order fixed makes trajectories from different
// simulators couplable on shared seeds.
inline constexpr std::uint64_t kChannelW1 = 0;
inline constexpr std::uint64_t kChannelW2 = 1;

/// Default reference step of the resolution rule h <= h_ref * eps^2.
inline constexpr double kDefaultHRef = 1e-2;

/// Count of simulations started with a grid coarser than the resolution rule
/// (they warn on stderr once per process rather than fail).
std::size_t resolution_warning_count();

/// Slow motion with unit fast diffusion:
///   dY = [b1(Y) + b2(eps^{-1} W1, Y)] dt + sigma(eps^{-1} W1, Y) dW2.
SamplePath simulate_Y_unit_phi(const CoefficientSet& cs, double eps, const Eigen::VectorXd& y0,
                               const TimeGrid& grid, SeedSpec seed);

/// General pair:
///   dX = eps^{-1} [psi1(Y) + psi2(X, Y)] dW1,
///   dY = [b1(Y) + b2(X, Y)] dt + sigma(X, Y) dW2.
CoupledTrajectory simulate_pair_general(const CoefficientSet& cs, double eps, double x0,
                                        const Eigen::VectorXd& y0, const TimeGrid& grid,
                                        SeedSpec seed);

/// Frozen-slow-argument martingale dJ = sigma(eps^{-1} W1, y(t)) dW2, J(0) = 0.
SamplePath simulate_J(const CoefficientSet& cs, double eps, const OdeSolution& ode,
                      const TimeGrid& grid, SeedSpec seed);

/// Z(t) = y0 + int_0^t b1(Z) ds + J(t) by explicit stepping.
SamplePath simulate_Z(const CoefficientSet& cs, const SamplePath& J, const Eigen::VectorXd& y0);

enum class DeviationOrder { half, one };

/// (Y(t) - y(t)) / eps^{1/2}  or  / eps.
SamplePath deviation(const SamplePath& Y, const OdeSolution& ode, double eps,
                     DeviationOrder order);

}  // namespace nullrec
