#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <vector>

#include "nullrec/coefficients.hpp"
#include "nullrec/deterministic.hpp"
#include "nullrec/localtime.hpp"
#include "nullrec/paths.hpp"
#include "nullrec/rng.hpp"

namespace nullrec {

/// V(t) = W2bar(L^{W1bar}(t, 0)): Brownian motion run at the clock of another
/// Brownian motion's local time at zero (1/2-fractional kinetic process).
/// W1bar is simulated on an inner refinement; V, the driver restriction and
/// the local-time curve are stored on the requested grid.
struct FractionalKineticPath {
    TimeGrid grid;
    SamplePath V;       // d-dim
    SamplePath W1;      // 1-dim driver restricted to the grid
    LocalTimeCurve L;   // level-0 local time restricted to the grid
};

/// Simulates V by composing fresh Gaussian increments of variance dL with the
/// simulated local time; the W2bar stream is independent of the W1bar stream.
/// h_inner requests the inner resolution (rounded to an integer refinement of
/// the grid step); the occupation bandwidth is sqrt of the inner step.
FractionalKineticPath sample_V(const TimeGrid& grid, int dim, SeedSpec seed, double h_inner);

/// Fresh W2bar draw against the same underlying local time (conditional
/// resampling used by the Gaussian-law checks).
FractionalKineticPath resample_W2(const FractionalKineticPath& base, SeedSpec w2_seed);

/// Forward Stieltjes sum  sum_k phi(t_k) (V(t_{k+1}) - V(t_k)).
Eigen::VectorXd integrate_against_V(std::span<const Eigen::MatrixXd> phi,
                                    const FractionalKineticPath& V);

/// Forward Stieltjes sum  sum_k g(t_k) (L(t_{k+1}) - L(t_k)).
Eigen::VectorXd integrate_against_dL(std::span<const Eigen::VectorXd> g,
                                     const LocalTimeCurve& L);

enum class ZetaConstruction { variation_of_parameters, integral_equation };

struct LimitDeviationPath {
    TimeGrid grid;
    SamplePath zeta;
    ZetaConstruction construction = ZetaConstruction::variation_of_parameters;
};

/// Limit deviation  zeta0(t) = int_0^t Phi(t,s) sqrtA(s) dV(s), equivalently
/// the stepped form  zeta_{k+1} = zeta_k + Db1(y_k) zeta_k h + sqrtA_k dV_k.
LimitDeviationPath sample_zeta0(const DiffusionKernel& kernel, const FundamentalMatrix& Phi,
                                const FractionalKineticPath& V,
                                ZetaConstruction construction =
                                    ZetaConstruction::variation_of_parameters);

/// Drift-only limit  zeta~0(t) = int_0^t Phi(t,s) B(s) dL(s) with
/// B(s) = int_R b2(x, y(s)) dx; requires sigma == 0.
LimitDeviationPath sample_zeta_tilde0(const CoefficientSet& cs, const FundamentalMatrix& Phi,
                                      const OdeSolution& ode, const LocalTimeCurve& L,
                                      const QuadratureSpec& spec = {});

/// Limit pair of the non-unit-psi system: X0(t) = W1tilde(s0(t)) with
/// s0(t) = int_0^t psi1^2(y(u)) du, its local time at zero, and zeta0 driven
/// by V^{X0} with the psi-normalized kernel and drift Db1(y(t)) zeta0(t) dt.
struct CorollaryPair {
    SamplePath X0;  // 1-dim
    LimitDeviationPath zeta0;
    LocalTimeCurve LX0;  // local time of X0 at zero, in t-time
};

CorollaryPair sample_corollary_pair(const CoefficientSet& cs, const OdeSolution& ode,
                                    const TimeGrid& grid, SeedSpec seed, double h_inner);

/// CSV with V coordinates, the driver and the underlying L column.
void write_csv(const FractionalKineticPath& path, std::ostream& os,
               const std::map<std::string, std::string>& meta = {});
void write_csv(const LimitDeviationPath& path, std::ostream& os,
               const std::map<std::string, std::string>& meta = {});

}  // namespace nullrec
