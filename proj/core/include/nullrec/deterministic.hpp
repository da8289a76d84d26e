#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "nullrec/coefficients.hpp"
#include "nullrec/grid.hpp"
#include "nullrec/quadrature.hpp"

namespace nullrec {

/// The unperturbed flow dy/dt = b1(y) integrated with classic RK4.
struct OdeSolution {
    TimeGrid grid;
    Eigen::VectorXd y0;
    std::vector<Eigen::VectorXd> y;  // one state per node

    const Eigen::VectorXd& at(std::size_t k) const { return y[k]; }
};

OdeSolution solve_ode(const CoefficientSet& cs, const Eigen::VectorXd& y0, const TimeGrid& grid);

/// Trapezoidal residual of y(t) = y0 + int_0^t b1(y(s)) ds, max over nodes.
double integral_equation_residual(const CoefficientSet& cs, const OdeSolution& ode);

/// Fundamental matrix Phi(t, s) of the linearization d/dt Phi = Db1(y(t)) Phi,
/// Phi(s, s) = I, stored as Phi(t_k, 0) with Phi(t, s) = Phi(t,0) Phi(s,0)^{-1}.
class FundamentalMatrix {
public:
    FundamentalMatrix() = default;
    FundamentalMatrix(TimeGrid grid, std::vector<Eigen::MatrixXd> phi_from_origin,
                      std::vector<Eigen::MatrixXd> generators);

    const TimeGrid& grid() const noexcept { return grid_; }
    int dim() const { return phi_.empty() ? 0 : static_cast<int>(phi_[0].rows()); }

    const Eigen::MatrixXd& from_origin(std::size_t k) const { return phi_[k]; }
    const Eigen::MatrixXd& origin_inverse(std::size_t k) const { return inv_[k]; }

    /// Db1(y(t_k)), the generator sampled along the flow.
    const Eigen::MatrixXd& generator(std::size_t k) const { return gen_[k]; }

    /// Phi(t_{kt}, t_{ks}); requires ks <= kt.
    Eigen::MatrixXd at(std::size_t kt, std::size_t ks) const;

private:
    TimeGrid grid_;
    std::vector<Eigen::MatrixXd> phi_;
    std::vector<Eigen::MatrixXd> inv_;
    std::vector<Eigen::MatrixXd> gen_;
};

FundamentalMatrix fundamental_matrix(const CoefficientSet& cs, const OdeSolution& ode);

/// Principal square root of a symmetric PSD matrix by spectral decomposition.
/// Eigenvalues in [-clamp_tol, 0) are clamped to 0; smaller ones throw.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a, double clamp_tol = 1e-10);

/// Per-node spatial integrals A(s) = int_R (sigma sigma^T)(x, y(s)) dx and
/// their principal square roots.
struct DiffusionKernel {
    TimeGrid grid;
    std::vector<Eigen::MatrixXd> A;
    std::vector<Eigen::MatrixXd> sqrtA;
};

DiffusionKernel diffusion_kernel(const CoefficientSet& cs, const OdeSolution& ode,
                                 const QuadratureSpec& spec = {});

/// CSV: node time, row-major A entries, row-major sqrtA entries.
void write_csv(const DiffusionKernel& kernel, std::ostream& os,
               const std::map<std::string, std::string>& meta = {});

}  // namespace nullrec
