#include "nullrec/deterministic.hpp"

#include <cmath>
#include <ostream>

#include "nullrec/errors.hpp"
#include "nullrec/paths.hpp"

namespace nullrec {

OdeSolution solve_ode(const CoefficientSet& cs, const Eigen::VectorXd& y0, const TimeGrid& grid) {
    if (y0.size() != cs.dim) throw std::invalid_argument("solve_ode: y0 dimension mismatch");
    OdeSolution sol;
    sol.grid = grid;
    sol.y0 = y0;
    sol.y.reserve(grid.n_nodes());
    sol.y.push_back(y0);
    const double h = grid.step();
    Eigen::VectorXd y = y0;
    for (std::size_t k = 0; k + 1 < grid.n_nodes(); ++k) {
        const Eigen::VectorXd k1 = cs.b1(y);
        const Eigen::VectorXd k2 = cs.b1(y + 0.5 * h * k1);
        const Eigen::VectorXd k3 = cs.b1(y + 0.5 * h * k2);
        const Eigen::VectorXd k4 = cs.b1(y + h * k3);
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!y.allFinite())
            throw BlowUpError("solve_ode: non-finite state at node " + std::to_string(k + 1),
                              k + 1);
        sol.y.push_back(y);
    }
    return sol;
}

double integral_equation_residual(const CoefficientSet& cs, const OdeSolution& ode) {
    const double h = ode.grid.step();
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(cs.dim);
    double worst = 0.0;
    Eigen::VectorXd f_prev = cs.b1(ode.y[0]);
    for (std::size_t k = 1; k < ode.y.size(); ++k) {
        const Eigen::VectorXd f_k = cs.b1(ode.y[k]);
        acc += 0.5 * h * (f_prev + f_k);
        f_prev = f_k;
        worst = std::max(worst, (ode.y[k] - ode.y0 - acc).norm());
    }
    return worst;
}

FundamentalMatrix::FundamentalMatrix(TimeGrid grid, std::vector<Eigen::MatrixXd> phi_from_origin,
                                     std::vector<Eigen::MatrixXd> generators)
    : grid_(grid), phi_(std::move(phi_from_origin)), gen_(std::move(generators)) {
    inv_.reserve(phi_.size());
    for (std::size_t k = 0; k < phi_.size(); ++k) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(phi_[k]);
        if (!lu.isInvertible())
            throw DegeneracyError("FundamentalMatrix: Phi(t_" + std::to_string(k) +
                                  ", 0) is numerically singular");
        inv_.push_back(lu.inverse());
    }
}

Eigen::MatrixXd FundamentalMatrix::at(std::size_t kt, std::size_t ks) const {
    if (ks > kt) throw std::invalid_argument("FundamentalMatrix::at: requires s <= t");
    if (ks == 0) return phi_[kt];
    return phi_[kt] * inv_[ks];
}

FundamentalMatrix fundamental_matrix(const CoefficientSet& cs, const OdeSolution& ode) {
    const int d = cs.dim;
    const double h = ode.grid.step();
    std::vector<Eigen::MatrixXd> phi;
    std::vector<Eigen::MatrixXd> gens;
    phi.reserve(ode.grid.n_nodes());
    gens.reserve(ode.grid.n_nodes());
    phi.push_back(Eigen::MatrixXd::Identity(d, d));

    // Joint RK4 on (y, Phi); the y stages are self-contained so the flow
    // reproduces solve_ode node values exactly.
    Eigen::VectorXd y = ode.y0;
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d);
    for (std::size_t k = 0; k + 1 < ode.grid.n_nodes(); ++k) {
        gens.push_back(cs.Db1(y));
        const Eigen::VectorXd k1 = cs.b1(y);
        const Eigen::MatrixXd K1 = cs.Db1(y) * P;
        const Eigen::VectorXd y2 = y + 0.5 * h * k1;
        const Eigen::VectorXd k2 = cs.b1(y2);
        const Eigen::MatrixXd K2 = cs.Db1(y2) * (P + 0.5 * h * K1);
        const Eigen::VectorXd y3 = y + 0.5 * h * k2;
        const Eigen::VectorXd k3 = cs.b1(y3);
        const Eigen::MatrixXd K3 = cs.Db1(y3) * (P + 0.5 * h * K2);
        const Eigen::VectorXd y4 = y + h * k3;
        const Eigen::VectorXd k4 = cs.b1(y4);
        const Eigen::MatrixXd K4 = cs.Db1(y4) * (P + h * K3);
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        P = P + (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
        if (!P.allFinite())
            throw BlowUpError("fundamental_matrix: non-finite at node " + std::to_string(k + 1),
                              k + 1);
        phi.push_back(P);
    }
    gens.push_back(cs.Db1(y));
    return FundamentalMatrix(ode.grid, std::move(phi), std::move(gens));
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a, double clamp_tol) {
    if (a.rows() != a.cols()) throw std::invalid_argument("psd_sqrt: matrix must be square");
    const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success)
        throw DegeneracyError("psd_sqrt: eigendecomposition failed");
    Eigen::VectorXd lam = es.eigenvalues();
    const double scale = std::max(lam.cwiseAbs().maxCoeff(), 1.0);
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam[i] < -clamp_tol * scale)
            throw DegeneracyError("psd_sqrt: matrix has eigenvalue " + std::to_string(lam[i]) +
                                  " below -clamp_tol");
        lam[i] = lam[i] > 0.0 ? std::sqrt(lam[i]) : 0.0;
    }
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

DiffusionKernel diffusion_kernel(const CoefficientSet& cs, const OdeSolution& ode,
                                 const QuadratureSpec& spec) {
    const int d = cs.dim;
    DiffusionKernel kernel;
    kernel.grid = ode.grid;
    kernel.A.reserve(ode.y.size());
    kernel.sqrtA.reserve(ode.y.size());
    for (const Eigen::VectorXd& y : ode.y) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
        if (!cs.sigma_is_zero) {
            for (int i = 0; i < d; ++i) {
                for (int j = i; j < d; ++j) {
                    auto entry = [&](double x) {
                        const Eigen::MatrixXd s = cs.sigma(x, y);
                        return s.row(i).dot(s.row(j));
                    };
                    const double v = integrate_real_line(entry, spec);
                    A(i, j) = v;
                    A(j, i) = v;
                }
            }
        }
        kernel.A.push_back(A);
        kernel.sqrtA.push_back(psd_sqrt(A));
    }
    return kernel;
}

void write_csv(const DiffusionKernel& kernel, std::ostream& os,
               const std::map<std::string, std::string>& meta) {
    for (const auto& [key, val] : meta) os << "# " << key << "=" << val << "\n";
    const int d = kernel.A.empty() ? 0 : static_cast<int>(kernel.A[0].rows());
    os << "t";
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) os << ",A" << i << j;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) os << ",sqrtA" << i << j;
    os << "\n";
    for (std::size_t k = 0; k < kernel.A.size(); ++k) {
        os << format_g17(kernel.grid.node(k));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) os << "," << format_g17(kernel.A[k](i, j));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) os << "," << format_g17(kernel.sqrtA[k](i, j));
        os << "\n";
    }
}

}  // namespace nullrec
