#include "nullrec/limit.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "nullrec/errors.hpp"
#include "nullrec/quadrature.hpp"
#include "nullrec/sde.hpp"
#include "nullrec/timechange.hpp"

namespace nullrec {

namespace {

std::size_t refinement_factor(const TimeGrid& grid, double h_inner) {
    if (!(h_inner > 0.0)) throw std::invalid_argument("h_inner must be positive");
    if (h_inner > grid.step() * (1.0 + 1e-12))
        throw std::invalid_argument("h_inner must not exceed the grid step");
    return static_cast<std::size_t>(std::llround(grid.step() / h_inner));
}

/// Builds V on the coarse grid from coarse local-time increments; one d-dim
/// Gaussian block is drawn per step regardless of dL so the draw sequence does
/// not depend on the path.
SamplePath compose_V(const TimeGrid& grid, int dim, const std::vector<double>& L_coarse,
                     GaussianStream& g2) {
    SamplePath V(grid, dim);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    for (std::size_t k = 0; k + 1 < grid.n_nodes(); ++k) {
        const double dL = L_coarse[k + 1] - L_coarse[k];
        const double sq = std::sqrt(dL);
        for (int j = 0; j < dim; ++j) v[j] += sq * g2.next();
        V.set_state(k + 1, v);
    }
    return V;
}

}  // namespace

FractionalKineticPath sample_V(const TimeGrid& grid, int dim, SeedSpec seed, double h_inner) {
    if (dim < 1) throw std::invalid_argument("sample_V: dim must be >= 1");
    const std::size_t m = refinement_factor(grid, h_inner);
    const TimeGrid fine = grid.refined(m);
    const double hf = fine.step();
    const double sqhf = std::sqrt(hf);
    const double delta = std::sqrt(hf);
    // Same increment arithmetic as sample_corollary_pair so the psi == 1
    // reduction reproduces this pipeline bit-for-bit.
    const double occ_norm = 1.0 / (2.0 * delta);

    GaussianStream g1(seed, kChannelW1);
    std::vector<double> w1(fine.n_nodes());
    std::vector<double> lt(fine.n_nodes());
    w1[0] = 0.0;
    lt[0] = 0.0;
    for (std::size_t j = 0; j + 1 < fine.n_nodes(); ++j) {
        lt[j + 1] = lt[j] + (std::abs(w1[j]) <= delta ? hf * occ_norm : 0.0);
        w1[j + 1] = w1[j] + sqhf * g1.next();
    }

    FractionalKineticPath out;
    out.grid = grid;
    out.W1 = SamplePath(grid, 1);
    out.L.grid = grid;
    out.L.level = 0.0;
    out.L.method = LocalTimeMethod::occupation;
    out.L.bandwidth = delta;
    out.L.L.resize(grid.n_nodes());
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        out.W1.value(k) = w1[k * m];
        out.L.L[k] = lt[k * m];
    }

    GaussianStream g2(seed, kChannelW2);
    out.V = compose_V(grid, dim, out.L.L, g2);
    return out;
}

FractionalKineticPath resample_W2(const FractionalKineticPath& base, SeedSpec w2_seed) {
    FractionalKineticPath out = base;
    GaussianStream g2(w2_seed, kChannelW2);
    out.V = compose_V(base.grid, base.V.dim(), base.L.L, g2);
    return out;
}

Eigen::VectorXd integrate_against_V(std::span<const Eigen::MatrixXd> phi,
                                    const FractionalKineticPath& V) {
    const std::size_t n = V.grid.n_nodes();
    if (phi.size() != n)
        throw std::invalid_argument("integrate_against_V: integrand/grid size mismatch");
    const int d = V.V.dim();
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(phi.empty() ? d : phi[0].rows());
    for (std::size_t k = 0; k + 1 < n; ++k)
        acc += phi[k] * (V.V.state(k + 1) - V.V.state(k));
    return acc;
}

Eigen::VectorXd integrate_against_dL(std::span<const Eigen::VectorXd> g,
                                     const LocalTimeCurve& L) {
    const std::size_t n = L.L.size();
    if (g.size() != n)
        throw std::invalid_argument("integrate_against_dL: integrand/grid size mismatch");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(g.empty() ? 0 : g[0].size());
    for (std::size_t k = 0; k + 1 < n; ++k) acc += g[k] * (L.L[k + 1] - L.L[k]);
    return acc;
}

LimitDeviationPath sample_zeta0(const DiffusionKernel& kernel, const FundamentalMatrix& Phi,
                                const FractionalKineticPath& V, ZetaConstruction construction) {
    const TimeGrid& grid = V.grid;
    if (kernel.grid != grid || Phi.grid() != grid)
        throw std::invalid_argument("sample_zeta0: kernel, Phi and V must share a grid");
    const int d = V.V.dim();
    if (Phi.dim() != d)
        throw std::invalid_argument("sample_zeta0: dimension mismatch");

    LimitDeviationPath out;
    out.grid = grid;
    out.construction = construction;
    out.zeta = SamplePath(grid, d);

    if (construction == ZetaConstruction::variation_of_parameters) {
        // zeta_k = Phi(t_k,0) * sum_{j<k} Phi(t_j,0)^{-1} sqrtA_j dV_j
        Eigen::VectorXd S = Eigen::VectorXd::Zero(d);
        for (std::size_t k = 0; k + 1 < grid.n_nodes(); ++k) {
            S += Phi.origin_inverse(k) * (kernel.sqrtA[k] * (V.V.state(k + 1) - V.V.state(k)));
            out.zeta.set_state(k + 1, Phi.from_origin(k + 1) * S);
        }
    } else {
        const double h = grid.step();
        Eigen::VectorXd z = Eigen::VectorXd::Zero(d);
        for (std::size_t k = 0; k + 1 < grid.n_nodes(); ++k) {
            z += h * (Phi.generator(k) * z) + kernel.sqrtA[k] * (V.V.state(k + 1) - V.V.state(k));
            out.zeta.set_state(k + 1, z);
        }
    }
    return out;
}

LimitDeviationPath sample_zeta_tilde0(const CoefficientSet& cs, const FundamentalMatrix& Phi,
                                      const OdeSolution& ode, const LocalTimeCurve& L,
                                      const QuadratureSpec& spec) {
    if (!cs.sigma_is_zero)
        throw std::invalid_argument("sample_zeta_tilde0: requires sigma == 0 (drift-only remark)");
    const TimeGrid& grid = ode.grid;
    if (Phi.grid() != grid || L.grid != grid)
        throw std::invalid_argument("sample_zeta_tilde0: inputs must share a grid");
    const int d = cs.dim;

    // B(s) = int_R b2(x, y(s)) dx, entrywise quadrature.
    std::vector<Eigen::VectorXd> B(grid.n_nodes());
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
        if (!cs.b2_is_zero) {
            for (int i = 0; i < d; ++i) {
                auto entry = [&, i](double x) { return cs.b2(x, ode.y[k])[i]; };
                b[i] = integrate_real_line(entry, spec);
            }
        }
        B[k] = b;
    }

    LimitDeviationPath out;
    out.grid = grid;
    out.construction = ZetaConstruction::variation_of_parameters;
    out.zeta = SamplePath(grid, d);
    Eigen::VectorXd S = Eigen::VectorXd::Zero(d);
    for (std::size_t k = 0; k + 1 < grid.n_nodes(); ++k) {
        S += Phi.origin_inverse(k) * (B[k] * (L.L[k + 1] - L.L[k]));
        out.zeta.set_state(k + 1, Phi.from_origin(k + 1) * S);
    }
    return out;
}

CorollaryPair sample_corollary_pair(const CoefficientSet& cs, const OdeSolution& ode,
                                    const TimeGrid& grid, SeedSpec seed, double h_inner) {
    if (ode.grid != grid)
        throw std::invalid_argument("sample_corollary_pair: ode must be on the target grid");
    if (!(cs.c1 > 0.0))
        throw std::invalid_argument("sample_corollary_pair: psi bound condition violated");
    if (!cs.b1_is_bounded)
        throw std::invalid_argument("sample_corollary_pair: requires bounded b1");

    const std::size_t m = refinement_factor(grid, h_inner);
    const TimeGrid fine = grid.refined(m);
    const double hf = fine.step();
    const double delta = std::sqrt(hf);
    const int d = cs.dim;

    // psi1^2 along the flow, linearly interpolated to the fine grid.
    std::vector<double> psi_sq(fine.n_nodes());
    for (std::size_t j = 0; j < fine.n_nodes(); ++j) {
        const std::size_t k = j / m;
        const std::size_t r = j % m;
        Eigen::VectorXd y = ode.y[k];
        if (r != 0) {
            const double frac = static_cast<double>(r) / static_cast<double>(m);
            y += frac * (ode.y[k + 1] - ode.y[k]);
        }
        const double p = cs.psi1(y);
        psi_sq[j] = p * p;
    }

    // X0(t) = W1tilde(s0(t)) built step by step: ds_j = hf * trapezoid(psi1^2),
    // dX = sqrt(ds) g. The level-0 occupation local time accumulates ds mass.
    GaussianStream g1(seed, kChannelW1);
    std::vector<double> x0v(fine.n_nodes());
    std::vector<double> lt(fine.n_nodes());
    x0v[0] = 0.0;
    lt[0] = 0.0;
    const double occ_norm = 1.0 / (2.0 * delta);
    for (std::size_t j = 0; j + 1 < fine.n_nodes(); ++j) {
        const double ds = hf * (0.5 * (psi_sq[j] + psi_sq[j + 1]));
        lt[j + 1] = lt[j] + (std::abs(x0v[j]) <= delta ? ds * occ_norm : 0.0);
        x0v[j + 1] = x0v[j] + std::sqrt(ds) * g1.next();
    }

    CorollaryPair out;
    out.X0 = SamplePath(grid, 1);
    out.LX0.grid = grid;
    out.LX0.level = 0.0;
    out.LX0.method = LocalTimeMethod::occupation;
    out.LX0.bandwidth = delta;
    out.LX0.L.resize(grid.n_nodes());
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        out.X0.value(k) = x0v[k * m];
        out.LX0.L[k] = lt[k * m];
    }

    FractionalKineticPath driver;
    driver.grid = grid;
    driver.W1 = out.X0;
    driver.L = out.LX0;

    GaussianStream g2(seed, kChannelW2);
    driver.V = compose_V(grid, d, driver.L.L, g2);

    const DiffusionKernel kernel = diffusion_kernel(transformed_coefficients(cs), ode);
    const FundamentalMatrix Phi = fundamental_matrix(cs, ode);
    out.zeta0 = sample_zeta0(kernel, Phi, driver);
    return out;
}

void write_csv(const FractionalKineticPath& path, std::ostream& os,
               const std::map<std::string, std::string>& meta) {
    for (const auto& [key, val] : meta) os << "# " << key << "=" << val << "\n";
    os << "t";
    for (int j = 0; j < path.V.dim(); ++j) os << ",V" << (j + 1);
    os << ",W1,L\n";
    for (std::size_t k = 0; k < path.grid.n_nodes(); ++k) {
        os << format_g17(path.grid.node(k));
        for (int j = 0; j < path.V.dim(); ++j) os << "," << format_g17(path.V.value(k, j));
        os << "," << format_g17(path.W1.value(k)) << "," << format_g17(path.L.L[k]) << "\n";
    }
}

void write_csv(const LimitDeviationPath& path, std::ostream& os,
               const std::map<std::string, std::string>& meta) {
    auto m = meta;
    m["construction"] = path.construction == ZetaConstruction::variation_of_parameters
                            ? "variation_of_parameters"
                            : "integral_equation";
    write_csv(path.zeta, os, m);
}

}  // namespace nullrec
