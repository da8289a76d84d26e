#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "nullrec/report.hpp"

namespace nullrec {

/// Full coefficient description of the perturbed system
///     dY = [b1(Y) + b2(x, Y)] dt + sigma(x, Y) dW2,
/// with fast-motion diffusion parts psi1(y), psi2(x, y), plus the integrable
/// envelopes and Lipschitz metadata the assumptions require.
struct CoefficientSet {
    int dim = 1;        // d, slow-state dimension
    int noise_dim = 1;  // r, columns of sigma

    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> b1;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> Db1;  // (i,j) = d b1^i / d y^j
    std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> b2;
    std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)> sigma;  // d x r
    std::function<double(const Eigen::VectorXd&)> psi1;
    std::function<double(double, const Eigen::VectorXd&)> psi2;

    std::function<double(double)> b_hat;         // >= sup_y |b2(x,y)|
    std::function<double(double)> sigma_hat_sq;  // >= sup_y Tr(sigma sigma^T)(x,y)

    double lip_b1 = 0.0, lip_b2 = 0.0, lip_sigma = 0.0;
    double lip_psi1 = 0.0, lip_psi2 = 0.0;
    double c1 = 1.0, c2 = 1.0;  // 0 < c1 <= psi1 + psi2 <= c2

    // Analytic L1 norms of the envelopes when known (NaN => integrate numerically).
    double l1_b_hat = std::numeric_limits<double>::quiet_NaN();
    double l1_sigma_hat_sq = std::numeric_limits<double>::quiet_NaN();

    bool b2_is_zero = false;
    bool sigma_is_zero = false;
    bool b1_is_bounded = false;  // Corollary hypothesis

    std::string name;
    std::map<std::string, double> params;
};

/// Named builder registered in the catalog.
struct CatalogEntry {
    std::string name;
    std::map<std::string, double> defaults;
    std::string summary;
    std::function<CoefficientSet(const std::map<std::string, double>&)> build;
};

/// Process-wide coefficient catalog. Built-in entries:
///   oscillator    -- 2-d rotation drift, Gaussian 1-column diffusion
///   gaussian_bump -- 1-d contraction with Gaussian-localized b2 and sigma
///   drift_only    -- sigma == 0, Gaussian-localized constant-in-y b2
///   constant_psi  -- psi1 == c, Gaussian diffusion, zero drift
/// plus pre-registered extras (psi_bump, psi_y) and a hook for custom entries.
class Catalog {
public:
    static void register_entry(CatalogEntry entry);
    static CoefficientSet build(const std::string& name,
                                const std::map<std::string, double>& params = {});
    static std::vector<CatalogEntry> entries();
    static bool contains(const std::string& name);
};

/// Spec-level alias for Catalog::build.
CoefficientSet build_catalog_entry(const std::string& name,
                                   const std::map<std::string, double>& params = {});

struct ProbeBox {
    double x_lo = -4.0, x_hi = 4.0;
    Eigen::VectorXd y_lo, y_hi;
};

inline constexpr std::uint64_t kDefaultProbeSeed = 0x5eedfacecafe01ULL;

/// Probes the declared assumptions (Lipschitz ratios, envelope domination,
/// psi bounds, Db1 vs finite differences). Violations are report content.
VerificationReport check_assumptions(const CoefficientSet& cs, const ProbeBox& box,
                                     std::size_t n_probes,
                                     std::uint64_t seed = kDefaultProbeSeed);

enum class EnvelopeKind { b_hat, sigma_hat_sq };

/// Analytic L1 norm when declared, adaptive quadrature otherwise.
double l1_norm_envelope(const CoefficientSet& cs, EnvelopeKind which);

}  // namespace nullrec
