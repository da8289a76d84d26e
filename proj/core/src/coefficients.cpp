#include "nullrec/coefficients.hpp"

#include <cmath>
#include <mutex>
#include <random>
#include <stdexcept>

#include "nullrec/errors.hpp"
#include "nullrec/quadrature.hpp"

namespace nullrec {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSqrt2Pi = 2.5066282746310005024;

double gauss_profile(double x) { return std::exp(-0.5 * x * x); }

std::map<std::string, double> merge_params(const CatalogEntry& entry,
                                           const std::map<std::string, double>& given) {
    auto merged = entry.defaults;
    for (const auto& [k, v] : given) {
        auto it = merged.find(k);
        if (it == merged.end())
            throw std::invalid_argument("catalog entry '" + entry.name +
                                        "': unknown parameter '" + k + "'");
        it->second = v;
    }
    return merged;
}

CoefficientSet make_zero_base(int dim, int noise_dim) {
    CoefficientSet cs;
    cs.dim = dim;
    cs.noise_dim = noise_dim;
    cs.b1 = [dim](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(dim).eval(); };
    cs.Db1 = [dim](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(dim, dim).eval(); };
    cs.b2 = [dim](double, const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(dim).eval(); };
    cs.sigma = [dim, noise_dim](double, const Eigen::VectorXd&) {
        return Eigen::MatrixXd::Zero(dim, noise_dim).eval();
    };
    cs.psi1 = [](const Eigen::VectorXd&) { return 1.0; };
    cs.psi2 = [](double, const Eigen::VectorXd&) { return 0.0; };
    cs.b_hat = [](double) { return 0.0; };
    cs.sigma_hat_sq = [](double) { return 0.0; };
    cs.l1_b_hat = 0.0;
    cs.l1_sigma_hat_sq = 0.0;
    cs.b2_is_zero = true;
    cs.sigma_is_zero = true;
    cs.b1_is_bounded = true;
    return cs;
}

CoefficientSet build_oscillator(const std::map<std::string, double>& p) {
    const double a = p.at("amplitude");
    CoefficientSet cs = make_zero_base(2, 1);
    cs.name = "oscillator";
    cs.params = p;
    cs.b1 = [](const Eigen::VectorXd& y) {
        return Eigen::Vector2d(-y[1], y[0]).eval();
    };
    cs.Db1 = [](const Eigen::VectorXd&) {
        Eigen::Matrix2d m;
        m << 0.0, -1.0, 1.0, 0.0;
        return Eigen::MatrixXd(m);
    };
    cs.sigma = [a](double x, const Eigen::VectorXd&) {
        Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2, 1);
        s(0, 0) = a * gauss_profile(x);
        return s;
    };
    cs.sigma_hat_sq = [a](double x) { return a * a * std::exp(-x * x); };
    cs.l1_sigma_hat_sq = a * a * kSqrtPi;
    cs.sigma_is_zero = (a == 0.0);
    cs.b1_is_bounded = false;
    cs.lip_b1 = 1.0;  // rotation generator is an isometry
    cs.lip_sigma = std::abs(a) * std::exp(-0.5);
    return cs;
}

CoefficientSet build_gaussian_bump(const std::map<std::string, double>& p) {
    const double A = p.at("A");
    CoefficientSet cs = make_zero_base(1, 1);
    cs.name = "gaussian_bump";
    cs.params = p;
    cs.b1 = [](const Eigen::VectorXd& y) { return (-y).eval(); };
    cs.Db1 = [](const Eigen::VectorXd&) {
        return (-Eigen::MatrixXd::Identity(1, 1)).eval();
    };
    cs.b2 = [A](double x, const Eigen::VectorXd& y) {
        Eigen::VectorXd v(1);
        v[0] = A * gauss_profile(x) * std::cos(y[0]);
        return v;
    };
    cs.sigma = [A](double x, const Eigen::VectorXd& y) {
        Eigen::MatrixXd s(1, 1);
        s(0, 0) = A * gauss_profile(x) / (1.0 + y[0] * y[0]);
        return s;
    };
    cs.b_hat = [A](double x) { return std::abs(A) * gauss_profile(x); };
    cs.sigma_hat_sq = [A](double x) { return A * A * std::exp(-x * x); };
    cs.l1_b_hat = std::abs(A) * kSqrt2Pi;
    cs.l1_sigma_hat_sq = A * A * kSqrtPi;
    cs.b2_is_zero = (A == 0.0);
    cs.sigma_is_zero = (A == 0.0);
    cs.b1_is_bounded = false;
    cs.lip_b1 = 1.0;
    cs.lip_b2 = std::abs(A) * std::sqrt(1.0 + std::exp(-1.0));
    // max |d sigma / dy| = A * 9 / (8 sqrt(3)) at y = 1/sqrt(3)
    const double dy_max = 9.0 / (8.0 * std::sqrt(3.0));
    cs.lip_sigma = std::abs(A) * std::sqrt(std::exp(-1.0) + dy_max * dy_max);
    return cs;
}

CoefficientSet build_drift_only(const std::map<std::string, double>& p) {
    const double B = p.at("B");
    CoefficientSet cs = make_zero_base(1, 1);
    cs.name = "drift_only";
    cs.params = p;
    cs.b2 = [B](double x, const Eigen::VectorXd&) {
        Eigen::VectorXd v(1);
        v[0] = B * gauss_profile(x);
        return v;
    };
    cs.b_hat = [B](double x) { return std::abs(B) * gauss_profile(x); };
    cs.l1_b_hat = std::abs(B) * kSqrt2Pi;
    cs.b2_is_zero = (B == 0.0);
    cs.lip_b2 = std::abs(B) * std::exp(-0.5);
    return cs;
}

CoefficientSet build_constant_psi(const std::map<std::string, double>& p) {
    const double c = p.at("c");
    const double a = p.at("a");
    if (!(c > 0.0))
        throw std::invalid_argument("constant_psi: c must be positive (psi bound condition)");
    CoefficientSet cs = make_zero_base(1, 1);
    cs.name = "constant_psi";
    cs.params = p;
    cs.psi1 = [c](const Eigen::VectorXd&) { return c; };
    cs.sigma = [a](double x, const Eigen::VectorXd&) {
        Eigen::MatrixXd s(1, 1);
        s(0, 0) = a * gauss_profile(x);
        return s;
    };
    cs.sigma_hat_sq = [a](double x) { return a * a * std::exp(-x * x); };
    cs.l1_sigma_hat_sq = a * a * kSqrtPi;
    cs.sigma_is_zero = (a == 0.0);
    cs.lip_sigma = std::abs(a) * std::exp(-0.5);
    cs.c1 = c;
    cs.c2 = c;
    return cs;
}

CoefficientSet build_psi_bump(const std::map<std::string, double>& p) {
    const double c0 = p.at("c0");
    const double amp = p.at("p");
    const double a = p.at("a");
    if (!(c0 > 0.0) || amp < 0.0)
        throw std::invalid_argument("psi_bump: need c0 > 0 and p >= 0 (psi bound condition)");
    CoefficientSet cs = build_constant_psi({{"c", c0}, {"a", a}});
    cs.name = "psi_bump";
    cs.params = p;
    cs.psi2 = [amp](double x, const Eigen::VectorXd&) { return amp * gauss_profile(x); };
    cs.lip_psi2 = amp * std::exp(-0.5);
    cs.c1 = c0;
    cs.c2 = c0 + amp;
    return cs;
}

CoefficientSet build_psi_y(const std::map<std::string, double>& p) {
    const double c0 = p.at("c0");
    const double q = p.at("q");
    const double a = p.at("a");
    if (!(c0 > 0.0) || q < 0.0)
        throw std::invalid_argument("psi_y: need c0 > 0 and q >= 0 (psi bound condition)");
    CoefficientSet cs = build_constant_psi({{"c", c0}, {"a", a}});
    cs.name = "psi_y";
    cs.params = p;
    cs.psi1 = [c0, q](const Eigen::VectorXd& y) {
        const double s = std::sin(y[0]);
        return c0 + q * s * s;
    };
    cs.lip_psi1 = q;
    cs.c1 = c0;
    cs.c2 = c0 + q;
    return cs;
}

struct Registry {
    std::mutex mutex;
    std::vector<CatalogEntry> entries;

    Registry() {
        entries.push_back({"oscillator",
                           {{"amplitude", 1.0}},
                           "harmonic oscillator: rotation drift, Gaussian 1-column diffusion",
                           build_oscillator});
        entries.push_back({"gaussian_bump",
                           {{"A", 1.0}},
                           "1-d contraction with Gaussian-localized b2 and sigma",
                           build_gaussian_bump});
        entries.push_back({"drift_only",
                           {{"B", 1.0}},
                           "sigma == 0; Gaussian-localized y-independent b2",
                           build_drift_only});
        entries.push_back({"constant_psi",
                           {{"c", 2.0}, {"a", 1.0}},
                           "psi1 == c, zero drift, Gaussian diffusion",
                           build_constant_psi});
        entries.push_back({"psi_bump",
                           {{"c0", 1.0}, {"p", 1.0}, {"a", 1.0}},
                           "psi2 = p exp(-x^2/2) bump on top of constant psi1",
                           build_psi_bump});
        entries.push_back({"psi_y",
                           {{"c0", 1.0}, {"q", 1.0}, {"a", 1.0}},
                           "y-dependent psi1 = c0 + q sin^2(y)",
                           build_psi_y});
    }
};

Registry& registry() {
    static Registry r;
    return r;
}

}  // namespace

void Catalog::register_entry(CatalogEntry entry) {
    auto& reg = registry();
    std::lock_guard lock(reg.mutex);
    for (auto& e : reg.entries) {
        if (e.name == entry.name) {
            e = std::move(entry);
            return;
        }
    }
    reg.entries.push_back(std::move(entry));
}

CoefficientSet Catalog::build(const std::string& name,
                              const std::map<std::string, double>& params) {
    CatalogEntry entry;
    {
        auto& reg = registry();
        std::lock_guard lock(reg.mutex);
        bool found = false;
        for (const auto& e : reg.entries) {
            if (e.name == name) {
                entry = e;
                found = true;
                break;
            }
        }
        if (!found) throw NotFoundError("catalog entry not found: " + name);
    }
    return entry.build(merge_params(entry, params));
}

std::vector<CatalogEntry> Catalog::entries() {
    auto& reg = registry();
    std::lock_guard lock(reg.mutex);
    return reg.entries;
}

bool Catalog::contains(const std::string& name) {
    auto& reg = registry();
    std::lock_guard lock(reg.mutex);
    for (const auto& e : reg.entries)
        if (e.name == name) return true;
    return false;
}

CoefficientSet build_catalog_entry(const std::string& name,
                                   const std::map<std::string, double>& params) {
    return Catalog::build(name, params);
}

namespace {

Eigen::MatrixXd fd_jacobian(const CoefficientSet& cs, const Eigen::VectorXd& y) {
    const int d = cs.dim;
    Eigen::MatrixXd J(d, d);
    for (int j = 0; j < d; ++j) {
        const double h = 1e-5 * std::max(1.0, std::abs(y[j]));
        Eigen::VectorXd yp = y, ym = y;
        yp[j] += h;
        ym[j] -= h;
        J.col(j) = (cs.b1(yp) - cs.b1(ym)) / (2.0 * h);
    }
    return J;
}

}  // namespace

VerificationReport check_assumptions(const CoefficientSet& cs, const ProbeBox& box,
                                     std::size_t n_probes, std::uint64_t seed) {
    if (n_probes < 2) throw std::invalid_argument("check_assumptions: n_probes must be >= 2");
    const int d = cs.dim;
    Eigen::VectorXd y_lo = box.y_lo.size() == d ? box.y_lo : Eigen::VectorXd::Constant(d, -3.0);
    Eigen::VectorXd y_hi = box.y_hi.size() == d ? box.y_hi : Eigen::VectorXd::Constant(d, 3.0);

    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> xs(n_probes);
    std::vector<Eigen::VectorXd> ys(n_probes);
    for (std::size_t i = 0; i < n_probes; ++i) {
        xs[i] = box.x_lo + (box.x_hi - box.x_lo) * unif(eng);
        Eigen::VectorXd y(d);
        for (int j = 0; j < d; ++j) y[j] = y_lo[j] + (y_hi[j] - y_lo[j]) * unif(eng);
        ys[i] = y;
    }

    double lip_b1_obs = 0, lip_b2_obs = 0, lip_sigma_obs = 0;
    double env_b_excess = 0, env_sigma_excess = 0;
    double psi_min = std::numeric_limits<double>::infinity();
    double psi_max = -std::numeric_limits<double>::infinity();
    double jac_err = 0;

    for (std::size_t i = 0; i < n_probes; ++i) {
        const double x = xs[i];
        const Eigen::VectorXd& y = ys[i];

        const double bhat = cs.b_hat(x);
        const double b2n = cs.b2(x, y).norm();
        env_b_excess = std::max(env_b_excess, b2n / std::max(bhat, 1e-300));

        const double shat = cs.sigma_hat_sq(x);
        const Eigen::MatrixXd s = cs.sigma(x, y);
        const double tr = s.squaredNorm();
        env_sigma_excess = std::max(env_sigma_excess, tr / std::max(shat, 1e-300));

        const double psi = cs.psi1(y) + cs.psi2(x, y);
        psi_min = std::min(psi_min, psi);
        psi_max = std::max(psi_max, psi);

        const Eigen::MatrixXd J = cs.Db1(y);
        const Eigen::MatrixXd Jfd = fd_jacobian(cs, y);
        const double scale = std::max(J.norm(), 1.0);
        jac_err = std::max(jac_err, (J - Jfd).norm() / scale);

        if (i + 1 < n_probes) {
            const double xq = xs[i + 1];
            const Eigen::VectorXd& yq = ys[i + 1];
            const double dy = (y - yq).norm();
            const double dxy = std::sqrt((x - xq) * (x - xq) + dy * dy);
            if (dy > 1e-12)
                lip_b1_obs = std::max(lip_b1_obs, (cs.b1(y) - cs.b1(yq)).norm() / dy);
            if (dxy > 1e-12) {
                lip_b2_obs = std::max(lip_b2_obs, (cs.b2(x, y) - cs.b2(xq, yq)).norm() / dxy);
                lip_sigma_obs =
                    std::max(lip_sigma_obs, (cs.sigma(x, y) - cs.sigma(xq, yq)).norm() / dxy);
            }
        }
    }

    VerificationReport report;
    report.test_name = "check_assumptions";
    report.params["entry"] = cs.name;
    report.params["n_probes"] = n_probes;
    report.params["seed"] = seed;
    report.params["x_box"] = {box.x_lo, box.x_hi};

    const double slack = 1.0 + 1e-9;
    report.add_check("lipschitz_b1", lip_b1_obs, cs.lip_b1 * slack,
                     lip_b1_obs <= cs.lip_b1 * slack + 1e-12);
    report.add_check("lipschitz_b2", lip_b2_obs, cs.lip_b2 * slack,
                     lip_b2_obs <= cs.lip_b2 * slack + 1e-12);
    report.add_check("lipschitz_sigma", lip_sigma_obs, cs.lip_sigma * slack,
                     lip_sigma_obs <= cs.lip_sigma * slack + 1e-12);
    report.add_check("envelope_b_hat", env_b_excess, slack, env_b_excess <= slack,
                     "max |b2|/b_hat over probes");
    report.add_check("envelope_sigma_hat_sq", env_sigma_excess, slack, env_sigma_excess <= slack,
                     "max Tr(sigma sigma^T)/sigma_hat_sq over probes");
    report.add_check("psi_lower", psi_min, cs.c1, psi_min >= cs.c1 * (1.0 - 1e-12),
                     "min psi1+psi2 vs c1");
    report.add_check("psi_upper", psi_max, cs.c2, psi_max <= cs.c2 * (1.0 + 1e-12),
                     "max psi1+psi2 vs c2");
    report.add_check("jacobian_db1", jac_err, 1e-6, jac_err <= 1e-6,
                     "max relative finite-difference error");
    return report;
}

double l1_norm_envelope(const CoefficientSet& cs, EnvelopeKind which) {
    const bool is_b = (which == EnvelopeKind::b_hat);
    const double declared = is_b ? cs.l1_b_hat : cs.l1_sigma_hat_sq;
    if (std::isfinite(declared)) return declared;
    const auto& f = is_b ? cs.b_hat : cs.sigma_hat_sq;
    QuadratureSpec spec;
    spec.rel_tol = 1e-8;
    return integrate_real_line(f, spec);
}

}  // namespace nullrec
