#include <doctest.h>

#include <cmath>

#include "nullrec/coefficients.hpp"
#include "nullrec/errors.hpp"

using namespace nullrec;

namespace {
const double kSqrtPi = std::sqrt(M_PI);
}

TEST_CASE("oscillator entry matches its closed forms") {
    const CoefficientSet cs = build_catalog_entry("oscillator", {{"amplitude", 1.0}});
    CHECK(cs.dim == 2);
    CHECK(cs.noise_dim == 1);

    Eigen::Vector2d y(0.3, -1.2);
    const Eigen::VectorXd b = cs.b1(y);
    CHECK(b[0] == doctest::Approx(1.2));
    CHECK(b[1] == doctest::Approx(0.3));
    const Eigen::MatrixXd D = cs.Db1(y);
    CHECK(D(0, 1) == -1.0);
    CHECK(D(1, 0) == 1.0);

    const Eigen::MatrixXd s = cs.sigma(0.0, y);
    CHECK(s.rows() == 2);
    CHECK(s.cols() == 1);
    CHECK(s(0, 0) == doctest::Approx(1.0));
    CHECK(s(1, 0) == 0.0);

    CHECK(cs.b2_is_zero);
    CHECK(cs.l1_sigma_hat_sq == doctest::Approx(kSqrtPi));
    CHECK(cs.c1 == 1.0);
    CHECK(cs.c2 == 1.0);
}

TEST_CASE("gaussian_bump with zero amplitude is the null perturbation") {
    const CoefficientSet cs = build_catalog_entry("gaussian_bump", {{"A", 0.0}});
    CHECK(cs.b2_is_zero);
    CHECK(cs.sigma_is_zero);
    CHECK(cs.b_hat(0.7) == 0.0);
    CHECK(cs.sigma_hat_sq(-1.3) == 0.0);
    CHECK(cs.l1_b_hat == 0.0);
    CHECK(cs.l1_sigma_hat_sq == 0.0);
}

TEST_CASE("constant_psi accepts c=2 and rejects c<=0") {
    const CoefficientSet cs = build_catalog_entry("constant_psi", {{"c", 2.0}});
    CHECK(cs.c1 == 2.0);
    CHECK(cs.c2 == 2.0);
    CHECK(cs.psi1(Eigen::VectorXd::Zero(1)) == 2.0);
    CHECK(cs.psi2(0.3, Eigen::VectorXd::Zero(1)) == 0.0);

    CHECK_THROWS_AS(build_catalog_entry("constant_psi", {{"c", 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(build_catalog_entry("constant_psi", {{"c", -1.0}}), std::invalid_argument);
}

TEST_CASE("unknown entries and parameters are rejected") {
    CHECK_THROWS_AS(build_catalog_entry("no_such_entry"), NotFoundError);
    CHECK_THROWS_AS(build_catalog_entry("oscillator", {{"bogus", 1.0}}), std::invalid_argument);
}

TEST_CASE("custom registration hook") {
    CatalogEntry entry;
    entry.name = "cauchy_test_entry";
    entry.defaults = {{"scale", 1.0}};
    entry.summary = "test-only entry with Cauchy drift envelope";
    entry.build = [](const std::map<std::string, double>& p) {
        CoefficientSet cs = build_catalog_entry("drift_only", {{"B", 0.0}});
        const double s = p.at("scale");
        cs.name = "cauchy_test_entry";
        cs.b_hat = [s](double x) { return s / (1.0 + x * x); };
        cs.l1_b_hat = std::numeric_limits<double>::quiet_NaN();  // force quadrature
        cs.b2_is_zero = false;
        return cs;
    };
    Catalog::register_entry(entry);
    REQUIRE(Catalog::contains("cauchy_test_entry"));
    const CoefficientSet cs = build_catalog_entry("cauchy_test_entry");
    // arctangent antiderivative: integral of 1/(1+x^2) over R is pi
    CHECK(l1_norm_envelope(cs, EnvelopeKind::b_hat) == doctest::Approx(M_PI).epsilon(1e-8));
}

TEST_CASE("non-integrable envelope raises the divergence error") {
    CoefficientSet cs = build_catalog_entry("drift_only", {{"B", 0.0}});
    cs.b_hat = [](double) { return 1.0; };  // constant, not in L1
    cs.l1_b_hat = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(l1_norm_envelope(cs, EnvelopeKind::b_hat), IntegrationError);
}

TEST_CASE("l1 norms: analytic and numeric agree on the Gaussian") {
    CoefficientSet cs = build_catalog_entry("oscillator");
    CHECK(l1_norm_envelope(cs, EnvelopeKind::sigma_hat_sq) == doctest::Approx(kSqrtPi));
    cs.l1_sigma_hat_sq = std::numeric_limits<double>::quiet_NaN();
    CHECK(l1_norm_envelope(cs, EnvelopeKind::sigma_hat_sq) ==
          doctest::Approx(kSqrtPi).epsilon(1e-8));
    CHECK(l1_norm_envelope(cs, EnvelopeKind::b_hat) == 0.0);
}

TEST_CASE("check_assumptions passes for catalog entries") {
    for (const char* name : {"oscillator", "gaussian_bump", "drift_only", "constant_psi",
                             "psi_bump", "psi_y"}) {
        const CoefficientSet cs = build_catalog_entry(name);
        const VerificationReport report = check_assumptions(cs, ProbeBox{}, 500);
        INFO(name << ": " << report.to_text());
        CHECK(report.pass());
    }
}

TEST_CASE("scaled-down envelope fails domination") {
    CoefficientSet cs = build_catalog_entry("gaussian_bump", {{"A", 1.0}});
    const auto original = cs.b_hat;
    cs.b_hat = [original](double x) { return 0.5 * original(x); };
    const VerificationReport report = check_assumptions(cs, ProbeBox{}, 500);
    CHECK_FALSE(report.pass());
    bool envelope_failed = false;
    for (const auto& c : report.checks)
        if (c.name == "envelope_b_hat" && !c.pass) envelope_failed = true;
    CHECK(envelope_failed);
}

TEST_CASE("understated psi upper bound fails the psi check") {
    CoefficientSet cs = build_catalog_entry("psi_bump", {{"c0", 1.0}, {"p", 1.0}});
    cs.c2 = 1.5;  // true sup of psi1+psi2 is 2
    const VerificationReport report = check_assumptions(cs, ProbeBox{-0.5, 0.5, {}, {}}, 500);
    CHECK_FALSE(report.pass());
    bool psi_failed = false;
    for (const auto& c : report.checks)
        if (c.name == "psi_upper" && !c.pass) psi_failed = true;
    CHECK(psi_failed);
}

TEST_CASE("finite-difference jacobian agrees with Db1 at random points") {
    // catalog-wide property: 100 probes per entry, relative error <= 1e-6
    for (const char* name : {"oscillator", "gaussian_bump", "drift_only"}) {
        const CoefficientSet cs = build_catalog_entry(name);
        const VerificationReport report = check_assumptions(cs, ProbeBox{}, 100);
        for (const auto& c : report.checks)
            if (c.name == "jacobian_db1") {
                INFO(name);
                CHECK(c.pass);
                CHECK(c.value <= 1e-6);
            }
    }
}
