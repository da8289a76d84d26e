#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nullrec/parallel.hpp"
#include "nullrec/paths.hpp"
#include "nullrec/stats.hpp"

using namespace nullrec;

TEST_CASE("make_grid basic examples") {
    const TimeGrid g = make_grid(0.0, 1.0, 4);
    CHECK(g.step() == doctest::Approx(0.25));
    CHECK(g.node(0) == 0.0);
    CHECK(g.node(2) == doctest::Approx(0.5));
    CHECK(g.node(4) == doctest::Approx(1.0));

    const TimeGrid single = make_grid(0.0, 2.0, 1);
    CHECK(single.n_nodes() == 2);
    CHECK(single.node(1) == doctest::Approx(2.0));

    CHECK_THROWS_AS(make_grid(1.0, 0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("grid nodes reconstructible from fields") {
    const TimeGrid g = make_grid(0.5, 3.5, 12);
    for (std::size_t k = 0; k <= 12; ++k)
        CHECK(g.node(k) == 0.5 + static_cast<double>(k) * g.step());
    CHECK(g.nearest_node(0.5) == 0);
    CHECK(g.nearest_node(3.5) == 12);
    CHECK(g.nearest_node(g.node(7) + 0.1 * g.step()) == 7);
}

TEST_CASE("brownian path starts at zero and is reproducible") {
    const TimeGrid g = make_grid(0.0, 1.0, 128);
    const SeedSpec seed{42, 7};
    const SamplePath a = sample_brownian(g, 3, seed);
    CHECK(a.state(0).norm() == 0.0);
    CHECK(a.all_finite());

    const SamplePath b = sample_brownian(g, 3, seed);
    CHECK(a == b);  // bit-identical

    const SamplePath c = sample_brownian(g, 3, SeedSpec{42, 8});
    CHECK(a.data() != c.data());
}

TEST_CASE("terminal variance matches Var W(1) = 1") {
    const TimeGrid g = make_grid(0.0, 1.0, 16);
    const std::size_t n = 100000;
    std::vector<double> terminal(n);
    for (std::size_t k = 0; k < n; ++k)
        terminal[k] = sample_brownian(g, 1, SeedSpec{2024, k}).value(16);
    const MeanSE m = mean_se(terminal);
    // variance estimate and its MC standard error sqrt(2/(n-1))
    std::vector<double> sq(n);
    for (std::size_t k = 0; k < n; ++k) sq[k] = terminal[k] * terminal[k];
    const MeanSE msq = mean_se(sq);
    const double var = msq.mean - m.mean * m.mean;
    const double se = std::sqrt(2.0 / static_cast<double>(n - 1));
    CHECK(std::abs(var - 1.0) <= 3.0 * se);
}

TEST_CASE("scaling: W(t)/sqrt(t) is standard normal by KS") {
    const TimeGrid g = make_grid(0.0, 2.0, 64);
    const std::size_t n = 10000;
    std::vector<double> at_mid(n), at_end(n);
    for (std::size_t k = 0; k < n; ++k) {
        const SamplePath w = sample_brownian(g, 1, SeedSpec{99, k});
        at_mid[k] = w.value(32) / std::sqrt(g.node(32));
        at_end[k] = w.value(64) / std::sqrt(2.0);
    }
    CHECK(ks_vs_standard_normal(at_mid) < 0.02);
    CHECK(ks_vs_standard_normal(at_end) < 0.02);
}

TEST_CASE("disjoint increments are uncorrelated") {
    const TimeGrid g = make_grid(0.0, 1.0, 8);
    const std::size_t n = 100000;
    std::vector<double> prod(n), a2(n), b2(n);
    for (std::size_t k = 0; k < n; ++k) {
        const SamplePath w = sample_brownian(g, 1, SeedSpec{123, k});
        const double da = w.value(2) - w.value(0);
        const double db = w.value(6) - w.value(4);
        prod[k] = da * db;
        a2[k] = da * da;
        b2[k] = db * db;
    }
    const MeanSE mp = mean_se(prod);
    CHECK(std::abs(mp.mean) <= 3.0 * mp.se);
}

TEST_CASE("ensembles: degenerate, deterministic, order-independent") {
    const TimeGrid g = make_grid(0.0, 1.0, 32);
    const TrajectoryEnsemble e1 = sample_ensemble(g, 2, 1, 5);
    CHECK(e1.path(0) == sample_brownian(g, 2, SeedSpec{5, 0}));

    const TrajectoryEnsemble e2 = sample_ensemble(g, 2, 37, 5);
    const auto serial = e2.materialize(1);
    const auto parallel = e2.materialize(4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t k = 0; k < serial.size(); ++k) CHECK(serial[k] == parallel[k]);

    const auto again = sample_ensemble(g, 2, 37, 5).materialize(2);
    for (std::size_t k = 0; k < serial.size(); ++k) CHECK(serial[k] == again[k]);
}

TEST_CASE("csv export: header, full precision, comment lines") {
    const TimeGrid g = make_grid(0.0, 0.5, 2);
    SamplePath p(g, 2);
    p.value(1, 0) = 1.0 / 3.0;
    p.value(2, 1) = -2.5e-17;
    std::ostringstream os;
    write_csv(p, os, {{"seed", "11"}});
    const std::string text = os.str();
    CHECK(text.find("# seed=11\n") != std::string::npos);
    CHECK(text.find("t,x1,x2\n") != std::string::npos);
    CHECK(text.find("0.33333333333333331") != std::string::npos);
    CHECK(text.find("-2.4999999999999999e-17") != std::string::npos);
}

TEST_CASE("parallel_chunks covers every index once") {
    std::vector<int> hits(1000, 0);
    parallel_chunks(1000, 64, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) hits[i] += 1;
    });
    for (int h : hits) CHECK(h == 1);
}
