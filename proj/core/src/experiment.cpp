#include "nullrec/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "nullrec/coefficients.hpp"
#include "nullrec/deterministic.hpp"
#include "nullrec/errors.hpp"
#include "nullrec/limit.hpp"
#include "nullrec/localtime.hpp"
#include "nullrec/parallel.hpp"
#include "nullrec/paths.hpp"
#include "nullrec/sde.hpp"
#include "nullrec/timechange.hpp"
#include "nullrec/verify.hpp"

namespace nullrec {

namespace fs = std::filesystem;
using nlohmann::json;

std::string nullrec_version() { return "0.1.0"; }

namespace {

const std::set<std::string> kExperiments = {
    "simulate",        "localtime",        "limit",
    "oscillator-demo", "verify-l1-bound",  "verify-rate",
    "verify-reduction", "verify-char-function", "verify-weak-convergence",
    "verify-timechange"};

const std::set<std::string> kTopLevelKeys = {
    "experiment", "catalog", "grid",        "epsilons",   "h_ref",     "n_paths",
    "master_seed", "output_dir", "tolerances", "eps",      "system",    "x0",
    "y0",          "t",       "p",           "T",          "probe_times", "lambdas",
    "n_resamples", "psi",     "method",      "level",      "delta",     "h_inner",
    "sqrt_eps",    "sigma_l2", "demo_steps", "construction", "dump_samples"};

[[noreturn]] void config_fail(const std::string& field, const std::string& why) {
    throw ConfigError("config field '" + field + "': " + why);
}

double require_number(const json& j, const std::string& field) {
    if (!j.contains(field) || !j.at(field).is_number()) config_fail(field, "expected a number");
    return j.at(field).get<double>();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

json ExperimentConfig::canonical() const {
    json j;  // plain json sorts keys, giving a canonical dump
    j["experiment"] = experiment;
    j["catalog"] = {{"name", catalog_name}, {"params", catalog_params}};
    j["grid"] = {{"t0", grid.t0()}, {"t_end", grid.t_end()}, {"n_steps", grid.n_steps()}};
    j["epsilons"] = epsilons;
    j["h_ref"] = h_ref;
    j["n_paths"] = n_paths;
    j["master_seed"] = master_seed;
    j["tolerances"] = tolerances;
    j["extra"] = extra;
    return j;
}

std::string ExperimentConfig::config_hash() const {
    std::ostringstream os;
    os << std::hex << fnv1a(canonical().dump());
    return os.str();
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!kTopLevelKeys.count(key)) config_fail(key, "unknown field");

    ExperimentConfig cfg;
    if (!j.contains("experiment") || !j.at("experiment").is_string())
        config_fail("experiment", "required string");
    cfg.experiment = j.at("experiment").get<std::string>();
    if (!kExperiments.count(cfg.experiment))
        config_fail("experiment", "unknown experiment kind '" + cfg.experiment + "'");

    if (j.contains("catalog")) {
        const auto& c = j.at("catalog");
        if (!c.is_object() || !c.contains("name") || !c.at("name").is_string())
            config_fail("catalog", "expected object with string 'name'");
        cfg.catalog_name = c.at("name").get<std::string>();
        if (c.contains("params")) {
            if (!c.at("params").is_object()) config_fail("catalog.params", "expected object");
            for (const auto& [k, v] : c.at("params").items()) {
                if (!v.is_number()) config_fail("catalog.params." + k, "expected a number");
                cfg.catalog_params[k] = v.get<double>();
            }
        }
    }

    const std::set<std::string> needs_grid = {"simulate", "localtime", "limit",
                                              "verify-char-function"};
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (!g.is_object()) config_fail("grid", "expected object {t0, t_end, n_steps}");
        const double t0 = require_number(g, "t0");
        const double t_end = require_number(g, "t_end");
        const double n = require_number(g, "n_steps");
        if (!(n >= 1.0) || n != std::floor(n)) config_fail("grid.n_steps", "expected integer >= 1");
        if (!(t_end > t0)) config_fail("grid", "t_end must exceed t0");
        cfg.grid = TimeGrid(t0, t_end, static_cast<std::size_t>(n));
    } else if (needs_grid.count(cfg.experiment)) {
        config_fail("grid", "required for experiment '" + cfg.experiment + "'");
    }

    const std::set<std::string> needs_eps = {"verify-l1-bound", "verify-rate", "verify-reduction",
                                             "verify-weak-convergence", "verify-timechange"};
    if (j.contains("epsilons")) {
        if (!j.at("epsilons").is_array() || j.at("epsilons").empty())
            config_fail("epsilons", "expected non-empty array of numbers");
        for (const auto& v : j.at("epsilons")) {
            if (!v.is_number()) config_fail("epsilons", "expected numbers");
            cfg.epsilons.push_back(v.get<double>());
        }
    } else if (needs_eps.count(cfg.experiment)) {
        config_fail("epsilons", "required for experiment '" + cfg.experiment + "'");
    }

    if (j.contains("h_ref")) cfg.h_ref = require_number(j, "h_ref");
    if (!(cfg.h_ref > 0)) config_fail("h_ref", "must be positive");
    if (j.contains("n_paths")) {
        const double n = require_number(j, "n_paths");
        if (!(n >= 1.0)) config_fail("n_paths", "must be >= 1");
        cfg.n_paths = static_cast<std::size_t>(n);
    }
    if (j.contains("master_seed")) {
        if (!j.at("master_seed").is_number_integer() && !j.at("master_seed").is_number_unsigned())
            config_fail("master_seed", "expected integer");
        cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    }
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) config_fail("output_dir", "expected string");
        cfg.output_dir = j.at("output_dir").get<std::string>();
    }
    if (j.contains("tolerances")) {
        if (!j.at("tolerances").is_object()) config_fail("tolerances", "expected object");
        cfg.tolerances = j.at("tolerances");
    }

    for (const auto& [key, val] : j.items()) {
        static const std::set<std::string> consumed = {"experiment", "catalog", "grid",
                                                       "epsilons",  "h_ref",  "n_paths",
                                                       "master_seed", "output_dir", "tolerances"};
        if (!consumed.count(key)) cfg.extra[key] = val;
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("JSON parse error: ") + e.what());
    }
    return parse_config(j);
}

namespace {

Eigen::VectorXd default_y0(const CoefficientSet& cs) {
    if (cs.name == "oscillator") {
        Eigen::VectorXd y(2);
        y << 1.0, 0.0;
        return y;
    }
    return Eigen::VectorXd::Zero(cs.dim);
}

Eigen::VectorXd resolve_y0(const ExperimentConfig& cfg, const CoefficientSet& cs) {
    if (cfg.extra.contains("y0")) {
        const auto& arr = cfg.extra.at("y0");
        if (!arr.is_array() || static_cast<int>(arr.size()) != cs.dim)
            config_fail("y0", "expected array of length " + std::to_string(cs.dim));
        Eigen::VectorXd y(cs.dim);
        for (int i = 0; i < cs.dim; ++i) y[i] = arr.at(i).get<double>();
        return y;
    }
    return default_y0(cs);
}

double extra_number(const ExperimentConfig& cfg, const std::string& key, double fallback) {
    if (!cfg.extra.contains(key)) return fallback;
    if (!cfg.extra.at(key).is_number()) config_fail(key, "expected a number");
    return cfg.extra.at(key).get<double>();
}

std::string extra_string(const ExperimentConfig& cfg, const std::string& key,
                         const std::string& fallback) {
    if (!cfg.extra.contains(key)) return fallback;
    if (!cfg.extra.at(key).is_string()) config_fail(key, "expected a string");
    return cfg.extra.at(key).get<std::string>();
}

VerifyOptions verify_options(const ExperimentConfig& cfg, int threads) {
    VerifyOptions opts;
    opts.master_seed = cfg.master_seed;
    opts.threads = threads;
    const auto& t = cfg.tolerances;
    auto num = [&](const char* k, double& field) {
        if (t.contains(k)) field = t.at(k).get<double>();
    };
    num("bound_factor", opts.bound_factor);
    num("limit_rtol", opts.limit_rtol);
    num("t_slope_tol", opts.t_slope_tol);
    num("rate_slope_rtol", opts.rate_slope_rtol);
    num("limit_h_inner", opts.limit_h_inner);
    num("ks_threshold", opts.ks_threshold);
    num("second_moment_ref", opts.second_moment_ref);
    num("second_moment_rtol", opts.second_moment_rtol);
    if (t.contains("limit_grid_steps"))
        opts.limit_grid_steps = t.at("limit_grid_steps").get<std::size_t>();
    return opts;
}

std::map<std::string, std::string> artifact_meta(const ExperimentConfig& cfg) {
    return {{"config_hash", cfg.config_hash()},
            {"version", nullrec_version()},
            {"master_seed", std::to_string(cfg.master_seed)}};
}

std::string write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path.string();
}

std::string write_report_file(const fs::path& dir, const std::string& name,
                              const ExperimentConfig& cfg, const VerificationReport& report) {
    nlohmann::ordered_json wrapper;
    wrapper["version"] = nullrec_version();
    wrapper["config_hash"] = cfg.config_hash();
    wrapper["master_seed"] = cfg.master_seed;
    wrapper["report"] = report.to_json();
    return write_text_file(dir / name, wrapper.dump(2) + "\n");
}

PsiFunction resolve_psi(const ExperimentConfig& cfg) {
    const std::string which = extra_string(cfg, "psi", "gaussian");
    if (which == "gaussian")
        return {"gaussian", [](double x) { return std::exp(-x * x); },
                std::sqrt(M_PI)};
    if (which == "indicator")
        return {"indicator", [](double x) { return std::abs(x) <= 1.0 ? 1.0 : 0.0; }, 2.0};
    if (which == "zero") return {"zero", [](double) { return 0.0; }, 0.0};
    config_fail("psi", "expected one of gaussian|indicator|zero");
}

std::vector<Eigen::VectorXd> resolve_lambdas(const ExperimentConfig& cfg, int dim) {
    std::vector<Eigen::VectorXd> lambdas;
    if (cfg.extra.contains("lambdas")) {
        for (const auto& row : cfg.extra.at("lambdas")) {
            if (!row.is_array() || static_cast<int>(row.size()) != dim)
                config_fail("lambdas", "each entry must be an array of length " +
                                            std::to_string(dim));
            Eigen::VectorXd lam(dim);
            for (int i = 0; i < dim; ++i) lam[i] = row.at(i).get<double>();
            lambdas.push_back(lam);
        }
        return lambdas;
    }
    lambdas.push_back(Eigen::VectorXd::Zero(dim));
    for (int i = 0; i < dim; ++i) {
        Eigen::VectorXd lam = Eigen::VectorXd::Zero(dim);
        lam[i] = 1.0;
        lambdas.push_back(lam);
        lam[i] = 2.0;
        lambdas.push_back(lam);
    }
    return lambdas;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::optional<std::string>& out_dir, int threads) {
    ExperimentResult result;
    const fs::path dir = out_dir.value_or(cfg.output_dir);
    fs::create_directories(dir);
    const auto meta = artifact_meta(cfg);

    try {
        if (cfg.experiment == "simulate") {
            const CoefficientSet cs = build_catalog_entry(cfg.catalog_name, cfg.catalog_params);
            const double eps = extra_number(cfg, "eps", 0.1);
            if (!(eps > 0)) config_fail("eps", "must be positive");
            const Eigen::VectorXd y0 = resolve_y0(cfg, cs);
            const std::string system = extra_string(cfg, "system", "unit");
            auto m = meta;
            m["eps"] = format_g17(eps);
            if (system == "unit") {
                const SamplePath Y =
                    simulate_Y_unit_phi(cs, eps, y0, cfg.grid, SeedSpec{cfg.master_seed, 0});
                std::ostringstream os;
                write_csv(Y, os, m);
                result.artifacts.push_back(write_text_file(dir / "trajectory_Y.csv", os.str()));
            } else if (system == "general") {
                const double x0 = extra_number(cfg, "x0", 0.0);
                const CoupledTrajectory traj = simulate_pair_general(
                    cs, eps, x0, y0, cfg.grid, SeedSpec{cfg.master_seed, 0});
                std::ostringstream osx, osy, ost;
                write_csv(traj.X, osx, m);
                write_csv(traj.Y, osy, m);
                write_csv(compute_time_change(traj, cs), ost, m);
                result.artifacts.push_back(write_text_file(dir / "trajectory_X.csv", osx.str()));
                result.artifacts.push_back(write_text_file(dir / "trajectory_Y.csv", osy.str()));
                result.artifacts.push_back(write_text_file(dir / "timechange.csv", ost.str()));
            } else {
                config_fail("system", "expected unit|general");
            }
        } else if (cfg.experiment == "localtime") {
            const std::string method = extra_string(cfg, "method", "occupation");
            const double level = extra_number(cfg, "level", 0.0);
            const SamplePath W = sample_brownian(cfg.grid, 1, SeedSpec{cfg.master_seed, 0});
            LocalTimeCurve curve;
            if (method == "occupation") {
                const double delta = extra_number(cfg, "delta", default_bandwidth(cfg.grid));
                curve = local_time_occupation(W, level, delta);
            } else if (method == "tanaka") {
                curve = local_time_tanaka(W, level);
            } else {
                config_fail("method", "expected occupation|tanaka");
            }
            std::ostringstream os;
            write_csv(curve, os, meta);
            result.artifacts.push_back(write_text_file(dir / "localtime.csv", os.str()));
        } else if (cfg.experiment == "limit") {
            const CoefficientSet cs = build_catalog_entry(cfg.catalog_name, cfg.catalog_params);
            const Eigen::VectorXd y0 = resolve_y0(cfg, cs);
            const double h_inner = extra_number(cfg, "h_inner", cfg.grid.step() / 64.0);
            const OdeSolution ode = solve_ode(cs, y0, cfg.grid);
            const DiffusionKernel kernel = diffusion_kernel(cs, ode);
            const FundamentalMatrix Phi = fundamental_matrix(cs, ode);
            const FractionalKineticPath V =
                sample_V(cfg.grid, cs.dim, SeedSpec{cfg.master_seed, 0}, h_inner);
            const std::string cons = extra_string(cfg, "construction", "variation_of_parameters");
            const ZetaConstruction zc = cons == "integral_equation"
                                            ? ZetaConstruction::integral_equation
                                            : ZetaConstruction::variation_of_parameters;
            const LimitDeviationPath zeta = sample_zeta0(kernel, Phi, V, zc);
            std::ostringstream osv, osz, osk;
            write_csv(V, osv, meta);
            write_csv(zeta, osz, meta);
            write_csv(kernel, osk, meta);
            result.artifacts.push_back(write_text_file(dir / "limit_V.csv", osv.str()));
            result.artifacts.push_back(write_text_file(dir / "limit_zeta0.csv", osz.str()));
            result.artifacts.push_back(write_text_file(dir / "diffusion_kernel.csv", osk.str()));
        } else if (cfg.experiment == "oscillator-demo") {
            const double sqrt_eps = extra_number(cfg, "sqrt_eps", 0.1);
            const double sigma_l2 = extra_number(cfg, "sigma_l2", 100.0);
            const double T = extra_number(cfg, "T", 10.0);
            const double n_steps = extra_number(cfg, "demo_steps", 4096);
            const OscillatorDemoResult demo =
                oscillator_demo(sqrt_eps, sigma_l2, T, SeedSpec{cfg.master_seed, 0},
                                static_cast<std::size_t>(n_steps));
            auto m = meta;
            m["sqrt_eps"] = format_g17(sqrt_eps);
            m["sigma_l2"] = format_g17(sigma_l2);
            std::ostringstream os;
            write_csv(demo, os, m);
            result.artifacts.push_back(write_text_file(dir / "oscillator_demo.csv", os.str()));
        } else {
            // verify-* experiments
            const VerifyOptions opts = verify_options(cfg, threads);
            const EpsilonSchedule schedule =
                cfg.epsilons.empty() ? EpsilonSchedule({0.1}, cfg.h_ref)
                                     : EpsilonSchedule(cfg.epsilons, cfg.h_ref);
            VerificationReport report;
            if (cfg.experiment == "verify-l1-bound") {
                const PsiFunction psi = resolve_psi(cfg);
                const double t = extra_number(cfg, "t", 1.0);
                const int p = static_cast<int>(extra_number(cfg, "p", 1));
                report = check_lemma_L1_bound(psi, t, p, schedule, cfg.n_paths, opts);
            } else if (cfg.experiment == "verify-rate") {
                const CoefficientSet cs =
                    build_catalog_entry(cfg.catalog_name, cfg.catalog_params);
                const double T = extra_number(cfg, "T", 1.0);
                const int p = static_cast<int>(extra_number(cfg, "p", 2));
                report = check_lemma_rate(cs, resolve_y0(cfg, cs), T, p, schedule, cfg.n_paths,
                                          opts);
            } else if (cfg.experiment == "verify-reduction") {
                const CoefficientSet cs =
                    build_catalog_entry(cfg.catalog_name, cfg.catalog_params);
                const double T = extra_number(cfg, "T", 1.0);
                report = check_reduction(cs, resolve_y0(cfg, cs), T, schedule, cfg.n_paths, opts);
            } else if (cfg.experiment == "verify-char-function") {
                const CoefficientSet cs =
                    build_catalog_entry(cfg.catalog_name, cfg.catalog_params);
                const double eps = extra_number(cfg, "eps", 0.1);
                const double t = extra_number(cfg, "t", 1.0);
                const double n_res = extra_number(cfg, "n_resamples", 10000);
                const OdeSolution ode = solve_ode(cs, resolve_y0(cfg, cs), cfg.grid);
                report = check_char_function(cs, ode, eps, t, resolve_lambdas(cfg, cs.dim),
                                             static_cast<std::size_t>(n_res), opts);
            } else if (cfg.experiment == "verify-weak-convergence") {
                const CoefficientSet cs =
                    build_catalog_entry(cfg.catalog_name, cfg.catalog_params);
                const double T = extra_number(cfg, "T", 1.0);
                std::vector<double> probes{T};
                if (cfg.extra.contains("probe_times")) {
                    probes.clear();
                    for (const auto& v : cfg.extra.at("probe_times"))
                        probes.push_back(v.get<double>());
                }
                VerifyOptions wopts = opts;
                if (!std::isfinite(wopts.second_moment_ref) && cs.name == "oscillator" &&
                    std::isfinite(cs.l1_sigma_hat_sq)) {
                    // closed form: rotation preserves norm, E L(1,0) = sqrt(2/pi)
                    wopts.second_moment_ref = cs.l1_sigma_hat_sq * 0.79788456080286536;
                }
                const bool dump =
                    cfg.extra.contains("dump_samples") && cfg.extra.at("dump_samples").is_boolean()
                        ? cfg.extra.at("dump_samples").get<bool>()
                        : false;
                WeakConvergenceSamples samples;
                report = check_weak_convergence(cs, resolve_y0(cfg, cs), T, probes, schedule,
                                                cfg.n_paths, wopts, dump ? &samples : nullptr);
                if (dump && !samples.prelimit.empty()) {
                    auto write_samples = [&](const char* name, const auto& data) {
                        std::ostringstream os;
                        for (const auto& [key, val] : meta) os << "# " << key << "=" << val << "\n";
                        os << "path";
                        for (std::size_t ip = 0; ip < samples.probe_times.size(); ++ip)
                            for (int j = 0; j < cs.dim; ++j)
                                os << ",t" << format_g17(samples.probe_times[ip]) << "_x" << (j + 1);
                        os << "\n";
                        for (std::size_t k = 0; k < cfg.n_paths; ++k) {
                            os << k;
                            for (std::size_t ip = 0; ip < data.size(); ++ip)
                                for (int j = 0; j < cs.dim; ++j)
                                    os << "," << format_g17(data[ip][static_cast<std::size_t>(j)][k]);
                            os << "\n";
                        }
                        result.artifacts.push_back(write_text_file(dir / name, os.str()));
                    };
                    write_samples("weak_samples_prelimit.csv", samples.prelimit);
                    write_samples("weak_samples_limit.csv", samples.limit);
                }
            } else if (cfg.experiment == "verify-timechange") {
                const CoefficientSet cs =
                    build_catalog_entry(cfg.catalog_name, cfg.catalog_params);
                const double T = extra_number(cfg, "T", 1.0);
                const TimeGrid ode_grid(0.0, T, 256);
                const OdeSolution ode = solve_ode(cs, resolve_y0(cfg, cs), ode_grid);
                TimechangeVerifyOptions topts;
                topts.master_seed = cfg.master_seed;
                topts.threads = threads;
                topts.x0 = extra_number(cfg, "x0", 0.0);
                report = verify_timechange_limit(cs, ode, schedule, cfg.n_paths, topts);
            }
            result.reports.push_back(report);
            result.artifacts.push_back(
                write_report_file(dir, cfg.experiment + ".report.json", cfg, report));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const NotFoundError& e) {
        throw ConfigError(e.what());
    } catch (const BlowUpError& e) {
        result.exit_code = 3;
        nlohmann::ordered_json summary;
        summary["error"] = "blow-up";
        summary["what"] = e.what();
        summary["node"] = e.node();
        result.failure_summary = summary.dump(2) + "\n";
        write_text_file(dir / "failure_summary.json", result.failure_summary);
        return result;
    }

    bool all_pass = true;
    for (const auto& r : result.reports)
        if (!r.pass()) all_pass = false;
    if (!all_pass) {
        result.exit_code = 1;
        nlohmann::ordered_json summary;
        summary["error"] = "checks_failed";
        auto failed = nlohmann::ordered_json::array();
        for (const auto& r : result.reports)
            for (const auto& c : r.checks)
                if (!c.pass)
                    failed.push_back({{"test", r.test_name},
                                      {"check", c.name},
                                      {"value", c.value},
                                      {"threshold", c.threshold}});
        summary["failed_checks"] = failed;
        result.failure_summary = summary.dump(2) + "\n";
        result.artifacts.push_back(
            write_text_file(dir / "failure_summary.json", result.failure_summary));
    }
    return result;
}

std::string catalog_listing() {
    std::ostringstream os;
    for (const auto& entry : Catalog::entries()) {
        os << entry.name << "\n  " << entry.summary << "\n  parameters:";
        for (const auto& [k, v] : entry.defaults) os << " " << k << "=" << v;
        os << "\n";
        try {
            const CoefficientSet cs = entry.build(entry.defaults);
            os << "  assumptions: |b_hat|_L1=" << l1_norm_envelope(cs, EnvelopeKind::b_hat)
               << " |sigma_hat^2|_L1=" << l1_norm_envelope(cs, EnvelopeKind::sigma_hat_sq)
               << " Lip(b1)=" << cs.lip_b1 << " Lip(b2)=" << cs.lip_b2
               << " Lip(sigma)=" << cs.lip_sigma << " psi-bounds=[" << cs.c1 << "," << cs.c2
               << "]" << (cs.b1_is_bounded ? " b1-bounded" : "") << "\n";
        } catch (const std::exception& e) {
            os << "  assumptions: unavailable (" << e.what() << ")\n";
        }
    }
    return os.str();
}

}  // namespace nullrec
