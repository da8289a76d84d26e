// nullrec-sim: config-driven experiment runner.
//   nullrec-sim run <config.json> [--threads N] [--out DIR]
//   nullrec-sim list-catalog
// NULLREC_SEED overrides the config master seed.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "nullrec/errors.hpp"
#include "nullrec/experiment.hpp"
#include "nullrec/parallel.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fast-slow SDE simulation and verification harness"};
    app.set_version_flag("--version", nullrec::nullrec_version());
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 0;

    auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
    run->add_option("config", config_path, "path to the experiment config")->required();
    run->add_option("--threads", threads, "worker thread cap (0 = hardware)");
    run->add_option("--out", out_dir, "output directory (overrides config)");

    auto* list = app.add_subcommand("list-catalog", "list coefficient catalog entries");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        std::cout << nullrec::catalog_listing();
        return 0;
    }

    try {
        nullrec::ExperimentConfig config = nullrec::load_config(config_path);
        if (const char* env_seed = std::getenv("NULLREC_SEED")) {
            config.master_seed = std::strtoull(env_seed, nullptr, 10);
        }
        if (threads > 0) nullrec::set_max_threads(threads);
        const std::optional<std::string> out =
            out_dir.empty() ? std::nullopt : std::optional<std::string>(out_dir);
        const nullrec::ExperimentResult result = nullrec::run_experiment(config, out, threads);
        for (const auto& r : result.reports) std::cout << r.to_text();
        for (const auto& a : result.artifacts) std::cout << "artifact: " << a << "\n";
        if (result.exit_code != 0) std::cerr << result.failure_summary;
        return result.exit_code;
    } catch (const nullrec::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
