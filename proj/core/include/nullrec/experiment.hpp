#pragma once

#include <nlohmann/json.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nullrec/grid.hpp"
#include "nullrec/report.hpp"

namespace nullrec {

/// Config parse/validation failure; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One experiment, fully described by a JSON config. A config plus the binary
/// version reproduces every output byte-for-byte.
struct ExperimentConfig {
    std::string experiment;  // simulate | localtime | limit | oscillator-demo | verify-*
    std::string catalog_name = "oscillator";
    std::map<std::string, double> catalog_params;
    TimeGrid grid{0.0, 1.0, 1000};
    std::vector<double> epsilons;
    double h_ref = 1e-2;
    std::size_t n_paths = 1000;
    std::uint64_t master_seed = 1;
    std::string output_dir = "out";
    nlohmann::json tolerances = nlohmann::json::object();
    nlohmann::json extra = nlohmann::json::object();  // per-experiment fields

    nlohmann::json canonical() const;  // sorted-key JSON used for hashing
    std::string config_hash() const;   // FNV-1a 64 over the canonical dump
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct ExperimentResult {
    int exit_code = 0;  // 0 pass, 1 checks failed, 2 config error, 3 blow-up
    std::vector<std::string> artifacts;
    std::vector<VerificationReport> reports;
    std::string failure_summary;  // JSON text when exit_code == 1
};

/// Runs the experiment, writing artifacts under out_dir (falls back to the
/// config's output_dir). threads <= 0 keeps the global default.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::optional<std::string>& out_dir = std::nullopt,
                                int threads = 0);

/// Catalog listing: names, parameters, defaults, envelope norms and declared
/// assumption metadata. Stable across runs.
std::string catalog_listing();

std::string nullrec_version();

}  // namespace nullrec
