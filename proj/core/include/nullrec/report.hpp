#pragma once

#include <nlohmann/json.hpp>
#include <limits>
#include <string>
#include <vector>

namespace nullrec {

/// One (abscissa, estimate, standard error) triple of a statistical sweep.
struct ReportPoint {
    std::string label;  // e.g. "eps=0.1" or "t=0.5"
    double x = std::numeric_limits<double>::quiet_NaN();
    double estimate = std::numeric_limits<double>::quiet_NaN();
    double se = std::numeric_limits<double>::quiet_NaN();
};

/// One named pass/fail assertion with its observed value and threshold.
struct ReportCheck {
    std::string name;
    double value = std::numeric_limits<double>::quiet_NaN();
    double threshold = std::numeric_limits<double>::quiet_NaN();
    bool pass = false;
    std::string note;
};

/// Structured result of a statistical test. The pass flag is a pure function
/// of the recorded checks; provenance (seeds, grid, n_paths) lives in params
/// so a report can be reproduced bit-for-bit.
struct VerificationReport {
    std::string test_name;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    std::vector<ReportPoint> points;
    std::vector<ReportCheck> checks;
    double slope = std::numeric_limits<double>::quiet_NaN();
    double slope_se = std::numeric_limits<double>::quiet_NaN();
    double tolerance = std::numeric_limits<double>::quiet_NaN();

    void add_check(std::string name, double value, double threshold, bool pass,
                   std::string note = "");

    /// Convenience: pass iff value <= threshold.
    void add_upper_bound_check(std::string name, double value, double threshold,
                               std::string note = "");

    bool pass() const;

    /// JSON schema: name, params, estimates[], se[], slope, ci, pass (+checks).
    nlohmann::ordered_json to_json() const;
    std::string to_text() const;
};

}  // namespace nullrec
