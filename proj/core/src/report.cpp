#include "nullrec/report.hpp"

#include <cmath>
#include <sstream>

namespace nullrec {

void VerificationReport::add_check(std::string name, double value, double threshold, bool pass,
                                   std::string note) {
    checks.push_back({std::move(name), value, threshold, pass, std::move(note)});
}

void VerificationReport::add_upper_bound_check(std::string name, double value, double threshold,
                                               std::string note) {
    add_check(std::move(name), value, threshold, value <= threshold, std::move(note));
}

bool VerificationReport::pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

nlohmann::ordered_json VerificationReport::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = test_name;
    j["params"] = params;
    auto estimates = nlohmann::ordered_json::array();
    auto ses = nlohmann::ordered_json::array();
    auto labels = nlohmann::ordered_json::array();
    for (const auto& p : points) {
        labels.push_back(p.label);
        estimates.push_back(p.estimate);
        ses.push_back(p.se);
    }
    j["labels"] = labels;
    j["estimates"] = estimates;
    j["se"] = ses;
    if (std::isfinite(slope)) {
        j["slope"] = slope;
        j["ci"] = {slope - 2.0 * slope_se, slope + 2.0 * slope_se};
    } else {
        j["slope"] = nullptr;
        j["ci"] = nullptr;
    }
    if (std::isfinite(tolerance)) j["tolerance"] = tolerance;
    auto checks_json = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json cj;
        cj["name"] = c.name;
        cj["value"] = c.value;
        cj["threshold"] = c.threshold;
        cj["pass"] = c.pass;
        if (!c.note.empty()) cj["note"] = c.note;
        checks_json.push_back(cj);
    }
    j["checks"] = checks_json;
    j["pass"] = pass();
    return j;
}

std::string VerificationReport::to_text() const {
    std::ostringstream os;
    os << "== " << test_name << " ==\n";
    for (const auto& p : points)
        os << "  " << p.label << ": " << p.estimate << " (se " << p.se << ")\n";
    if (std::isfinite(slope))
        os << "  slope: " << slope << " +/- " << 2.0 * slope_se << "\n";
    for (const auto& c : checks) {
        os << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": value=" << c.value
           << " threshold=" << c.threshold;
        if (!c.note.empty()) os << " (" << c.note << ")";
        os << "\n";
    }
    os << (pass() ? "  => PASS\n" : "  => FAIL\n");
    return os.str();
}

}  // namespace nullrec
