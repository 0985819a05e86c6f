#include "kummer/report.hpp"

#include <cmath>

namespace kummer::report {

bool SuiteReport::pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

void SuiteReport::add_tolerance(const std::string& name, double statistic, double threshold) {
    checks.push_back({name, statistic, threshold, std::nullopt,
                      std::isfinite(statistic) && std::abs(statistic) <= threshold});
}

void SuiteReport::add_test(const std::string& name, const stats::TestResult& r, double alpha) {
    checks.push_back({name, r.statistic, alpha, r.p_value, r.pass});
}

void SuiteReport::add_info(const std::string& name, double statistic, double threshold) {
    checks.push_back({"info_" + name, statistic, threshold, std::nullopt, true});
}

nlohmann::ordered_json SuiteReport::to_json() const {
    nlohmann::ordered_json j;
    j["suite"] = suite;
    j["seed"] = seed;
    j["n"] = n;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json jc;
        jc["name"] = c.name;
        jc["statistic"] = c.statistic;
        jc["threshold"] = c.threshold;
        if (c.p_value)
            jc["p_value"] = *c.p_value;
        else
            jc["p_value"] = nullptr;
        jc["pass"] = c.pass;
        j["checks"].push_back(jc);
    }
    j["pass"] = pass();
    return j;
}

std::string SuiteReport::to_json_string() const { return to_json().dump(2) + "\n"; }

}  // namespace kummer::report
