#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kummer/stats.hpp"

namespace kummer::report {

// one line of a suite report; tolerance checks carry no p-value
struct Check {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    std::optional<double> p_value;
    bool pass = false;
};

// overall pass is the conjunction of every check; exploratory rows use an
// "info_" name prefix and are emitted with pass=true so they never gate
struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::uint64_t n = 0;
    std::vector<Check> checks;

    bool pass() const;

    // |statistic| <= threshold
    void add_tolerance(const std::string& name, double statistic, double threshold);
    // p-value style: pass iff p > threshold (threshold = significance)
    void add_test(const std::string& name, const stats::TestResult& r, double alpha);
    // exploratory row, never gating
    void add_info(const std::string& name, double statistic, double threshold = 0.0);

    nlohmann::ordered_json to_json() const;
    std::string to_json_string() const;  // the byte-stable serialized form
};

}  // namespace kummer::report
