#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "kummer/distributions.hpp"

namespace kummer::stats {

inline constexpr double kDefaultAlpha = 0.001;

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
    std::string method;
    bool pass = false;  // p_value > alpha
};

// one-sample Kolmogorov-Smirnov with the asymptotic p-value (Kolmogorov
// series on the Stephens-corrected statistic); n >= 100
TestResult ks_test(std::span<const double> values, const std::function<double(double)>& cdf,
                   double alpha = kDefaultAlpha);

// same test with the cdf evaluated through the batched incremental path —
// the form the large-sample suites use
TestResult ks_test(std::span<const double> values, const dist::DistributionSpec& spec,
                   double alpha = kDefaultAlpha);

// distance correlation on a deterministic subsample of min(n, 2000) points
// with a permutation p-value, plus a chi-square test on a 10x10
// quantile-binned table over the full sample; reported p is the smaller of
// the two, Bonferroni-doubled
TestResult independence_test(std::span<const double> u, std::span<const double> v,
                             int n_perm, std::uint64_t seed, double alpha = kDefaultAlpha);

// quantile-bins u, compares per-bin means of v^exponent against the pooled
// mean; statistic is the largest standardized bin deviation, p-value normal
// with Bonferroni over bins
TestResult regression_constancy_test(std::span<const double> u, std::span<const double> v,
                                     double exponent, int bins,
                                     double alpha = kDefaultAlpha);

// same scheme for the ratio form: per-bin mean(v^s)/mean(v^{s-1}) against the
// pooled ratio, delta-method standardization
TestResult regression_ratio_constancy_test(std::span<const double> u,
                                           std::span<const double> v, double s, int bins,
                                           double alpha = kDefaultAlpha);

}  // namespace kummer::stats
