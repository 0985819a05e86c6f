#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kummer/distributions.hpp"
#include "kummer/report.hpp"
#include "kummer/transforms.hpp"
#include "kummer/trees.hpp"

namespace kummer::verify {

using report::SuiteReport;

// fixed seeds for the null-calibration runs: every suite must pass at all of
// them with correct inputs
inline constexpr std::array<std::uint64_t, 20> kCalibrationSeeds{
    1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 15, 16, 17, 18, 19, 20, 21, 22};

struct PropertyOptions {
    std::optional<dist::DistributionSpec> y_override;  // power runs plug in a wrong law
    int n_perm = 999;
    double alpha = 0.001;
};

// samples (X,Y), applies the family map, and tests the claimed joint law of
// (U,V): independence, marginal KS, conservation (HV), regression constancy
SuiteReport run_property_suite(maps::PairFamily family, double a, double b, double c,
                               std::size_t n, std::uint64_t seed,
                               const PropertyOptions& opt = {});

// survival-moment recurrences for X ~ Kummer(A, c_param-A, p),
// Y ~ Gamma(c_param, p): quadrature vs closed form vs Monte Carlo
SuiteReport check_moment_recurrences(double A, double c_param, double p, int k_max,
                                     std::size_t n, std::uint64_t seed);

// F(z) = sum_{k>=1} z^k E(1+X)^{-k}, truncated once the geometric tail bound
// drops below tol; |z| < 1 required
double genfn_series(const dist::DistributionSpec& x_law, double z, double tol = 1e-12);
// the same function as E[z/(1+X-z)] by quadrature
double genfn_integral(const dist::DistributionSpec& x_law, double z);

// series-vs-integral agreement on the grid, plus the exploratory residual
// table for the first-order ODE candidates (info rows, never gating)
SuiteReport check_generating_function(double A, double c_param, double p,
                                      std::span<const double> z_grid);

struct KoudouGrid {
    std::vector<std::array<double, 3>> points;  // (alpha, beta, sigma), sigma <= 0
    std::vector<double> s_values;               // survival-ratio identity, s > 1
};
KoudouGrid default_koudou_grid();

// weighted-moment factorization over the matched quadruple X ~ Kummer(a,b,c),
// Y ~ Gamma(a+b,c), U ~ Kummer(a+b,-b,c), V ~ Gamma(a,c), each side by
// closed form and by Monte Carlo; plus the h(s) = E(1+X)^{-s} identity
SuiteReport check_koudou_identities(double a, double b, double c, const KoudouGrid& grid,
                                    std::size_t n, std::uint64_t seed);

// joint sample at one reference leaf, then for every other leaf: pairwise
// independence of the pushed-forward components and KS against the
// corollary marginals
SuiteReport run_tree_suite(const trees::TreeSpec& tree, std::span<const double> a, double c,
                           std::size_t n, std::uint64_t seed, std::uint32_t n_perm = 999);

}  // namespace kummer::verify
