#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "kummer/distributions.hpp"
#include "kummer/report.hpp"
#include "kummer/transforms.hpp"

namespace kummer::characterize {

// E(V|U) = alpha, E(V^{-1}|U) = beta (HV use, alpha*beta > 1) or
// E(U|V) = alpha, E(U^{-1}|V) = beta (KV use, 0 < alpha < 1 < beta);
// c is the free constant left undetermined by the conditional moments.
struct RegressionConstants {
    double alpha = 0.0;
    double beta = 0.0;
    double c = 0.0;
};

// successive conditional-moment ratio constants: E(V^r|U) = alpha_r E(V^{r-1}|U)
// and E(V^{r+1}|U) = alpha_r1 E(V^r|U) (HV use) or the U-powered KV analogue;
// same free constant c.
struct RatioConstants {
    double r = 0.0;
    double alpha_r = 0.0;
    double alpha_r1 = 0.0;
    double c = 0.0;
};

enum class TiltKind { power, ratio, exponential };

struct TiltSpec {
    TiltKind kind = TiltKind::power;
    double parameter = 0.0;  // r for power/ratio, eta < 0 for exponential
};

struct RecoveredPair {
    dist::KummerParams x;
    dist::GammaParams y;
};

RecoveredPair recover_hv_regression(const RegressionConstants& k);
RecoveredPair recover_hv_ratio(const RatioConstants& k);
// convenience substitutions of the ratio map: r = 1 with (a, b/a) and
// r = -1 with (a/b, 1/a)
RecoveredPair recover_hv_cor23(double a, double b, double c);
RecoveredPair recover_hv_cor24(double a, double b, double c);

RecoveredPair recover_kv_regression(const RegressionConstants& k);
RecoveredPair recover_kv_ratio(const RatioConstants& k);
RecoveredPair recover_kv_cor33(double a, double b, double c);
RecoveredPair recover_kv_cor34(double a, double b, double c);

// The KV maps are implemented verbatim even though their output disagrees
// with beta-moment algebra; these diagnostics quantify the gap instead of
// silently correcting it.
struct KvConsistency {
    double alpha_given = 0.0;        // the alpha fed to the map
    double implied_u_mean = 0.0;     // a/(a+b) of the recovered Kummer pair
    double discrepancy = 0.0;        // |implied_u_mean - alpha_given|
    double beta_consistent_a = 0.0;  // alpha(beta-1)/(alpha beta-1)
    double beta_consistent_b = 0.0;  // (1-alpha)(beta-1)/(alpha beta-1)
};
KvConsistency kv_regression_consistency(const RegressionConstants& k);

// corollary display evaluated verbatim next to the general-map substitution
struct KvCorollaryDiagnostic {
    dist::KummerParams printed;
    dist::KummerParams route;
    double max_abs_diff = 0.0;
};
KvCorollaryDiagnostic kv_cor33_diagnostic(double a, double b, double c);
KvCorollaryDiagnostic kv_cor34_diagnostic(double a, double b, double c);

// density reweighting by x^r, (x/(1+x))^r, or e^{eta x}
dist::DistributionSpec tilt_params(const dist::DistributionSpec& spec, const TiltSpec& tilt);

using PairFamily = maps::PairFamily;

struct CharacterizeResult {
    report::SuiteReport report;
    bool fitted = false;
    std::optional<dist::DistributionSpec> x_law;
    std::optional<dist::DistributionSpec> y_law;
};

// full pipeline: transform pairs, test independence and regression
// constancy of (U,V), estimate the moment constants, apply the matching
// recovery map, and KS-test the inputs against the fitted laws
CharacterizeResult characterize_from_samples(std::span<const maps::PositivePair> pairs,
                                             PairFamily family, std::uint64_t seed,
                                             double alpha = 0.001, int n_perm = 999);

}  // namespace kummer::characterize
