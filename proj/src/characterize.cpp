#include "kummer/characterize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "kummer/errors.hpp"
#include "kummer/stats.hpp"

namespace kummer::characterize {

namespace {

void require_free_constant(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("recover: c must be a positive real");
}

RecoveredPair make_pair(double a, double b, double c, double shape, double rate) {
    // route through the validating factories so impossible parameters throw
    const auto x = dist::DistributionSpec::kummer(a, b, c);
    const auto y = dist::DistributionSpec::gamma(shape, rate);
    return {x.kummer_params(), y.gamma_params()};
}

double mean_of(std::span<const double> xs) {
    double acc = 0.0;
    for (double v : xs) acc += v;
    return acc / static_cast<double>(xs.size());
}

}  // namespace

RecoveredPair recover_hv_regression(const RegressionConstants& k) {
    require_free_constant(k.c);
    const double ab = k.alpha * k.beta;
    if (!(ab > 1.0)) throw ConstraintError("hv regression recovery requires alpha*beta > 1");
    const double a = ab / (ab - 1.0);
    const double rate = k.beta / (ab - 1.0);
    return make_pair(a, k.c - a, rate, k.c, rate);
}

RecoveredPair recover_hv_ratio(const RatioConstants& k) {
    require_free_constant(k.c);
    if (!(k.alpha_r1 > k.alpha_r))
        throw ConstraintError("hv ratio recovery requires alpha_{r+1} > alpha_r");
    const double ap = k.alpha_r1 / (k.alpha_r1 - k.alpha_r);
    if (!(ap > k.r))
        throw ConstraintError(
            "hv ratio recovery requires alpha_{r+1}/(alpha_{r+1}-alpha_r) > r");
    const double rate = 1.0 / (k.alpha_r1 - k.alpha_r);
    return make_pair(ap - k.r, k.c - (ap - k.r), rate, k.c, rate);
}

RecoveredPair recover_hv_cor23(double a, double b, double c) {
    if (!(a > 0.0)) throw ConstraintError("hv first-moment constant must be positive");
    return recover_hv_ratio({1.0, a, b / a, c});
}

RecoveredPair recover_hv_cor24(double a, double b, double c) {
    if (!(a > 0.0) || !(b > 0.0))
        throw ConstraintError("hv inverse-moment constants must be positive");
    return recover_hv_ratio({-1.0, a / b, 1.0 / a, c});
}

RecoveredPair recover_kv_regression(const RegressionConstants& k) {
    require_free_constant(k.c);
    if (!(k.alpha > 0.0 && k.alpha < 1.0 && k.beta > 1.0))
        throw ConstraintError("kv regression recovery requires 0 < alpha < 1 < beta");
    const double ab = k.alpha * k.beta;
    const double a = 1.0 + (1.0 - k.alpha) / ab;
    const double b = (1.0 - k.alpha) * (k.beta - 1.0) / ab;
    return make_pair(a, b, k.c, b, k.c);
}

RecoveredPair recover_kv_ratio(const RatioConstants& k) {
    require_free_constant(k.c);
    if (!(k.alpha_r > 0.0 && k.alpha_r < 1.0 && k.alpha_r1 > 0.0 && k.alpha_r1 < 1.0))
        throw ConstraintError("kv ratio recovery requires alpha_r, alpha_{r+1} in (0,1)");
    const double lead = k.alpha_r * (1.0 - k.alpha_r1) / k.alpha_r1;
    if (!(lead > k.r - 1.0))
        throw ConstraintError(
            "kv ratio recovery requires alpha_r(1-alpha_{r+1})/alpha_{r+1} > r-1");
    const double a = lead - k.r + 1.0;
    const double b = (1.0 - k.alpha_r) * (1.0 - k.alpha_r1) / k.alpha_r1;
    return make_pair(a, b, k.c, b, k.c);
}

RecoveredPair recover_kv_cor33(double a, double b, double c) {
    if (!(a > 0.0)) throw ConstraintError("kv first-moment constant must be positive");
    return recover_kv_ratio({1.0, a, b / a, c});
}

RecoveredPair recover_kv_cor34(double a, double b, double c) {
    if (!(a > 0.0) || !(b > 0.0))
        throw ConstraintError("kv inverse-moment constants must be positive");
    return recover_kv_ratio({-1.0, a / b, 1.0 / a, c});
}

KvConsistency kv_regression_consistency(const RegressionConstants& k) {
    const auto rec = recover_kv_regression(k);
    KvConsistency out;
    out.alpha_given = k.alpha;
    out.implied_u_mean = rec.x.a / (rec.x.a + rec.x.b);
    out.discrepancy = std::abs(out.implied_u_mean - k.alpha);
    const double d = k.alpha * k.beta - 1.0;
    out.beta_consistent_a = d != 0.0 ? k.alpha * (k.beta - 1.0) / d
                                     : std::numeric_limits<double>::quiet_NaN();
    out.beta_consistent_b = d != 0.0 ? (1.0 - k.alpha) * (k.beta - 1.0) / d
                                     : std::numeric_limits<double>::quiet_NaN();
    return out;
}

KvCorollaryDiagnostic kv_cor33_diagnostic(double a, double b, double c) {
    if (!(b > 0.0 && a > b && a < 1.0))
        throw ConstraintError("kv cor33 diagnostic requires 0 < b < a < 1");
    KvCorollaryDiagnostic d;
    d.printed = {a * (a - b) / b, (1.0 - a) * (b - a) / b, c};
    const auto rec = recover_kv_cor33(a, b, c);
    d.route = rec.x;
    d.max_abs_diff = std::max({std::abs(d.printed.a - d.route.a),
                               std::abs(d.printed.b - d.route.b),
                               std::abs(d.printed.c - d.route.c)});
    return d;
}

KvCorollaryDiagnostic kv_cor34_diagnostic(double a, double b, double c) {
    if (!(a > 1.0 && b > a)) throw ConstraintError("kv cor34 diagnostic requires 1 < a < b");
    KvCorollaryDiagnostic d;
    d.printed = {a * (a - 1.0) / b, (a - 1.0) * (b - a) / b, c};
    const auto rec = recover_kv_cor34(a, b, c);
    d.route = rec.x;
    d.max_abs_diff = std::max({std::abs(d.printed.a - d.route.a),
                               std::abs(d.printed.b - d.route.b),
                               std::abs(d.printed.c - d.route.c)});
    return d;
}

dist::DistributionSpec tilt_params(const dist::DistributionSpec& spec, const TiltSpec& tilt) {
    using dist::DistributionSpec;
    using dist::Family;
    const double r = tilt.parameter;
    switch (tilt.kind) {
        case TiltKind::power:
            if (spec.family() == Family::kummer) {
                const auto p = spec.kummer_params();
                if (!(p.a + r > 0.0))
                    throw MomentDomainError("power tilt needs a + r > 0");
                return DistributionSpec::kummer(p.a + r, p.b - r, p.c);
            }
            if (spec.family() == Family::gamma) {
                const auto p = spec.gamma_params();
                if (!(p.shape + r > 0.0))
                    throw MomentDomainError("power tilt needs shape + r > 0");
                return DistributionSpec::gamma(p.shape + r, p.rate);
            }
            throw DomainError("power tilt is defined for kummer and gamma laws only");
        case TiltKind::ratio:
            if (spec.family() == Family::kummer) {
                const auto p = spec.kummer_params();
                if (!(p.a + r > 0.0))
                    throw MomentDomainError("ratio tilt needs a + r > 0");
                return DistributionSpec::kummer(p.a + r, p.b, p.c);
            }
            throw DomainError("ratio tilt is defined for kummer laws only");
        case TiltKind::exponential:
            if (!(r < 0.0)) throw ConstraintError("exponential tilt needs eta < 0");
            if (spec.family() == Family::kummer) {
                const auto p = spec.kummer_params();
                return DistributionSpec::kummer(p.a, p.b, p.c - r);
            }
            if (spec.family() == Family::gamma) {
                const auto p = spec.gamma_params();
                return DistributionSpec::gamma(p.shape, p.rate - r);
            }
            throw DomainError("exponential tilt is defined for kummer and gamma laws only");
    }
    throw DomainError("unknown tilt kind");
}

CharacterizeResult characterize_from_samples(std::span<const maps::PositivePair> pairs,
                                             PairFamily family, std::uint64_t seed,
                                             double alpha, int n_perm) {
    if (pairs.size() < 1000)
        throw InputError("characterize_from_samples needs at least 1000 pairs");
    const std::size_t n = pairs.size();
    std::vector<double> x(n), y(n), u(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = pairs[i].first;
        y[i] = pairs[i].second;
    }
    const bool hv = family == PairFamily::hv;
    if (hv)
        maps::hv_forward_batch(x, y, u, v);
    else
        maps::kv_forward_batch(x, y, u, v);

    CharacterizeResult out;
    out.report.suite = hv ? "characterize_hv" : "characterize_kv";
    out.report.seed = seed;
    out.report.n = n;

    const auto ind = stats::independence_test(u, v, n_perm, seed, alpha);
    out.report.add_test("independence_uv", ind, alpha);
    constexpr int kBins = 16;
    if (hv) {
        out.report.add_test("regression_v_pow_1",
                            stats::regression_constancy_test(u, v, 1.0, kBins, alpha), alpha);
        out.report.add_test("regression_v_pow_-1",
                            stats::regression_constancy_test(u, v, -1.0, kBins, alpha), alpha);
    } else {
        out.report.add_test("regression_u_pow_1",
                            stats::regression_constancy_test(v, u, 1.0, kBins, alpha), alpha);
        out.report.add_test("regression_u_pow_2",
                            stats::regression_constancy_test(v, u, 2.0, kBins, alpha), alpha);
    }

    if (!ind.pass) {
        out.report.add_info("fit_skipped_dependence", 1.0);
        return out;
    }

    try {
        if (hv) {
            const double a_hat = mean_of(v);
            std::vector<double> inv(v.size());
            std::transform(v.begin(), v.end(), inv.begin(),
                           [](double t) { return 1.0 / t; });
            const double b_hat = mean_of(inv);
            const double ab = a_hat * b_hat;
            const double rate_hat = b_hat / (ab - 1.0);
            const double c_hat = rate_hat * mean_of(y);
            const auto rec = recover_hv_regression({a_hat, b_hat, c_hat});
            out.x_law = dist::DistributionSpec::kummer(rec.x.a, rec.x.b, rec.x.c);
            out.y_law = dist::DistributionSpec::gamma(rec.y.shape, rec.y.rate);
        } else {
            const double m1 = mean_of(u);
            std::vector<double> sq(u.size());
            std::transform(u.begin(), u.end(), sq.begin(), [](double t) { return t * t; });
            const double m2 = mean_of(sq);
            const double c_placeholder = 1.0;
            const auto shape_only = recover_kv_cor33(m1, m2, c_placeholder);
            const double c_hat = shape_only.y.shape / mean_of(y);
            const auto rec = recover_kv_cor33(m1, m2, c_hat);
            out.x_law = dist::DistributionSpec::kummer(rec.x.a, rec.x.b, rec.x.c);
            out.y_law = dist::DistributionSpec::gamma(rec.y.shape, rec.y.rate);
            // printed-formula caveat: the route is mean-consistent by
            // construction, so the gap shows in the second beta moment
            const double s = rec.x.a + rec.x.b;
            const double implied_m2 = rec.x.a * (rec.x.a + 1.0) / (s * (s + 1.0));
            out.report.add_info("kv_implied_u_m2_gap", std::abs(implied_m2 - m2));
            const double den = m2 - m1 * m1;
            if (den > 0.0) {
                out.report.add_info("kv_beta_mom_a", m1 * (m1 - m2) / den);
                out.report.add_info("kv_beta_mom_b", (1.0 - m1) * (m1 - m2) / den);
            }
        }
    } catch (const DomainError&) {
        out.report.add_info("fit_skipped_constraint", 1.0);
        return out;
    }

    out.fitted = true;
    out.report.add_test("ks_x_vs_fit", stats::ks_test(x, *out.x_law, alpha), alpha);
    out.report.add_test("ks_y_vs_fit", stats::ks_test(y, *out.y_law, alpha), alpha);
    return out;
}

}  // namespace kummer::characterize
