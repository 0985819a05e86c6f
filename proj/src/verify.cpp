#include "kummer/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "kummer/errors.hpp"
#include "kummer/quadrature.hpp"
#include "kummer/rng.hpp"
#include "kummer/stats.hpp"

namespace kummer::verify {

namespace {

// decouples the seeds handed to statistical tests from the sampling streams
std::uint64_t subseed(std::uint64_t seed, std::uint64_t tag) {
    return rng::Stream(seed, 0x5EED, tag).next_u64();
}

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// E[x^al (1+x)^{-be} e^{sg x}] by direct quadrature against the density
double quad_weighted_mean(const dist::DistributionSpec& spec, double al, double be,
                          double sg) {
    const auto f = [&](double x) {
        if (!(x > 0.0)) return 0.0;
        return std::exp(dist::log_pdf(spec, x) + al * std::log(x) - be * std::log1p(x) +
                        sg * x);
    };
    double hi = 1.0;
    if (spec.bounded_support()) {
        hi = 1.0;
    } else {
        while (hi < 0x1p60 && f(hi) * hi > 1e-18) hi *= 2.0;
    }
    std::vector<double> knots{0.0};
    for (int j = 40; j >= 0; --j) knots.push_back(hi * std::ldexp(1.0, -j));
    return quad::integrate(f, knots, {});
}

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
};

MeanSE mc_weighted_mean(std::span<const double> xs, double al, double be, double sg) {
    double acc = 0.0, acc2 = 0.0;
    for (double x : xs) {
        const double w = std::exp(al * std::log(x) - be * std::log1p(x) + sg * x);
        acc += w;
        acc2 += w * w;
    }
    const double n = static_cast<double>(xs.size());
    const double mean = acc / n;
    const double var = std::max(0.0, acc2 / n - mean * mean);
    return {mean, std::sqrt(var / n)};
}

MeanSE mc_mean(std::span<const double> xs) { return mc_weighted_mean(xs, 1.0, 0.0, 0.0); }

// a degenerate weight (constant across draws) gives se = 0; the floor keeps
// the comparison meaningful at roundoff scale for the O(1) quantities here
double z_score(double diff, double se) { return diff / std::max(se, 1e-12); }

}  // namespace

SuiteReport run_property_suite(maps::PairFamily family, double a, double b, double c,
                               std::size_t n, std::uint64_t seed,
                               const PropertyOptions& opt) {
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0))
        throw DomainError("property suite needs a, b, c > 0");
    if (n < 1000) throw InputError("property suite needs n >= 1000");
    const bool hv = family == maps::PairFamily::hv;
    const auto x_law = hv ? dist::DistributionSpec::kummer(a, b - a, c)
                          : dist::DistributionSpec::kummer(a, b, c);
    const auto y_law = opt.y_override.value_or(dist::DistributionSpec::gamma(b, c));

    const auto xs = dist::sample(x_law, n, seed, 1);
    const auto ys = dist::sample(y_law, n, seed, 2);
    std::vector<double> u(n), v(n);
    if (hv)
        maps::hv_forward_batch(xs.values, ys.values, u, v);
    else
        maps::kv_forward_batch(xs.values, ys.values, u, v);

    SuiteReport rep;
    rep.suite = hv ? "verify_hv" : "verify_kv";
    rep.seed = seed;
    rep.n = n;
    rep.add_test("independence_uv",
                 stats::independence_test(u, v, opt.n_perm, subseed(seed, 1), opt.alpha),
                 opt.alpha);
    constexpr int kBins = 16;
    if (hv) {
        rep.add_test("ks_u_kummer",
                     stats::ks_test(u, dist::DistributionSpec::kummer(b, a - b, c), opt.alpha),
                     opt.alpha);
        rep.add_test("ks_v_gamma",
                     stats::ks_test(v, dist::DistributionSpec::gamma(a, c), opt.alpha),
                     opt.alpha);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double lhs = u[i] + v[i], rhs = xs.values[i] + ys.values[i];
            worst = std::max(worst, std::abs(lhs - rhs) / rhs);
        }
        rep.add_tolerance("uv_conserves_xy", worst, 1e-12);
        rep.add_test("regression_v_pow_1",
                     stats::regression_constancy_test(u, v, 1.0, kBins, opt.alpha), opt.alpha);
        rep.add_test("regression_v_pow_-1",
                     stats::regression_constancy_test(u, v, -1.0, kBins, opt.alpha),
                     opt.alpha);
    } else {
        rep.add_test("ks_u_beta",
                     stats::ks_test(u, dist::DistributionSpec::beta(a, b), opt.alpha),
                     opt.alpha);
        rep.add_test("ks_v_kummer",
                     stats::ks_test(v, dist::DistributionSpec::kummer(a + b, -b, c), opt.alpha),
                     opt.alpha);
        const auto um = mc_mean(u);
        rep.add_tolerance("u_mean_beta_z", z_score(um.mean - a / (a + b), um.se), 3.0);
        rep.add_test("regression_u_pow_1",
                     stats::regression_constancy_test(v, u, 1.0, kBins, opt.alpha), opt.alpha);
        rep.add_test("regression_u_pow_2",
                     stats::regression_constancy_test(v, u, 2.0, kBins, opt.alpha), opt.alpha);
    }
    return rep;
}

SuiteReport check_moment_recurrences(double A, double c_param, double p, int k_max,
                                     std::size_t n, std::uint64_t seed) {
    if (k_max < 1 || k_max > 30) throw DomainError("k_max must lie in [1, 30]");
    const auto x_law = dist::DistributionSpec::kummer(A, c_param - A, p);
    const auto y_law = dist::DistributionSpec::gamma(c_param, p);
    const double alpha_const = A / p;

    SuiteReport rep;
    rep.suite = "verify_recurrences";
    rep.seed = seed;
    rep.n = n;

    std::vector<double> gq(static_cast<std::size_t>(k_max) + 2);
    for (int k = 0; k <= k_max + 1; ++k)
        gq[k] = quad_weighted_mean(x_law, 0.0, static_cast<double>(k), 0.0);
    rep.add_tolerance("g0_equals_1", gq[0] - 1.0, 1e-8);
    for (int k = 1; k <= k_max + 1; ++k) {
        const double gc = dist::survival_power_moment(x_law, k);
        rep.add_tolerance("g_closed_vs_quad_k" + std::to_string(k), (gq[k] - gc) / gc, 1e-8);
    }
    for (int k = 1; k <= k_max; ++k) {
        const double h_k = (k + c_param) / p;
        const double w1 =
            (gq[k - 1] - gq[k]) - (alpha_const * gq[k] + h_k * gq[k + 1] - gq[k] * h_k);
        rep.add_tolerance("wazne1_k" + std::to_string(k), w1, 1e-8);
        const double w3 =
            p * gq[k - 1] + gq[k] * (k + c_param - (p + A)) - gq[k + 1] * (k + c_param);
        rep.add_tolerance("wazne3_k" + std::to_string(k), w3, 1e-8);
    }

    const auto xs = dist::sample(x_law, n, seed, 1);
    const auto ys = dist::sample(y_law, n, seed, 2);
    for (int k = 1; k <= std::min(5, k_max); ++k) {
        const auto g = mc_weighted_mean(xs.values, 0.0, static_cast<double>(k), 0.0);
        rep.add_tolerance("g_mc_z_k" + std::to_string(k), z_score(g.mean - gq[k], g.se), 4.0);
    }
    for (int k = 0; k <= std::min(5, k_max); ++k) {
        // h_k = E Y^{k+1} / E Y^k with a delta-method standard error
        double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0, cross = 0.0;
        for (double y : ys.values) {
            const double yk = std::pow(y, k), yk1 = yk * y;
            a1 += yk1;
            a2 += yk1 * yk1;
            b1 += yk;
            b2 += yk * yk;
            cross += yk1 * yk;
        }
        const double m = static_cast<double>(n);
        a1 /= m;
        a2 /= m;
        b1 /= m;
        b2 /= m;
        cross /= m;
        const double ratio = a1 / b1;
        const double var_a = a2 - a1 * a1, var_b = b2 - b1 * b1, cov = cross - a1 * b1;
        const double se =
            std::sqrt(std::max(0.0, var_a - 2.0 * ratio * cov + ratio * ratio * var_b) / m) /
            b1;
        const double h_k = (k + c_param) / p;
        rep.add_tolerance("h_mc_z_k" + std::to_string(k), z_score(ratio - h_k, se), 4.0);
    }
    return rep;
}

double genfn_series(const dist::DistributionSpec& x_law, double z, double tol) {
    if (!(std::abs(z) < 1.0)) throw DomainError("genfn series needs |z| < 1");
    if (z == 0.0) return 0.0;
    const double az = std::abs(z);
    double sum = 0.0, zk = 1.0;
    for (int k = 1; k <= 50000; ++k) {
        const double g = dist::survival_power_moment(x_law, k);
        zk *= z;
        sum += zk * g;
        // g_k decreases in k, so the remaining tail is geometric
        if (g * std::pow(az, k + 1) / (1.0 - az) < tol) return sum;
    }
    throw SeriesTruncationError("genfn series tail still above tolerance at 50000 terms");
}

double genfn_integral(const dist::DistributionSpec& x_law, double z) {
    if (!(std::abs(z) < 1.0)) throw DomainError("genfn integral needs |z| < 1");
    const auto f = [&](double x) {
        if (!(x > 0.0)) return 0.0;
        return std::exp(dist::log_pdf(x_law, x)) * z / (1.0 + x - z);
    };
    double hi = 1.0;
    while (hi < 0x1p60 && std::abs(f(hi)) * hi > 1e-18) hi *= 2.0;
    std::vector<double> knots{0.0};
    for (int j = 40; j >= 0; --j) knots.push_back(hi * std::ldexp(1.0, -j));
    return quad::integrate(f, knots, {});
}

SuiteReport check_generating_function(double A, double c_param, double p,
                                      std::span<const double> z_grid) {
    const auto x_law = dist::DistributionSpec::kummer(A, c_param - A, p);
    for (double z : z_grid)
        if (!(std::abs(z) < 0.9) || z == 0.0)
            throw DomainError("genfn grid must lie in (-0.9, 0.9) without 0");

    SuiteReport rep;
    rep.suite = "verify_genfn";
    rep.seed = 0;
    rep.n = 0;

    const double g1 = dist::survival_power_moment(x_law, 1);
    constexpr double kH = 1e-5;
    const double d_candidates[2] = {c_param - A, c_param - A - p};
    const char* d_names[2] = {"d_cA", "d_cAp"};
    double max_resid[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

    for (double z : z_grid) {
        const double s_mid = genfn_series(x_law, z);
        const double s_hi = genfn_series(x_law, z + kH, 1e-13);
        const double s_lo = genfn_series(x_law, z - kH, 1e-13);
        const double integral = genfn_integral(x_law, z);
        rep.add_tolerance("series_vs_integral_z" + fmt_g(z), s_mid - integral, 1e-8);

        const double fp = (s_hi - s_lo) / (2.0 * kH);
        for (int di = 0; di < 2; ++di)
            for (int norm = 0; norm < 2; ++norm) {
                const double f0 = s_mid + (norm == 1 ? 1.0 : 0.0);
                const double resid =
                    fp * z * (1.0 - z) -
                    (f0 * (p * z * z + d_candidates[di] * z + 1.0 - c_param) +
                     c_param * z * g1 + p * z * z);
                max_resid[di][norm] = std::max(max_resid[di][norm], std::abs(resid));
            }
    }
    for (int di = 0; di < 2; ++di)
        for (int norm = 0; norm < 2; ++norm)
            rep.add_info(std::string("ode_max_resid_") + d_names[di] +
                             (norm == 1 ? "_1pF" : "_F"),
                         max_resid[di][norm], 1e-6);
    return rep;
}

KoudouGrid default_koudou_grid() {
    KoudouGrid g;
    for (double al : {0.0, 1.0, 2.0})
        for (double be : {-1.0, 0.0, 1.5})
            for (double sg : {0.0, -0.5, -2.0}) g.points.push_back({al, be, sg});
    g.s_values = {1.5, 2.0, 3.0};
    return g;
}

SuiteReport check_koudou_identities(double a, double b, double c, const KoudouGrid& grid,
                                    std::size_t n, std::uint64_t seed) {
    const auto x_law = dist::DistributionSpec::kummer(a, b, c);
    const auto y_law = dist::DistributionSpec::gamma(a + b, c);
    const auto u_law = dist::DistributionSpec::kummer(a + b, -b, c);
    const auto v_law = dist::DistributionSpec::gamma(a, c);
    for (const auto& pt : grid.points)
        if (pt[2] > 0.0) throw DomainError("koudou grid needs sigma <= 0");
    if (!grid.s_values.empty() && !(a > 1.0))
        throw MomentDomainError("survival-ratio identity needs a > 1");
    for (double s : grid.s_values)
        if (!(s > 1.0)) throw MomentDomainError("survival-ratio identity needs s > 1");

    SuiteReport rep;
    rep.suite = "verify_koudou";
    rep.seed = seed;
    rep.n = n;

    std::vector<double> q_x(grid.points.size()), q_y(grid.points.size()),
        q_u(grid.points.size()), q_v(grid.points.size());
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const auto [al, be, sg] = grid.points[i];
        q_x[i] = dist::log_weighted_moment(x_law, al, be, sg);
        q_y[i] = dist::log_weighted_moment(y_law, be, 0.0, sg);
        q_u[i] = dist::log_weighted_moment(u_law, be, al, sg);
        q_v[i] = dist::log_weighted_moment(v_law, al, 0.0, sg);
        const std::string tag =
            "(" + fmt_g(al) + "," + fmt_g(be) + "," + fmt_g(sg) + ")";
        rep.add_tolerance("factorization" + tag,
                          std::expm1((q_x[i] + q_y[i]) - (q_u[i] + q_v[i])), 1e-6);
    }

    if (n > 0 && !grid.points.empty()) {
        const auto xs = dist::sample(x_law, n, seed, 1);
        const auto ys = dist::sample(y_law, n, seed, 2);
        const auto us = dist::sample(u_law, n, seed, 3);
        const auto vs = dist::sample(v_law, n, seed, 4);
        std::vector<std::size_t> picks{0, grid.points.size() / 3,
                                       (2 * grid.points.size()) / 3,
                                       grid.points.size() - 1};
        picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
        for (std::size_t i : picks) {
            const auto [al, be, sg] = grid.points[i];
            const std::string tag =
                "(" + fmt_g(al) + "," + fmt_g(be) + "," + fmt_g(sg) + ")";
            const auto mx = mc_weighted_mean(xs.values, al, be, sg);
            const auto my = mc_weighted_mean(ys.values, be, 0.0, sg);
            const auto mu = mc_weighted_mean(us.values, be, al, sg);
            const auto mv = mc_weighted_mean(vs.values, al, 0.0, sg);
            rep.add_tolerance("mc_x" + tag, z_score(mx.mean - std::exp(q_x[i]), mx.se), 4.0);
            rep.add_tolerance("mc_y" + tag, z_score(my.mean - std::exp(q_y[i]), my.se), 4.0);
            rep.add_tolerance("mc_u" + tag, z_score(mu.mean - std::exp(q_u[i]), mu.se), 4.0);
            rep.add_tolerance("mc_v" + tag, z_score(mv.mean - std::exp(q_v[i]), mv.se), 4.0);
        }

        for (double s : grid.s_values) {
            const double al_c = a / c;          // E V for V ~ Gamma(a, c)
            const double be_c = c / (a - 1.0);  // E V^{-1}
            const auto h = [&](double t) {
                return std::exp(dist::log_weighted_moment(x_law, 0.0, t, 0.0));
            };
            const double h_lo = h(s - 1.0), h_mid = h(s), h_hi = h(s + 1.0);
            const double m_inv = std::exp(dist::log_weighted_moment(x_law, -1.0, s, 0.0));
            const double resid = be_c * h_hi * (h_lo - al_c * h_mid) -
                                 be_c * h_mid * h_mid + m_inv * (h_mid - h_hi);
            rep.add_tolerance("remark_s" + fmt_g(s), resid / (be_c * h_mid * h_mid), 1e-6);
            const auto mh = mc_weighted_mean(xs.values, 0.0, s, 0.0);
            rep.add_tolerance("mc_remark_h_s" + fmt_g(s), z_score(mh.mean - h_mid, mh.se), 4.0);
        }
    }
    return rep;
}

SuiteReport run_tree_suite(const trees::TreeSpec& tree, std::span<const double> a, double c,
                           std::size_t n, std::uint64_t seed, std::uint32_t n_perm) {
    if (tree.size() > 10) throw DomainError("tree suite caps at 10 nodes");
    if (n < 1000) throw InputError("tree suite needs n >= 1000");
    const auto leaves = tree.leaves();
    const int ref = leaves.front();
    const auto joint = trees::tree_joint_sample(tree, ref, a, c, n, seed);
    const std::size_t p = tree.size();

    SuiteReport rep;
    rep.suite = "verify_tree";
    rep.seed = seed;
    rep.n = n;

    std::vector<double> col(p);
    std::vector<std::vector<double>> w(p, std::vector<double>(n));
    std::uint64_t tag = 1;
    for (int r : leaves) {
        if (r == ref) continue;
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < p; ++i) col[i] = joint.values[i][k];
            const auto fwd = trees::phi_forward(tree, r, col);
            for (std::size_t i = 0; i < p; ++i) w[i][k] = fwd[i];
        }
        const auto marg = trees::corollary_marginals(tree, r, a, c);
        const std::string rp = "root" + std::to_string(r) + "_";
        for (std::size_t i = 0; i < p; ++i) {
            std::vector<double> scaled(n);
            for (std::size_t k = 0; k < n; ++k) scaled[k] = w[i][k] / marg[i].scale;
            rep.add_test(rp + "ks_node" + std::to_string(marg[i].id),
                         stats::ks_test(scaled, marg[i].law), stats::kDefaultAlpha);
        }
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) {
                rep.add_test(rp + "indep_" + std::to_string(tree.ids()[i]) + "_" +
                                 std::to_string(tree.ids()[j]),
                             stats::independence_test(w[i], w[j], n_perm, subseed(seed, tag)),
                             stats::kDefaultAlpha);
                ++tag;
            }
    }
    return rep;
}

}  // namespace kummer::verify
