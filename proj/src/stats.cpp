#include "kummer/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "kummer/errors.hpp"
#include "kummer/kernels.hpp"
#include "kummer/parallel.hpp"
#include "kummer/rng.hpp"

namespace kummer::stats {

namespace {

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double chi2_upper_tail(double x, double df) {
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(df / 2.0, x / 2.0);
}

// Kolmogorov Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)
double kolmogorov_q(double lambda) {
    if (lambda < 0.2) return 1.0;
    double s = 0.0, sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += sign * term;
        sign = -sign;
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

void require_finite(std::span<const double> xs, const char* who) {
    for (double x : xs)
        if (!std::isfinite(x)) throw InputError(std::string(who) + ": non-finite value");
}

// stable argsort by value (ties keep input order — the documented tie rule)
std::vector<std::size_t> argsort(std::span<const double> xs) {
    std::vector<std::size_t> idx(xs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });
    return idx;
}

TestResult ks_from_sorted_probs(const std::vector<double>& p, double alpha) {
    const std::size_t n = p.size();
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(p[i] >= 0.0 && p[i] <= 1.0))
            throw DomainError("ks_test: cdf returned a value outside [0,1]");
        const double hi = (static_cast<double>(i) + 1.0) / static_cast<double>(n) - p[i];
        const double lo = p[i] - static_cast<double>(i) / static_cast<double>(n);
        d = std::max({d, hi, lo});
    }
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;  // Stephens' finite-n correction
    TestResult r;
    r.statistic = d;
    r.p_value = kolmogorov_q(lambda);
    r.n = n;
    r.method = "ks";
    r.pass = r.p_value > alpha;
    return r;
}

}  // namespace

TestResult ks_test(std::span<const double> values, const std::function<double(double)>& cdf,
                   double alpha) {
    if (values.size() < 100) throw InputError("ks_test: requires n >= 100");
    require_finite(values, "ks_test");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> p(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) p[i] = cdf(sorted[i]);
    return ks_from_sorted_probs(p, alpha);
}

TestResult ks_test(std::span<const double> values, const dist::DistributionSpec& spec,
                   double alpha) {
    if (values.size() < 100) throw InputError("ks_test: requires n >= 100");
    require_finite(values, "ks_test");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return ks_from_sorted_probs(dist::cdf_batch(spec, sorted), alpha);
}

TestResult independence_test(std::span<const double> u, std::span<const double> v, int n_perm,
                             std::uint64_t seed, double alpha) {
    const std::size_t n = u.size();
    if (n != v.size()) throw InputError("independence_test: length mismatch");
    if (n < 100) throw InputError("independence_test: requires n >= 100");
    if (n_perm < 99) throw InputError("independence_test: requires n_perm >= 99");
    require_finite(u, "independence_test");
    require_finite(v, "independence_test");

    // --- distance correlation on a deterministic subsample ---
    const std::size_t m = std::min<std::size_t>(n, 2000);
    std::vector<std::size_t> pick(n);
    std::iota(pick.begin(), pick.end(), 0);
    rng::Stream sel(seed, 0, 0);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(sel.next_u64() % (n - i));
        std::swap(pick[i], pick[j]);
    }

    auto centered_dist = [&](std::span<const double> xs, std::vector<double>& mat) {
        mat.assign(m * m, 0.0);
        std::vector<double> row_mean(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                const double d = std::abs(xs[pick[i]] - xs[pick[j]]);
                mat[i * m + j] = d;
                row_mean[i] += d;
            }
            row_mean[i] /= static_cast<double>(m);
        }
        double grand = 0.0;
        for (double r : row_mean) grand += r;
        grand /= static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                mat[i * m + j] -= row_mean[i] + row_mean[j] - grand;
    };

    std::vector<double> A, B;
    centered_dist(u, A);
    centered_dist(v, B);

    const auto& ops = kernels::ops();
    const double md = static_cast<double>(m);
    double s_ab = 0.0, s_aa = 0.0, s_bb = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        s_ab += ops.dot(&A[i * m], &B[i * m], m);
        s_aa += ops.dot(&A[i * m], &A[i * m], m);
        s_bb += ops.dot(&B[i * m], &B[i * m], m);
    }
    s_ab /= md * md;
    s_aa /= md * md;
    s_bb /= md * md;
    const double denom = std::sqrt(s_aa * s_bb);
    const double dcor = denom > 0.0 ? std::sqrt(std::max(0.0, s_ab) / denom) : 0.0;

    // permutation null for the numerator (denominator is permutation-invariant)
    std::vector<double> perm_num(static_cast<std::size_t>(n_perm));
    par::parallel_for(perm_num.size(), [&](std::size_t pidx) {
        rng::Stream pg(seed, 1, pidx);
        std::vector<std::int32_t> pi(m);
        std::iota(pi.begin(), pi.end(), 0);
        for (std::size_t i = 0; i + 1 < m; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(pg.next_u64() % (m - i));
            std::swap(pi[i], pi[j]);
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            acc += ops.dot_gather(&A[i * m], &B[static_cast<std::size_t>(pi[i]) * m],
                                  pi.data(), m);
        perm_num[pidx] = acc / (md * md);
    });
    std::size_t ge = 0;
    for (double pn : perm_num)
        if (pn >= s_ab) ++ge;
    const double p_dcor =
        (1.0 + static_cast<double>(ge)) / (static_cast<double>(n_perm) + 1.0);

    // --- chi-square on the 10x10 quantile-binned table, full sample ---
    constexpr std::size_t kBins = 10;
    const auto ou = argsort(u);
    const auto ov = argsort(v);
    std::vector<std::size_t> bu(n), bv(n);
    for (std::size_t r = 0; r < n; ++r) {
        bu[ou[r]] = r * kBins / n;
        bv[ov[r]] = r * kBins / n;
    }
    std::vector<double> counts(kBins * kBins, 0.0);
    for (std::size_t i = 0; i < n; ++i) counts[bu[i] * kBins + bv[i]] += 1.0;
    std::vector<double> rt(kBins, 0.0), ct(kBins, 0.0);
    for (std::size_t r = 0; r < kBins; ++r)
        for (std::size_t c = 0; c < kBins; ++c) {
            rt[r] += counts[r * kBins + c];
            ct[c] += counts[r * kBins + c];
        }
    double chi2 = 0.0;
    for (std::size_t r = 0; r < kBins; ++r)
        for (std::size_t c = 0; c < kBins; ++c) {
            const double e = rt[r] * ct[c] / static_cast<double>(n);
            if (e > 0.0) {
                const double d = counts[r * kBins + c] - e;
                chi2 += d * d / e;
            }
        }
    const double p_chi = chi2_upper_tail(chi2, (kBins - 1.0) * (kBins - 1.0));

    TestResult r;
    r.statistic = dcor;
    r.p_value = std::min(1.0, 2.0 * std::min(p_dcor, p_chi));
    r.n = n;
    r.method = "dcor+chi2";
    r.pass = r.p_value > alpha;
    return r;
}

namespace {

struct BinLayout {
    std::vector<std::size_t> bin_of;  // per observation
    std::vector<std::size_t> count;   // per bin
};

BinLayout quantile_bins(std::span<const double> u, std::size_t bins) {
    const std::size_t n = u.size();
    BinLayout lay;
    lay.bin_of.resize(n);
    lay.count.assign(bins, 0);
    const auto order = argsort(u);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t b = r * bins / n;
        lay.bin_of[order[r]] = b;
        ++lay.count[b];
    }
    return lay;
}

void require_stable_variance(std::span<const double> w, const char* who) {
    const std::size_t n = w.size(), h = n / 2;
    auto var = [&](std::size_t lo, std::size_t hi) {
        double mean = 0.0;
        for (std::size_t i = lo; i < hi; ++i) mean += w[i];
        mean /= static_cast<double>(hi - lo);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += (w[i] - mean) * (w[i] - mean);
        return s / static_cast<double>(hi - lo);
    };
    const double v1 = var(0, h), v2 = var(h, n);
    if (!std::isfinite(v1) || !std::isfinite(v2))
        throw MomentDomainError(std::string(who) + ": response variance is not finite");
    const double big = std::max(v1, v2), small = std::min(v1, v2);
    if (big > 0.0 && small > 0.0 && big / small > 64.0)
        throw MomentDomainError(std::string(who) +
                                ": response variance unstable across halves (heavy tail?)");
}

std::vector<double> powered(std::span<const double> v, double e, const char* who) {
    std::vector<double> w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0)) throw DomainError(std::string(who) + ": requires positive v");
        w[i] = std::pow(v[i], e);
    }
    return w;
}

TestResult max_z_result(double max_z, std::size_t bins, std::size_t n, const char* method,
                        double alpha) {
    TestResult r;
    r.statistic = max_z;
    r.p_value =
        std::min(1.0, 2.0 * static_cast<double>(bins) * normal_upper_tail(max_z));
    r.n = n;
    r.method = method;
    r.pass = r.p_value > alpha;
    return r;
}

}  // namespace

TestResult regression_constancy_test(std::span<const double> u, std::span<const double> v,
                                     double exponent, int bins, double alpha) {
    const std::size_t n = u.size();
    if (n != v.size()) throw InputError("regression_constancy_test: length mismatch");
    if (bins < 5) throw InputError("regression_constancy_test: requires bins >= 5");
    if (n < static_cast<std::size_t>(bins) * 30)
        throw InputError("regression_constancy_test: underfilled bins (need >= 30 each)");
    require_finite(u, "regression_constancy_test");
    require_finite(v, "regression_constancy_test");

    const auto w = powered(v, exponent, "regression_constancy_test");
    require_stable_variance(w, "regression_constancy_test");

    const auto lay = quantile_bins(u, static_cast<std::size_t>(bins));
    std::vector<double> mean(bins, 0.0);
    for (std::size_t i = 0; i < n; ++i) mean[lay.bin_of[i]] += w[i];
    double grand = 0.0;
    for (int b = 0; b < bins; ++b) {
        grand += mean[b];
        mean[b] /= static_cast<double>(lay.count[b]);
    }
    grand /= static_cast<double>(n);
    double s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) s2 += (w[i] - grand) * (w[i] - grand);
    s2 /= static_cast<double>(n - 1);

    if (s2 <= 0.0)  // constant response: nothing can deviate
        return max_z_result(0.0, bins, n, "binned-mean-constancy", alpha);

    double max_z = 0.0;
    for (int b = 0; b < bins; ++b) {
        const double nk = static_cast<double>(lay.count[b]);
        const double se =
            std::sqrt(s2 * (1.0 / nk - 1.0 / static_cast<double>(n)));
        max_z = std::max(max_z, std::abs(mean[b] - grand) / se);
    }
    return max_z_result(max_z, bins, n, "binned-mean-constancy", alpha);
}

TestResult regression_ratio_constancy_test(std::span<const double> u,
                                           std::span<const double> v, double s, int bins,
                                           double alpha) {
    const std::size_t n = u.size();
    if (n != v.size()) throw InputError("regression_ratio_constancy_test: length mismatch");
    if (bins < 5) throw InputError("regression_ratio_constancy_test: requires bins >= 5");
    if (n < static_cast<std::size_t>(bins) * 30)
        throw InputError("regression_ratio_constancy_test: underfilled bins (need >= 30 each)");
    require_finite(u, "regression_ratio_constancy_test");
    require_finite(v, "regression_ratio_constancy_test");

    const auto w1 = powered(v, s, "regression_ratio_constancy_test");
    const auto w0 = powered(v, s - 1.0, "regression_ratio_constancy_test");
    require_stable_variance(w1, "regression_ratio_constancy_test");
    require_stable_variance(w0, "regression_ratio_constancy_test");

    const auto lay = quantile_bins(u, static_cast<std::size_t>(bins));
    std::vector<double> m1(bins, 0.0), m0(bins, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        m1[lay.bin_of[i]] += w1[i];
        m0[lay.bin_of[i]] += w0[i];
    }
    double g1 = 0.0, g0 = 0.0;
    for (int b = 0; b < bins; ++b) {
        g1 += m1[b];
        g0 += m0[b];
        m1[b] /= static_cast<double>(lay.count[b]);
        m0[b] /= static_cast<double>(lay.count[b]);
    }
    const double R = g1 / g0;
    g1 /= static_cast<double>(n);
    g0 /= static_cast<double>(n);

    // pooled second moments for the delta-method variance of each bin ratio
    double v11 = 0.0, v00 = 0.0, v10 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        v11 += (w1[i] - g1) * (w1[i] - g1);
        v00 += (w0[i] - g0) * (w0[i] - g0);
        v10 += (w1[i] - g1) * (w0[i] - g0);
    }
    const double dn = static_cast<double>(n - 1);
    v11 /= dn;
    v00 /= dn;
    v10 /= dn;
    const double qf = std::max(0.0, v11 - 2.0 * R * v10 + R * R * v00);

    if (qf <= 0.0) {
        double dev = 0.0;
        for (int b = 0; b < bins; ++b) dev = std::max(dev, std::abs(m1[b] / m0[b] - R));
        if (dev == 0.0)
            return max_z_result(0.0, bins, n, "binned-ratio-constancy", alpha);
    }

    double max_z = 0.0;
    for (int b = 0; b < bins; ++b) {
        const double nk = static_cast<double>(lay.count[b]);
        const double se = std::sqrt(qf * (1.0 / nk - 1.0 / static_cast<double>(n))) / g0;
        const double rb = m1[b] / m0[b];
        max_z = std::max(max_z, std::abs(rb - R) / se);
    }
    return max_z_result(max_z, bins, n, "binned-ratio-constancy", alpha);
}

}  // namespace kummer::stats
