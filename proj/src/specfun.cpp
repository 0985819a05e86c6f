#include "kummer/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace kummer::specfun {

double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: requires x > 0");
    return boost::math::lgamma(x);
}

namespace detail {

double log_tricomi_u_split(double a, double b, double z, double split,
                           const quad::QuadratureConfig& cfg) {
    if (!(a > 0.0)) {
        std::ostringstream os;
        os << "tricomi_u: requires a > 0 (a=" << a << ")";
        throw DomainError(os.str());
    }
    if (!(z > 0.0)) {
        std::ostringstream os;
        os << "tricomi_u: requires z > 0 (z=" << z << ")";
        throw DomainError(os.str());
    }
    if (!(split > 0.0)) throw DomainError("tricomi_u: split point must be positive");

    // integrand exponent, log of t^{a-1} e^{-zt} (1+t)^{b-a-1}
    auto phi = [a, b, z](double t) {
        return (a - 1.0) * std::log(t) - z * t + (b - a - 1.0) * std::log1p(t);
    };

    // interior extrema of phi: positive roots of z t^2 + (z-b+2) t - (a-1) = 0
    std::vector<double> feats;
    {
        const double B = z - b + 2.0;
        const double C = -(a - 1.0);
        const double disc = B * B - 4.0 * z * C;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            const double q = (B >= 0.0) ? -0.5 * (B + sq) : -0.5 * (B - sq);
            const double r1 = q / z;
            const double r2 = (q != 0.0) ? C / q : 0.0;
            for (double r : {r1, r2})
                if (r > 0.0 && std::isfinite(r)) feats.push_back(r);
        }
    }

    double max_feat = 0.0;
    for (double f : feats) max_feat = std::max(max_feat, f);
    const double tail_start = std::max(4.0 * split, 8.0 * max_feat);

    std::vector<double> knots{0.0, split};
    for (double f : feats)
        for (double m : {0.25, 0.5, 1.0, 2.0, 4.0}) knots.push_back(f * m);
    std::erase_if(knots, [&](double k) { return k >= tail_start; });
    knots.push_back(tail_start);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    // global log-scale: probe phi at the knots and stationary points
    double M = -std::numeric_limits<double>::infinity();
    for (double k : knots)
        if (k > 0.0) M = std::max(M, phi(k));
    for (double f : feats) M = std::max(M, phi(f));

    const double k1 = knots[1];
    const bool substitute = a < 1.0;  // absorb the t^{a-1} endpoint singularity
    const double log_jac = substitute ? a * std::log(k1) - std::log(a) : 0.0;
    if (a == 1.0) M = std::max(M, 0.0);  // phi(0+) = 0
    if (substitute) {
        auto psi = [&](double t) { return log_jac - z * t + (b - a - 1.0) * std::log1p(t); };
        M = std::max(M, psi(0.0));
        M = std::max(M, psi(k1));
        const double tm = (b - a - 1.0) / z - 1.0;  // stationary point of psi
        if (tm > 0.0 && tm < k1) M = std::max(M, psi(tm));
    }

    std::vector<quad::Segment> segs;
    auto scaled = [phi, M](double t) { return t <= 0.0 ? 0.0 : std::exp(phi(t) - M); };
    if (substitute) {
        const double inv_a = 1.0 / a;
        segs.push_back({[=](double w) {
                            const double t = k1 * std::pow(w, inv_a);
                            return std::exp(log_jac - z * t + (b - a - 1.0) * std::log1p(t) - M);
                        },
                        0.0, 1.0});
    } else {
        segs.push_back({scaled, 0.0, k1});
    }
    for (std::size_t i = 1; i + 1 < knots.size(); ++i)
        segs.push_back({scaled, knots[i], knots[i + 1]});
    // geometric continuation until the integrand underflows against the scale
    double T = tail_start;
    for (int j = 0; j < 80 && phi(T) - M > -800.0; ++j) {
        segs.push_back({scaled, T, 2.0 * T});
        T *= 2.0;
    }

    const double S = quad::integrate_segments(segs, cfg);
    if (!(S > 0.0) || !std::isfinite(S))
        throw QuadratureError("tricomi_u: scaled integral did not evaluate to a positive value",
                              0.0, T, S);
    return M + std::log(S) - log_gamma(a);
}

}  // namespace detail

double log_tricomi_u(double a, double b, double z, const quad::QuadratureConfig& cfg) {
    return detail::log_tricomi_u_split(a, b, z, 1.0, cfg);
}

double tricomi_u(double a, double b, double z, const quad::QuadratureConfig& cfg) {
    return std::exp(log_tricomi_u(a, b, z, cfg));
}

}  // namespace kummer::specfun
