#include "kummer/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <utility>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "kummer/errors.hpp"
#include "kummer/parallel.hpp"
#include "kummer/specfun.hpp"

namespace kummer::dist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_params(const char* name, std::initializer_list<std::pair<const char*, double>> ps) {
    std::ostringstream os;
    os << name << '(';
    bool first = true;
    for (const auto& [k, v] : ps) {
        if (!first) os << ", ";
        os << k << '=' << v;
        first = false;
    }
    os << ')';
    return os.str();
}

}  // namespace

DistributionSpec DistributionSpec::kummer(double a, double b, double c) {
    if (!(a > 0.0) || !(c > 0.0) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c))
        throw DomainError("kummer spec requires a > 0, c > 0, finite b");
    DistributionSpec s;
    s.family_ = Family::kummer;
    s.k_ = {a, b, c};
    return s;
}

DistributionSpec DistributionSpec::gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate))
        throw DomainError("gamma spec requires shape > 0, rate > 0");
    DistributionSpec s;
    s.family_ = Family::gamma;
    s.g_ = {shape, rate};
    return s;
}

DistributionSpec DistributionSpec::beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("beta spec requires a > 0, b > 0");
    DistributionSpec s;
    s.family_ = Family::beta;
    s.be_ = {a, b};
    return s;
}

const KummerParams& DistributionSpec::kummer_params() const {
    if (family_ != Family::kummer) throw DomainError("spec is not a kummer distribution");
    return k_;
}

const GammaParams& DistributionSpec::gamma_params() const {
    if (family_ != Family::gamma) throw DomainError("spec is not a gamma distribution");
    return g_;
}

const BetaParams& DistributionSpec::beta_params() const {
    if (family_ != Family::beta) throw DomainError("spec is not a beta distribution");
    return be_;
}

std::string DistributionSpec::label() const {
    switch (family_) {
        case Family::kummer:
            return fmt_params("Kummer", {{"a", k_.a}, {"b", k_.b}, {"c", k_.c}});
        case Family::gamma:
            return fmt_params("Gamma", {{"shape", g_.shape}, {"rate", g_.rate}});
        case Family::beta:
            return fmt_params("Beta", {{"a", be_.a}, {"b", be_.b}});
    }
    return "?";
}

DistributionSpec DistributionSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("family"))
        throw InputError("distribution json must be an object with a \"family\" key");
    const std::string fam = j.at("family").get<std::string>();
    try {
        if (fam == "kummer")
            return kummer(j.at("a").get<double>(), j.at("b").get<double>(),
                          j.at("c").get<double>());
        if (fam == "gamma")
            return gamma(j.at("shape").get<double>(), j.at("rate").get<double>());
        if (fam == "beta") return beta(j.at("a").get<double>(), j.at("b").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad distribution json: ") + e.what());
    }
    throw InputError("unknown distribution family \"" + fam + "\"");
}

nlohmann::json DistributionSpec::to_json() const {
    nlohmann::ordered_json j;
    switch (family_) {
        case Family::kummer:
            j["family"] = "kummer";
            j["a"] = k_.a;
            j["b"] = k_.b;
            j["c"] = k_.c;
            break;
        case Family::gamma:
            j["family"] = "gamma";
            j["shape"] = g_.shape;
            j["rate"] = g_.rate;
            break;
        case Family::beta:
            j["family"] = "beta";
            j["a"] = be_.a;
            j["b"] = be_.b;
            break;
    }
    return j;
}

namespace {

double log_beta_fn(double a, double b) {
    return specfun::log_gamma(a) + specfun::log_gamma(b) - specfun::log_gamma(a + b);
}

// ---- Kummer kernel machinery (partial integrals for the cdf) --------------
//
// kappa(t) = (a-1) ln t - c t - (a+b) ln(1+t).  Stationary points solve
// c t^2 + (c+b+1) t - (a-1) = 0.  For a < 1 the left endpoint is an
// integrable power singularity removed with t = k1 * w^{1/a} on the first
// segment, mirroring the normalizing-constant evaluation.

struct KummerKernel {
    double a, b, c;

    double kappa(double t) const {
        return (a - 1.0) * std::log(t) - c * t - (a + b) * std::log1p(t);
    }

    std::vector<double> stationary() const {
        // c t^2 + B t + C with B = c+b+1, C = -(a-1); stable root form
        const double B = c + b + 1.0, C = -(a - 1.0);
        const double disc = B * B - 4.0 * c * C;
        std::vector<double> r;
        if (disc < 0.0) return r;
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (B + (B >= 0.0 ? sq : -sq));
        for (double t : {q / c, C / q})
            if (std::isfinite(t) && t > 0.0) r.push_back(t);
        return r;
    }

    // max of kappa over (0, cap]; for a < 1 the divergence at 0 is handled by
    // the substituted segment, so the sup is taken over probe points only
    double scale(double cap) const {
        double m = -kInf;
        auto probe = [&](double t) {
            if (std::isfinite(t) && t > 0.0 && t <= cap) {
                const double v = kappa(t);
                if (v > m) m = v;
            }
        };
        for (double t : stationary()) probe(t);
        probe(std::min(1.0, cap));
        if (std::isfinite(cap)) {
            probe(cap * 0.5);
            probe(cap);
        }
        if (a == 1.0 && m < 0.0) m = 0.0;  // kappa(0+) = 0 exactly
        if (a < 1.0) {
            // value of the substituted integrand at its left endpoint
            const double k1 = std::min(1.0, cap);
            m = std::max(m, a * std::log(k1) - std::log(a));
        }
        return std::isfinite(m) ? m : 0.0;
    }
};

// scaled integrand segments for integral_0^hi exp(kappa - M); hi may be kInf,
// in which case a geometrically extended tail is appended
std::vector<quad::Segment> kummer_segments(const KummerKernel& k, double hi, double M) {
    std::vector<quad::Segment> segs;
    const double a = k.a;
    double lo = 0.0;
    if (a < 1.0) {
        // t = k1 w^{1/a}: integral over w in [0,1] of exp(psi(w) - M) with
        // psi = a ln k1 - ln a - c t - (a+b) ln(1+t)
        const double k1 = std::min(1.0, hi);
        const double lj = a * std::log(k1) - std::log(a);
        segs.push_back({[k, k1, lj, M](double w) {
                            const double t = k1 * std::pow(w, 1.0 / k.a);
                            return std::exp(lj - k.c * t - (k.a + k.b) * std::log1p(t) - M);
                        },
                        0.0, 1.0});
        lo = k1;
        if (lo >= hi) return segs;
    }
    auto plain = [&](double l, double h) {
        segs.push_back({[k, M](double t) { return std::exp(k.kappa(t) - M); }, l, h});
    };
    // interior knots: stationary points and unit scale, bracketed
    std::vector<double> knots{lo};
    auto add = [&](double t) {
        if (t > lo && (t < hi)) knots.push_back(t);
    };
    for (double t : k.stationary())
        for (double f : {0.25, 1.0, 4.0}) add(t * f);
    add(1.0);
    // dyadic ladder through the tail: without it a single panel spanning a
    // long decayed stretch sees zero at every node and is accepted as zero
    double T = 8.0;
    for (double t : knots) T = std::max(T, 4.0 * t);
    double finite_hi = hi;
    if (!std::isfinite(hi)) {
        for (int j = 0; j < 80 && k.kappa(T) - M > -800.0; ++j) {
            add(T);
            T *= 2.0;
        }
        finite_hi = T;
    } else {
        for (; T < hi; T *= 2.0) add(T);
        add(hi);
    }
    knots.push_back(finite_hi);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) plain(knots[i], knots[i + 1]);
    return segs;
}

}  // namespace

double log_norm_const(const DistributionSpec& spec, const quad::QuadratureConfig& cfg) {
    switch (spec.family()) {
        case Family::kummer: {
            const auto& p = spec.kummer_params();
            return specfun::log_gamma(p.a) + specfun::log_tricomi_u(p.a, 1.0 - p.b, p.c, cfg);
        }
        case Family::gamma: {
            const auto& p = spec.gamma_params();
            return specfun::log_gamma(p.shape) - p.shape * std::log(p.rate);
        }
        case Family::beta: {
            const auto& p = spec.beta_params();
            return log_beta_fn(p.a, p.b);
        }
    }
    throw DomainError("unreachable family");
}

double log_pdf(const DistributionSpec& spec, double x, const quad::QuadratureConfig& cfg) {
    switch (spec.family()) {
        case Family::kummer: {
            if (!(x > 0.0)) throw DomainError("log_pdf: x outside the support (0,inf)");
            const auto& p = spec.kummer_params();
            return (p.a - 1.0) * std::log(x) - p.c * x - (p.a + p.b) * std::log1p(x) -
                   log_norm_const(spec, cfg);
        }
        case Family::gamma: {
            if (!(x > 0.0)) throw DomainError("log_pdf: x outside the support (0,inf)");
            const auto& p = spec.gamma_params();
            return (p.shape - 1.0) * std::log(x) - p.rate * x - log_norm_const(spec, cfg);
        }
        case Family::beta: {
            if (!(x > 0.0) || !(x < 1.0)) throw DomainError("log_pdf: x outside the support (0,1)");
            const auto& p = spec.beta_params();
            return (p.a - 1.0) * std::log(x) + (p.b - 1.0) * std::log1p(-x) -
                   log_beta_fn(p.a, p.b);
        }
    }
    throw DomainError("unreachable family");
}

double cdf(const DistributionSpec& spec, double x, const quad::QuadratureConfig& cfg) {
    const double xs[1] = {x};
    return cdf_batch(spec, xs, cfg)[0];
}

std::vector<double> cdf_batch(const DistributionSpec& spec, std::span<const double> xs,
                              const quad::QuadratureConfig& cfg) {
    std::vector<double> out(xs.size());
    switch (spec.family()) {
        case Family::gamma: {
            const auto& p = spec.gamma_params();
            for (std::size_t i = 0; i < xs.size(); ++i)
                out[i] = xs[i] <= 0.0 ? 0.0 : boost::math::gamma_p(p.shape, p.rate * xs[i]);
            return out;
        }
        case Family::beta: {
            const auto& p = spec.beta_params();
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const double x = xs[i];
                out[i] = x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : boost::math::ibeta(p.a, p.b, x));
            }
            return out;
        }
        case Family::kummer:
            break;
    }
    const auto& p = spec.kummer_params();
    for (double x : xs)
        if (std::isnan(x)) throw DomainError("cdf: NaN evaluation point");
    const double logZ = log_norm_const(spec, cfg);

    // one left-to-right sweep: sort the evaluation points, integrate each gap
    // once, and emit running-sum / Z
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return xs[i] < xs[j];
    });

    const KummerKernel k{p.a, p.b, p.c};
    double xmax = 0.0;
    for (double x : xs) xmax = std::max(xmax, x);
    const double M = k.scale(xmax > 0.0 ? xmax : 1.0);

    quad::QuadratureConfig seg_cfg = cfg;
    seg_cfg.rel_tol = std::max(cfg.rel_tol, 1e-9);
    seg_cfg.max_subdivisions = 60;

    double running = 0.0;
    double prev = 0.0;
    for (std::size_t idx : order) {
        const double x = xs[idx];
        if (x <= 0.0) {
            out[idx] = 0.0;
            continue;
        }
        if (x > prev) {
            if (prev == 0.0) {
                running += quad::integrate_segments(kummer_segments(k, x, M), seg_cfg);
            } else {
                // dyadic knots keep wide gaps between sample points resolvable
                std::vector<double> gk{prev};
                for (double T = std::max(prev, 1.0) * 2.0; T < x; T *= 2.0) gk.push_back(T);
                gk.push_back(x);
                running += quad::integrate(
                    [&k, M](double t) { return std::exp(k.kappa(t) - M); }, gk, seg_cfg);
            }
            prev = x;
        }
        const double v = running > 0.0 ? std::exp(std::log(running) + M - logZ) : 0.0;
        out[idx] = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

double moment(const DistributionSpec& spec, double s, const quad::QuadratureConfig& cfg) {
    switch (spec.family()) {
        case Family::kummer: {
            const auto& p = spec.kummer_params();
            if (!(p.a + s > 0.0))
                throw MomentDomainError("moment: requires s > -a = " + std::to_string(-p.a));
            return std::exp(specfun::log_gamma(p.a + s) +
                            specfun::log_tricomi_u(p.a + s, 1.0 + s - p.b, p.c, cfg) -
                            specfun::log_gamma(p.a) -
                            specfun::log_tricomi_u(p.a, 1.0 - p.b, p.c, cfg));
        }
        case Family::gamma: {
            const auto& p = spec.gamma_params();
            if (!(p.shape + s > 0.0))
                throw MomentDomainError("moment: requires s > -shape = " +
                                        std::to_string(-p.shape));
            return std::exp(specfun::log_gamma(p.shape + s) - specfun::log_gamma(p.shape) -
                            s * std::log(p.rate));
        }
        case Family::beta: {
            const auto& p = spec.beta_params();
            if (!(p.a + s > 0.0))
                throw MomentDomainError("moment: requires s > -a = " + std::to_string(-p.a));
            return std::exp(log_beta_fn(p.a + s, p.b) - log_beta_fn(p.a, p.b));
        }
    }
    throw DomainError("unreachable family");
}

double survival_power_moment(const DistributionSpec& spec, int k,
                             const quad::QuadratureConfig& cfg) {
    if (k < 0) throw DomainError("survival_power_moment: k must be >= 0");
    if (k == 0) return 1.0;
    switch (spec.family()) {
        case Family::kummer: {
            const auto& p = spec.kummer_params();
            return std::exp(specfun::log_tricomi_u(p.a, 1.0 - p.b - k, p.c, cfg) -
                            specfun::log_tricomi_u(p.a, 1.0 - p.b, p.c, cfg));
        }
        case Family::gamma: {
            const auto& p = spec.gamma_params();
            return std::exp(p.shape * std::log(p.rate) +
                            specfun::log_tricomi_u(p.shape, 1.0 + p.shape - k, p.rate, cfg));
        }
        case Family::beta:
            throw DomainError("survival_power_moment: defined for the (0,inf) families only");
    }
    throw DomainError("unreachable family");
}

double log_weighted_moment(const DistributionSpec& spec, double alpha, double beta, double sigma,
                           const quad::QuadratureConfig& cfg) {
    switch (spec.family()) {
        case Family::kummer: {
            const auto& p = spec.kummer_params();
            if (!(p.a + alpha > 0.0))
                throw MomentDomainError("log_weighted_moment: requires alpha > -a");
            if (!(p.c - sigma > 0.0))
                throw MomentDomainError("log_weighted_moment: requires sigma < c");
            return specfun::log_gamma(p.a + alpha) +
                   specfun::log_tricomi_u(p.a + alpha, 1.0 + alpha - beta - p.b, p.c - sigma,
                                          cfg) -
                   specfun::log_gamma(p.a) - specfun::log_tricomi_u(p.a, 1.0 - p.b, p.c, cfg);
        }
        case Family::gamma: {
            const auto& p = spec.gamma_params();
            if (!(p.shape + alpha > 0.0))
                throw MomentDomainError("log_weighted_moment: requires alpha > -shape");
            if (!(p.rate - sigma > 0.0))
                throw MomentDomainError("log_weighted_moment: requires sigma < rate");
            return specfun::log_gamma(p.shape + alpha) +
                   specfun::log_tricomi_u(p.shape + alpha, 1.0 + p.shape + alpha - beta,
                                          p.rate - sigma, cfg) +
                   p.shape * std::log(p.rate) - specfun::log_gamma(p.shape);
        }
        case Family::beta: {
            const auto& p = spec.beta_params();
            if (!(p.a + alpha > 0.0))
                throw MomentDomainError("log_weighted_moment: requires alpha > -a");
            // integral over (0,1); endpoint powers removed by substitution on
            // each half:  u = 0.5 w^{1/(a+alpha)}  and  1-u = 0.5 w^{1/b}
            const double aa = p.a + alpha, bb = p.b;
            auto core = [&, beta, sigma](double u) {
                return std::exp(-beta * std::log1p(u) + sigma * u);
            };
            std::vector<quad::Segment> segs;
            segs.push_back({[aa, bb, core](double w) {
                                const double u = 0.5 * std::pow(w, 1.0 / aa);
                                return std::exp(aa * std::log(0.5) - std::log(aa) +
                                                (bb - 1.0) * std::log1p(-u)) *
                                       core(u);
                            },
                            0.0, 1.0});
            segs.push_back({[aa, bb, core](double w) {
                                const double om = 0.5 * std::pow(w, 1.0 / bb);  // om = 1-u
                                const double u = 1.0 - om;
                                return std::exp(bb * std::log(0.5) - std::log(bb) +
                                                (aa - 1.0) * std::log(u)) *
                                       core(u);
                            },
                            0.0, 1.0});
            const double num = quad::integrate_segments(segs, cfg);
            return std::log(num) - log_beta_fn(p.a, p.b);
        }
    }
    throw DomainError("unreachable family");
}

// ---- samplers --------------------------------------------------------------

double sample_gamma(rng::Stream& g, double shape, double rate) {
    if (shape < 1.0) {
        // boost the shape, then apply the power correction
        const double u = g.next_open01();
        return sample_gamma(g, shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double xn, v;
        do {
            xn = g.next_normal();
            v = 1.0 + c * xn;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = g.next_open01();
        const double x2 = xn * xn;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

double sample_beta(rng::Stream& g, double a, double b) {
    for (;;) {
        const double x = sample_gamma(g, a, 1.0);
        const double y = sample_gamma(g, b, 1.0);
        const double u = x / (x + y);
        if (u > 0.0 && u < 1.0) return u;
    }
}

namespace {

// rejection plan for the Kummer law.  a+b >= 0: propose Gamma(a,c), accept
// with (1+x)^{-(a+b)}.  a+b < 0: propose the binomial mixture of Gamma(a+j,c),
// j=0..m with m = ceil(-(a+b)) and weights C(m,j) Gamma(a+j) c^{-(a+j)} (the
// mixture has kernel x^{a-1} e^{-cx} (1+x)^m), accept with
// (1+x)^{-(a+b)-m} <= 1.
struct KummerPlan {
    KummerParams p;
    double accept_exp;         // exponent on (1+x) in the acceptance weight, <= 0
    std::vector<double> cum;   // cumulative mixture weights; empty when a+b >= 0

    explicit KummerPlan(const KummerParams& params) : p(params) {
        const double ab = p.a + p.b;
        if (ab >= 0.0) {
            accept_exp = -ab;
            return;
        }
        const int m = static_cast<int>(std::ceil(-ab));
        accept_exp = -ab - m;
        std::vector<double> lw(m + 1);
        double lc = std::log(p.c);
        for (int j = 0; j <= m; ++j) {
            lw[j] = specfun::log_gamma(m + 1.0) - specfun::log_gamma(j + 1.0) -
                    specfun::log_gamma(m - j + 1.0) + specfun::log_gamma(p.a + j) -
                    (p.a + j) * lc;
        }
        const double mx = *std::max_element(lw.begin(), lw.end());
        cum.resize(m + 1);
        double acc = 0.0;
        for (int j = 0; j <= m; ++j) {
            acc += std::exp(lw[j] - mx);
            cum[j] = acc;
        }
        for (double& v : cum) v /= acc;
        cum.back() = 1.0;
    }

    // trials/accepts are a rolling window shared across draws: if a window of
    // 1e5 proposals yields acceptance below 1e-4, the sampler is declared
    // degenerate rather than left spinning
    double draw(rng::Stream& g, unsigned long long& trials, unsigned long long& accepts) const {
        constexpr unsigned long long kWindow = 100000;
        for (;;) {
            double shape = p.a;
            if (!cum.empty()) {
                const double u = g.next_open01();
                const auto it = std::lower_bound(cum.begin(), cum.end(), u);
                shape = p.a + static_cast<double>(it - cum.begin());
            }
            const double x = sample_gamma(g, shape, p.c);
            ++trials;
            const bool ok = std::log(g.next_open01()) < accept_exp * std::log1p(x);
            if (ok) ++accepts;
            if (trials >= kWindow) {
                if (accepts * 10000 < trials)
                    throw SamplerDegenerateError(
                        "kummer sampler degenerate: acceptance below 1e-4 over a 1e5-trial "
                        "window",
                        trials, accepts);
                trials = 0;
                accepts = 0;
            }
            if (ok) return x;
        }
    }
};

}  // namespace

double sample_kummer(rng::Stream& g, const KummerParams& p) {
    KummerPlan plan(p);
    unsigned long long trials = 0, accepts = 0;
    return plan.draw(g, trials, accepts);
}

SampleBatch sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed,
                   std::uint64_t stream_id) {
    SampleBatch out{std::vector<double>(n), spec, seed, stream_id};
    constexpr std::size_t kChunk = 65536;
    const std::size_t n_chunks = n == 0 ? 0 : (n + kChunk - 1) / kChunk;

    std::optional<KummerPlan> plan;
    if (spec.family() == Family::kummer) plan.emplace(spec.kummer_params());

    par::parallel_for(n_chunks, [&](std::size_t j) {
        rng::Stream g(seed, stream_id, j);
        const std::size_t lo = j * kChunk, hi = std::min(n, lo + kChunk);
        unsigned long long trials = 0, accepts = 0;
        switch (spec.family()) {
            case Family::kummer:
                for (std::size_t i = lo; i < hi; ++i)
                    out.values[i] = plan->draw(g, trials, accepts);
                break;
            case Family::gamma: {
                const auto& p = spec.gamma_params();
                for (std::size_t i = lo; i < hi; ++i)
                    out.values[i] = sample_gamma(g, p.shape, p.rate);
                break;
            }
            case Family::beta: {
                const auto& p = spec.beta_params();
                for (std::size_t i = lo; i < hi; ++i) out.values[i] = sample_beta(g, p.a, p.b);
                break;
            }
        }
    });
    return out;
}

}  // namespace kummer::dist
