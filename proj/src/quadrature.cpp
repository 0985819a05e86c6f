#include "kummer/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kummer::quad {

namespace {

// 15-point Kronrod abscissae on [-1,1] (positive half) and weights; the
// embedded 7-point Gauss nodes are xgk[1], xgk[3], xgk[5] and the centre.
constexpr double xgk[8] = {
    0.9914553711208126392068547, 0.9491079123427585245261897,
    0.8648644233597690727897128, 0.7415311855993944398638648,
    0.5860872354676911302941448, 0.4058451513773971669066064,
    0.2077849550078984676006894, 0.0};
constexpr double wgk[8] = {
    0.0229353220105292249637320, 0.0630920926299785532907007,
    0.1047900103222501838398763, 0.1406532597155259187451896,
    0.1690047266392679028265834, 0.1903505780647854099132564,
    0.2044329400752988924141620, 0.2094821410847278280129992};
constexpr double wg[4] = {
    0.1294849661688696932706114, 0.2797053914892766679014678,
    0.3818300505051189449503698, 0.4179591836734693877551020};

struct Panel {
    const std::function<double(double)>* f;
    double lo, hi;
    double value, error;
};

bool worse(const Panel& a, const Panel& b) { return a.error < b.error; }

}  // namespace

PanelEstimate gk15(const std::function<double(double)>& f, double lo, double hi) {
    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    double fv[15];
    const double fc = f(centre);
    fv[14] = fc;
    double resg = wg[3] * fc;
    double resk = wgk[7] * fc;
    double resabs = wgk[7] * std::fabs(fc);
    for (int j = 0; j < 7; ++j) {
        const double x = half * xgk[j];
        const double f1 = f(centre - x);
        const double f2 = f(centre + x);
        fv[j] = f1;
        fv[7 + j] = f2;
        resk += wgk[j] * (f1 + f2);
        resabs += wgk[j] * (std::fabs(f1) + std::fabs(f2));
        if (j == 1 || j == 3 || j == 5) resg += wg[j / 2] * (f1 + f2);
    }
    const double reskh = resk * 0.5;
    double resasc = wgk[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += wgk[j] * (std::fabs(fv[j] - reskh) + std::fabs(fv[7 + j] - reskh));
    resasc *= std::fabs(half);
    resabs *= std::fabs(half);

    double err = std::fabs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(eps * 50.0 * resabs, err);
    return {resk * half, err};
}

double integrate_segments(std::span<const Segment> segments, const QuadratureConfig& cfg) {
    std::vector<Panel> heap;
    double frozen_value = 0.0, frozen_error = 0.0;

    for (const Segment& s : segments) {
        if (!(s.lo < s.hi)) continue;  // empty or inverted pieces contribute nothing
        auto est = gk15(s.f, s.lo, s.hi);
        heap.push_back({&s.f, s.lo, s.hi, est.value, est.error});
    }
    std::make_heap(heap.begin(), heap.end(), worse);

    int subdivisions = 0;
    for (;;) {
        double total = frozen_value, err = frozen_error;
        for (const Panel& p : heap) {
            total += p.value;
            err += p.error;
        }
        const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total));
        if (err <= tol || heap.empty()) return total;

        std::pop_heap(heap.begin(), heap.end(), worse);
        Panel p = heap.back();
        heap.pop_back();

        const double eps = std::numeric_limits<double>::epsilon();
        const double width = p.hi - p.lo;
        if (width <= eps * (std::fabs(p.lo) + std::fabs(p.hi)) + 1e-300) {
            // cannot split further; bank it and keep refining the rest
            frozen_value += p.value;
            frozen_error += p.error;
            continue;
        }
        if (subdivisions >= cfg.max_subdivisions)
            throw QuadratureError("adaptive quadrature: subdivision budget exhausted", p.lo,
                                  p.hi, total != 0.0 ? err / std::fabs(total) : err);

        const double mid = 0.5 * (p.lo + p.hi);
        auto left = gk15(*p.f, p.lo, mid);
        auto right = gk15(*p.f, mid, p.hi);
        heap.push_back({p.f, p.lo, mid, left.value, left.error});
        std::push_heap(heap.begin(), heap.end(), worse);
        heap.push_back({p.f, mid, p.hi, right.value, right.error});
        std::push_heap(heap.begin(), heap.end(), worse);
        ++subdivisions;
    }
}

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureConfig& cfg) {
    const Segment seg{f, lo, hi};
    return integrate_segments(std::span<const Segment>(&seg, 1), cfg);
}

double integrate(const std::function<double(double)>& f, std::span<const double> knots,
                 const QuadratureConfig& cfg) {
    if (knots.size() < 2) throw DomainError("integrate: need at least two knots");
    std::vector<Segment> segs;
    segs.reserve(knots.size() - 1);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        segs.push_back({f, knots[i], knots[i + 1]});
    return integrate_segments(segs, cfg);
}

}  // namespace kummer::quad
