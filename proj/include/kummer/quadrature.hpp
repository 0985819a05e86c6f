#pragma once

#include <functional>
#include <span>
#include <vector>

#include "kummer/errors.hpp"

namespace kummer::quad {

struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-300;  // absolute floor; keeps log-scale integrals from spinning
    int max_subdivisions = 200;
};

// One integrand restricted to [lo, hi].  integrate_segments drives the whole
// collection to a single global tolerance, so an integral assembled from
// differently-substituted pieces converges as one quantity.
struct Segment {
    std::function<double(double)> f;
    double lo;
    double hi;
};

struct PanelEstimate {
    double value;
    double error;
};

// 15-point Gauss-Kronrod rule with the classic scaled error estimate.
PanelEstimate gk15(const std::function<double(double)>& f, double lo, double hi);

double integrate_segments(std::span<const Segment> segments, const QuadratureConfig& cfg = {});

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureConfig& cfg = {});

double integrate(const std::function<double(double)>& f, std::span<const double> knots,
                 const QuadratureConfig& cfg = {});

}  // namespace kummer::quad
