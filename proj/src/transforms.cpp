#include "kummer/transforms.hpp"

#include <cmath>

#include "kummer/errors.hpp"
#include "kummer/kernels.hpp"

namespace kummer::maps {

namespace {

void require_positive(double a, double b, const char* who) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError(std::string(who) + ": inputs must be finite and strictly positive");
}

void require_sizes(std::size_t a, std::size_t b, std::size_t c, std::size_t d,
                   const char* who) {
    if (a != b || a != c || a != d)
        throw DomainError(std::string(who) + ": all spans must have equal length");
}

}  // namespace

// scalar forms repeat the kernel operation order exactly, so scalar and batch
// results are bitwise identical

PositivePair hv_forward(double x, double y) {
    require_positive(x, y, "hv_forward");
    const double t = 1.0 + x;
    const double u = y / t;
    const double w = 1.0 + u;
    return {u, x * w};
}

PositivePair hv_inverse(double u, double v) {
    require_positive(u, v, "hv_inverse");
    const double t = 1.0 + u;
    const double x = v / t;
    const double w = 1.0 + x;
    return {x, u * w};
}

PositivePair kv_forward(double x, double y) {
    require_positive(x, y, "kv_forward");
    const double v = x + y;
    const double num = x * (1.0 + v);
    const double den = v * (1.0 + x);
    return {num / den, v};
}

PositivePair kv_inverse(double u, double v) {
    if (!(u > 0.0) || !(u < 1.0) || !std::isfinite(u))
        throw DomainError("kv_inverse: u must lie strictly in (0,1)");
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError("kv_inverse: v must be strictly positive");
    const double t = 1.0 - u;
    const double den = 1.0 + v * t;
    const double num = u * v;
    const double x = num / den;
    return {x, v - x};
}

void hv_forward_batch(std::span<const double> x, std::span<const double> y,
                      std::span<double> u, std::span<double> v) {
    require_sizes(x.size(), y.size(), u.size(), v.size(), "hv_forward_batch");
    kernels::ops().hv_forward(x.data(), y.data(), u.data(), v.data(), x.size());
}

void hv_inverse_batch(std::span<const double> u, std::span<const double> v,
                      std::span<double> x, std::span<double> y) {
    require_sizes(u.size(), v.size(), x.size(), y.size(), "hv_inverse_batch");
    kernels::ops().hv_inverse(u.data(), v.data(), x.data(), y.data(), u.size());
}

void kv_forward_batch(std::span<const double> x, std::span<const double> y,
                      std::span<double> u, std::span<double> v) {
    require_sizes(x.size(), y.size(), u.size(), v.size(), "kv_forward_batch");
    kernels::ops().kv_forward(x.data(), y.data(), u.data(), v.data(), x.size());
}

void kv_inverse_batch(std::span<const double> u, std::span<const double> v,
                      std::span<double> x, std::span<double> y) {
    require_sizes(u.size(), v.size(), x.size(), y.size(), "kv_inverse_batch");
    kernels::ops().kv_inverse(u.data(), v.data(), x.data(), y.data(), u.size());
}

}  // namespace kummer::maps
