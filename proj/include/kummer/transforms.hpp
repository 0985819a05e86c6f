#pragma once

#include <span>

namespace kummer::maps {

// one (x,y) / (u,v) point; for KV output `first` lies in (0,1)
struct PositivePair {
    double first, second;
};

enum class PairFamily { hv, kv };

// u = y/(1+x), v = x(1+u); conserves u+v = x+y
PositivePair hv_forward(double x, double y);
// x = v/(1+u), y = u(1+x)
PositivePair hv_inverse(double u, double v);
// v = x+y, u = x(1+v)/(v(1+x)) in (0,1) — the product form avoids the
// cancellation of the double-reciprocal expression for large x, v.
// Caveat: 1-u = y/(v(1+x)); when that quantity sinks below machine epsilon
// (pair magnitudes spread over ~16 decades) u rounds to exactly 1.0, and the
// (x,y)-side roundtrip conditions like eps*v.  Strictness and 1e-12
// roundtrips are guaranteed for pairs within a few decades of unity, which
// covers every sampled law in the verification suites.
PositivePair kv_forward(double x, double y);
// x = uv/(1+v(1-u)), y = v-x
PositivePair kv_inverse(double u, double v);

// batch variants run through the dispatched kernels; span lengths must all
// match (checked once per call), element domains are the caller's contract
void hv_forward_batch(std::span<const double> x, std::span<const double> y,
                      std::span<double> u, std::span<double> v);
void hv_inverse_batch(std::span<const double> u, std::span<const double> v,
                      std::span<double> x, std::span<double> y);
void kv_forward_batch(std::span<const double> x, std::span<const double> y,
                      std::span<double> u, std::span<double> v);
void kv_inverse_batch(std::span<const double> u, std::span<const double> v,
                      std::span<double> x, std::span<double> y);

}  // namespace kummer::maps
