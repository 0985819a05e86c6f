#pragma once

#include "kummer/quadrature.hpp"

namespace kummer::specfun {

// log Gamma(x) for x > 0; thin wrapper over a Lanczos-type implementation.
double log_gamma(double x);

// Tricomi's confluent hypergeometric function
//   U(a,b,z) = (1/Gamma(a)) \int_0^inf e^{-zt} t^{a-1} (1+t)^{b-a-1} dt,
// valid for a > 0, z > 0, any real b.  tricomi_u returns the value,
// log_tricomi_u its logarithm without overflow for a up to ~300.
double tricomi_u(double a, double b, double z, const quad::QuadratureConfig& cfg = {});
double log_tricomi_u(double a, double b, double z, const quad::QuadratureConfig& cfg = {});

namespace detail {
// Same integral with the first fixed interior knot moved to `split`; the
// result must not depend on split (exercised by the invariance tests).
double log_tricomi_u_split(double a, double b, double z, double split,
                           const quad::QuadratureConfig& cfg = {});
}  // namespace detail

}  // namespace kummer::specfun
