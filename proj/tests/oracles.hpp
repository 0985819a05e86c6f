#pragma once

// Test-only oracles, deliberately independent of the library's quadrature
// and special-function code paths.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracles {

// ---- adaptive Simpson ------------------------------------------------------
inline double simpson_step(const std::function<double(double)>& f, double a, double b,
                           double fa, double fm, double fb, double whole, double tol,
                           int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int max_depth = 48) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// ---- exponential integral E1 -----------------------------------------------
// E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k k!)   (x <= 6)
inline double expint_e1(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("expint_e1: x must be positive");
    constexpr double euler_gamma = 0.57721566490153286061;
    if (x <= 6.0) {
        double sum = 0.0, term = 1.0;
        for (int k = 1; k < 200; ++k) {
            term *= x / k;  // x^k / k!
            const double add = ((k & 1) ? term : -term) / k;
            sum += add;
            if (std::fabs(add) < 1e-18 * (std::fabs(sum) + 1.0)) break;
        }
        return -euler_gamma - std::log(x) + sum;
    }
    // Lentz continued fraction: E1(x) = e^{-x} / (x + 1/(1 + 1/(x + 2/(1 + ...))))
    double b = x + 1.0, c = 1e308, d = 1.0 / b, h = d;
    for (int i = 1; i <= 200; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x);
}

}  // namespace oracles
