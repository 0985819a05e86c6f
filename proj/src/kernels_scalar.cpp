// Reference backend.  Compiled with -ffp-contract=off; the operation order
// here is the contract the vector backends must reproduce bit-for-bit.

#include <cmath>

#include "kummer/kernels.hpp"

namespace kummer::kernels {
namespace {

void hv_forward_k(const double* x, const double* y, double* u, double* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 1.0 + x[i];
        const double ui = y[i] / t;
        const double w = 1.0 + ui;
        u[i] = ui;
        v[i] = x[i] * w;
    }
}

void hv_inverse_k(const double* u, const double* v, double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 1.0 + u[i];
        const double xi = v[i] / t;
        const double w = 1.0 + xi;
        x[i] = xi;
        y[i] = u[i] * w;
    }
}

void kv_forward_k(const double* x, const double* y, double* u, double* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double vi = x[i] + y[i];
        const double num = x[i] * (1.0 + vi);
        const double den = vi * (1.0 + x[i]);
        u[i] = num / den;
        v[i] = vi;
    }
}

void kv_inverse_k(const double* u, const double* v, double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 1.0 - u[i];
        const double den = 1.0 + v[i] * t;
        const double num = u[i] * v[i];
        const double xi = num / den;
        x[i] = xi;
        y[i] = v[i] - xi;
    }
}

double sum_k(const double* a, std::size_t n) {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 += a[i];
        acc1 += a[i + 1];
        acc2 += a[i + 2];
        acc3 += a[i + 3];
    }
    double total = (acc0 + acc1) + (acc2 + acc3);
    for (; i < n; ++i) total += a[i];
    return total;
}

double dot_k(const double* a, const double* b, std::size_t n) {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 += a[i] * b[i];
        acc1 += a[i + 1] * b[i + 1];
        acc2 += a[i + 2] * b[i + 2];
        acc3 += a[i + 3] * b[i + 3];
    }
    double total = (acc0 + acc1) + (acc2 + acc3);
    for (; i < n; ++i) total += a[i] * b[i];
    return total;
}

double dot_gather_k(const double* a, const double* b, const std::int32_t* idx, std::size_t n) {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 += a[i] * b[idx[i]];
        acc1 += a[i + 1] * b[idx[i + 1]];
        acc2 += a[i + 2] * b[idx[i + 2]];
        acc3 += a[i + 3] * b[idx[i + 3]];
    }
    double total = (acc0 + acc1) + (acc2 + acc3);
    for (; i < n; ++i) total += a[i] * b[idx[i]];
    return total;
}

void abs_dev_k(const double* v, double center, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(v[i] - center);
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{hv_forward_k, hv_inverse_k, kv_forward_k, kv_inverse_k,
                         sum_k,        dot_k,        dot_gather_k, abs_dev_k};
    return ops;
}

}  // namespace kummer::kernels
