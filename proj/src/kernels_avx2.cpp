// AVX2 backend.  Compiled with -mavx2 -mno-fma -ffp-contract=off so the
// arithmetic matches the scalar reference exactly: same per-element operation
// order, 4-lane accumulators combined as (l0+l1)+(l2+l3), remainder in index
// order.

#if defined(__AVX2__)

#include <immintrin.h>

#include "kummer/kernels.hpp"

namespace kummer::kernels {
namespace {

const __m256d kOne = _mm256_set1_pd(1.0);

void hv_forward_k(const double* x, const double* y, double* u, double* v, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d yv = _mm256_loadu_pd(y + i);
        const __m256d t = _mm256_add_pd(kOne, xv);
        const __m256d uv = _mm256_div_pd(yv, t);
        const __m256d w = _mm256_add_pd(kOne, uv);
        _mm256_storeu_pd(u + i, uv);
        _mm256_storeu_pd(v + i, _mm256_mul_pd(xv, w));
    }
    for (; i < n; ++i) {
        const double t = 1.0 + x[i];
        const double ui = y[i] / t;
        const double w = 1.0 + ui;
        u[i] = ui;
        v[i] = x[i] * w;
    }
}

void hv_inverse_k(const double* u, const double* v, double* x, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d uv = _mm256_loadu_pd(u + i);
        const __m256d vv = _mm256_loadu_pd(v + i);
        const __m256d t = _mm256_add_pd(kOne, uv);
        const __m256d xv = _mm256_div_pd(vv, t);
        const __m256d w = _mm256_add_pd(kOne, xv);
        _mm256_storeu_pd(x + i, xv);
        _mm256_storeu_pd(y + i, _mm256_mul_pd(uv, w));
    }
    for (; i < n; ++i) {
        const double t = 1.0 + u[i];
        const double xi = v[i] / t;
        const double w = 1.0 + xi;
        x[i] = xi;
        y[i] = u[i] * w;
    }
}

void kv_forward_k(const double* x, const double* y, double* u, double* v, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d yv = _mm256_loadu_pd(y + i);
        const __m256d vv = _mm256_add_pd(xv, yv);
        const __m256d num = _mm256_mul_pd(xv, _mm256_add_pd(kOne, vv));
        const __m256d den = _mm256_mul_pd(vv, _mm256_add_pd(kOne, xv));
        _mm256_storeu_pd(u + i, _mm256_div_pd(num, den));
        _mm256_storeu_pd(v + i, vv);
    }
    for (; i < n; ++i) {
        const double vi = x[i] + y[i];
        const double num = x[i] * (1.0 + vi);
        const double den = vi * (1.0 + x[i]);
        u[i] = num / den;
        v[i] = vi;
    }
}

void kv_inverse_k(const double* u, const double* v, double* x, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d uv = _mm256_loadu_pd(u + i);
        const __m256d vv = _mm256_loadu_pd(v + i);
        const __m256d t = _mm256_sub_pd(kOne, uv);
        const __m256d den = _mm256_add_pd(kOne, _mm256_mul_pd(vv, t));
        const __m256d num = _mm256_mul_pd(uv, vv);
        const __m256d xv = _mm256_div_pd(num, den);
        _mm256_storeu_pd(x + i, xv);
        _mm256_storeu_pd(y + i, _mm256_sub_pd(vv, xv));
    }
    for (; i < n; ++i) {
        const double t = 1.0 - u[i];
        const double den = 1.0 + v[i] * t;
        const double num = u[i] * v[i];
        const double xi = num / den;
        x[i] = xi;
        y[i] = v[i] - xi;
    }
}

// (l0+l1)+(l2+l3), matching the scalar accumulator combine
double hsum(__m256d acc) {
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const double l0 = _mm_cvtsd_f64(lo);
    const double l1 = _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
    const double l2 = _mm_cvtsd_f64(hi);
    const double l3 = _mm_cvtsd_f64(_mm_unpackhi_pd(hi, hi));
    return (l0 + l1) + (l2 + l3);
}

double sum_k(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double total = hsum(acc);
    for (; i < n; ++i) total += a[i];
    return total;
}

double dot_k(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    double total = hsum(acc);
    for (; i < n; ++i) total += a[i] * b[i];
    return total;
}

double dot_gather_k(const double* a, const double* b, const std::int32_t* idx, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m128i iv = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
        const __m256d bv = _mm256_i32gather_pd(b, iv, 8);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), bv));
    }
    double total = hsum(acc);
    for (; i < n; ++i) total += a[i] * b[idx[i]];
    return total;
}

void abs_dev_k(const double* v, double center, double* out, std::size_t n) {
    const __m256d c = _mm256_set1_pd(center);
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFLL));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(v + i), c);
        _mm256_storeu_pd(out + i, _mm256_and_pd(d, mask));
    }
    for (; i < n; ++i) {
        const double d = v[i] - center;
        out[i] = d < 0.0 ? -d : d;
    }
}

}  // namespace

namespace detail {
const Ops& avx2_ops() {
    static const Ops ops{hv_forward_k, hv_inverse_k, kv_forward_k, kv_inverse_k,
                         sum_k,        dot_k,        dot_gather_k, abs_dev_k};
    return ops;
}
}  // namespace detail

}  // namespace kummer::kernels

#endif  // __AVX2__
