#pragma once

#include <cstddef>
#include <cstdint>

namespace kummer::kernels {

// Data-parallel inner loops with interchangeable backends.  Every backend is
// required to produce bit-identical results: reductions accumulate into four
// lanes (lane L takes elements with index ≡ L mod 4), combine as
// (acc0+acc1)+(acc2+acc3), then fold the remainder in index order; nothing
// may use fused multiply-add.  The elementwise transform kernels perform the
// same operations in the same order in all backends.
struct Ops {
    // u[i] = y[i]/(1+x[i]);  v[i] = x[i]*(1+u[i])
    void (*hv_forward)(const double* x, const double* y, double* u, double* v, std::size_t n);
    // x[i] = v[i]/(1+u[i]);  y[i] = u[i]*(1+x[i])
    void (*hv_inverse)(const double* u, const double* v, double* x, double* y, std::size_t n);
    // v[i] = x[i]+y[i];  u[i] = x[i]*(1+v[i]) / (v[i]*(1+x[i]))
    void (*kv_forward)(const double* x, const double* y, double* u, double* v, std::size_t n);
    // x[i] = u[i]*v[i]/(1 + v[i]*(1-u[i]));  y[i] = v[i]-x[i]
    void (*kv_inverse)(const double* u, const double* v, double* x, double* y, std::size_t n);

    double (*sum)(const double* a, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum_i a[i] * b[idx[i]]
    double (*dot_gather)(const double* a, const double* b, const std::int32_t* idx,
                         std::size_t n);
    // out[i] = |v[i] - center|
    void (*abs_dev)(const double* v, double center, double* out, std::size_t n);
};

enum class Backend { scalar, avx2 };

const Ops& scalar_ops();
namespace detail {
const Ops& avx2_ops();  // defined only in the AVX2 translation unit
}
bool avx2_available();          // compiled in and supported by this CPU
const Ops& ops();               // dispatched; honors KUMMER_KERNELS=scalar|avx2
Backend active_backend();
void force_backend(Backend b);  // test hook; throws DomainError if unavailable

}  // namespace kummer::kernels
