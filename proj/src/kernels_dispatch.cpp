#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kummer/errors.hpp"
#include "kummer/kernels.hpp"

namespace kummer::kernels {

namespace {
std::atomic<const Ops*> g_forced{nullptr};

const Ops& env_dispatch() {
    const char* env = std::getenv("KUMMER_KERNELS");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) return scalar_ops();
        if (std::strcmp(env, "avx2") == 0) {
            if (!avx2_available())
                throw DomainError("KUMMER_KERNELS=avx2 but AVX2 is not available on this host");
            return detail::avx2_ops();
        }
        throw DomainError("KUMMER_KERNELS must be 'scalar' or 'avx2'");
    }
    return avx2_available() ? detail::avx2_ops() : scalar_ops();
}
}  // namespace

bool avx2_available() {
#if defined(KUMMER_KERNELS_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

#if !defined(KUMMER_KERNELS_HAVE_AVX2)
namespace detail {
const Ops& avx2_ops() { throw DomainError("AVX2 backend not compiled in"); }
}  // namespace detail
#endif

const Ops& ops() {
    const Ops* forced = g_forced.load(std::memory_order_acquire);
    if (forced != nullptr) return *forced;
    static const Ops& chosen = env_dispatch();
    return chosen;
}

Backend active_backend() { return &ops() == &scalar_ops() ? Backend::scalar : Backend::avx2; }

void force_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_available())
        throw DomainError("force_backend: AVX2 is not available on this host");
    g_forced.store(b == Backend::scalar ? &scalar_ops() : &detail::avx2_ops(),
                   std::memory_order_release);
}

}  // namespace kummer::kernels
