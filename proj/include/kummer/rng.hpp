#pragma once

#include <cstdint>
#include <cmath>

namespace kummer::rng {

inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

// splitmix64 finalizer; also usable as a stateless 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives a 64-bit sub-stream key from (seed, stream, substream).  Pure
// mixing, so stream assignment is independent of thread scheduling: any
// worker asking for (seed, s, k) gets the same generator.
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream,
                                std::uint64_t substream = 0) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ mix64(stream ^ 0x9E3779B97F4A7C15ULL));
    h = mix64(h ^ mix64(substream ^ 0xD1B54A32D192ED03ULL));
    return h;
}

// xoshiro256++ seeded through a splitmix64 chain from a derived key.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0) {
        std::uint64_t s = derive_key(seed, stream, substream);
        for (auto& w : state_) {
            s += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = s;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            w = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform on the open interval (0,1); never returns 0 or 1
    double next_open01() {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
    }

    // standard normal via the Marsaglia polar method (second value cached)
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_open01() - 1.0;
            v = 2.0 * next_open01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace kummer::rng
