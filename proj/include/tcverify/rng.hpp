#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace tcverify {

/// FNV-1a 64-bit hash; also used for input-file digests in config.json.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Counter-based deterministic generator. The stream is a pure function of
/// the key tuple (seed, sid, t0, lead, member) and the draw index, so member
/// m of key k gets identical values no matter the evaluation order or the
/// number of worker threads.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::string_view sid, std::int64_t t0, int lead_h, int member) {
        std::uint64_t h = mix(seed);
        h = mix(h ^ fnv1a64(sid));
        h = mix(h ^ static_cast<std::uint64_t>(t0));
        h = mix(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(lead_h)));
        h = mix(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(member)));
        key_ = h;
    }

    std::uint64_t next_u64() {
        return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform index in [0, n). Modulo bias is < n / 2^64, far below any
    /// tolerance used here.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(next_u64() % static_cast<std::uint64_t>(n));
    }

    /// Standard normal via Box-Muller; consumes two uniforms per call.
    double normal() {
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Rayleigh(sigma): radial distance of an isotropic 2-D Gaussian offset.
    double rayleigh(double sigma) {
        const double u = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        return sigma * std::sqrt(-2.0 * std::log(u));
    }

private:
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

} // namespace tcverify
