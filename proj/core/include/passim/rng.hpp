#pragma once

#include <cstdint>

namespace passim {

/// Counter-splittable 64-bit generator (splitmix64). Output is identical
/// on every platform, which keeps seeded experiments bit-reproducible and
/// lets parallel workers draw from independent, order-free streams.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double next_in(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

private:
    std::uint64_t state_;
};

/// Derives an independent stream seed from (master, a, b). Used to split
/// per-trial, per-particle, or per-iteration streams from one master seed.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t a,
                                std::uint64_t b = 0) {
    SplitMix64 h(master ^ (a * 0xd1342543de82ef95ULL) ^
                 (b * 0xaf251af3b0f025b5ULL));
    h.next_u64();
    return h.next_u64();
}

}  // namespace passim
