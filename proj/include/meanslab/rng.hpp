#pragma once

#include <cstdint>

namespace meanslab {

/// splitmix64 state transition + output mix (Steele, Lea, Vigna).  Used both
/// as the sampling engine and as the stream-splitting function: every logical
/// worker k of a run seeded with s draws from SplitMix64(mix_seed(s, k)), so
/// results are a pure function of (seed, worker index) and never of the number
/// of OS threads that happened to execute the workers.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive an independent child seed for worker `index` of a run seeded with
/// `seed`.  Two finalizer passes keep child streams decorrelated even for
/// adjacent indices.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    std::uint64_t a = splitmix64_next(s);
    std::uint64_t b = splitmix64_next(s);
    return a ^ (b >> 17);
}

/// Minimal deterministic engine.  Not cryptographic; statistical quality is
/// ample for stratified falsification sampling.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    /// Uniform draw in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform draw in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Fair coin.
    bool flip() { return (next_u64() & 1ULL) != 0; }

private:
    std::uint64_t state_;
};

} // namespace meanslab
