#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace prodrisk {

/// SplitMix64 finalizer: a bijective 64-bit mixer.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the stream with the given index under a master seed. Distinct
/// indices give decorrelated seeds; the mapping is fixed forever so any
/// sample can be recomputed in isolation.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Pseudo-random stream for one simulation path. The variate transforms
/// are written out here instead of using <random> distributions, whose
/// algorithms differ between standard libraries.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    static RngStream for_sample(std::uint64_t master, std::uint64_t index) {
        return RngStream(derive_seed(master, index));
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Exponential with the given rate (mean 1 / rate).
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
    std::mt19937_64 engine_;
};

}  // namespace prodrisk
