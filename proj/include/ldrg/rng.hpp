#pragma once

#include <cstdint>
#include <initializer_list>

namespace ldrg {

/// SplitMix64 generator. Chosen over std::mt19937 because the standard
/// distributions are not bit-reproducible across library implementations,
/// and because stream derivation (one independent chain per
/// (replication, subgraph) pair) needs a cheap, well-mixed seeding function.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Finalizer of SplitMix64; full-avalanche 64-bit mix.
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform on [0,1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n), unbiased (Lemire with rejection).
    std::uint64_t next_below(std::uint64_t n) {
        __uint128_t m = static_cast<__uint128_t>(next()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                m = static_cast<__uint128_t>(next()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::uint64_t state_;
};

/// Collapses (root_seed, tags...) into one stream seed. Order-sensitive,
/// so (seed, rep, subgraph) and (seed, subgraph, rep) differ.
inline std::uint64_t derive_stream(std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (std::uint64_t w : words) {
        h = Rng::mix(h ^ w);
        h = Rng::mix(h + 0x9e3779b97f4a7c15ULL);
    }
    return h;
}

} // namespace ldrg
