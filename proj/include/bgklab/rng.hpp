#pragma once

// Counter-based SplitMix64. Draw i of stream s is mix(seed + golden*(s*2^32 + i + 1)),
// so any draw can be recomputed without replaying the stream, and parallel
// instance generation is order-independent.

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace bgklab {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// The SplitMix64 finalizer.
inline std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : seed_(seed), base_(stream << 32) {}

    std::uint64_t at(std::uint64_t i) const noexcept {
        return splitmix64_mix(seed_ + kGolden * (base_ + i + 1));
    }

    std::uint64_t next() noexcept { return at(counter_++); }

    /// Uniform in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("SplitMix64::below: n = 0");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        for (;;) {
            const std::uint64_t v = next();
            if (v < limit) return v % n;
        }
    }

    /// Uniform in [0, 1) with 53 bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

/// m distinct residues from [lo, hi), by partial Fisher-Yates on the index range.
inline std::vector<std::uint32_t> sample_distinct(SplitMix64& rng, std::uint32_t lo, std::uint32_t hi,
                                                  std::size_t m) {
    if (hi < lo || m > hi - lo) throw std::invalid_argument("sample_distinct: m exceeds range");
    std::vector<std::uint32_t> pool(hi - lo);
    for (std::uint32_t i = 0; i < pool.size(); ++i) pool[i] = lo + i;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + rng.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    return pool;
}

}  // namespace bgklab
