#pragma once

#include <cstdint>
#include <limits>

namespace occsim {

/// Stream tags mixed into stream keys so that every consumer draws from an
/// independent sequence. Values are part of the on-disk reproducibility
/// contract and must never be renumbered.
enum class StreamTag : std::uint64_t {
    profile = 1,
    trace = 2,
    timer = 3,
    cache_replacement = 4,
    probe_order = 5,
    folds = 6,
    forest = 7,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stream key for (seed, a, b, tag):
///   k = mix64(seed); k = mix64(k ^ a); k = mix64(k ^ b); k = mix64(k ^ tag)
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                   StreamTag tag) noexcept {
    std::uint64_t k = mix64(seed);
    k = mix64(k ^ a);
    k = mix64(k ^ b);
    return mix64(k ^ static_cast<std::uint64_t>(tag));
}

/// xoshiro256** seeded from a single 64-bit key via SplitMix64. All derived
/// draws (uniform reals, bounded integers, normals) are implemented here
/// rather than through <random> distributions, whose outputs differ between
/// standard library implementations.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t key = 0) noexcept { seed(key); }

    void seed(std::uint64_t key) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return next(); }
    std::uint64_t next() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Uniform integer on [0, bound); bound must be > 0. Unbiased (Lemire).
    std::uint64_t below(std::uint64_t bound) noexcept;
    /// Uniform integer on the closed range [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept;
    /// Standard normal (Box-Muller, one value per call).
    double normal() noexcept;
    /// Standard normal truncated to [-limit, limit] by rejection.
    double truncated_normal(double limit) noexcept;
    /// Exponential with the given rate (> 0).
    double exponential(double rate) noexcept;

private:
    std::uint64_t s_[4]{};
};

}  // namespace occsim
