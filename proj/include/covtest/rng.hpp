#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace covtest {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31U);
}

/**
 * Counter-based stream split: a child seed is a pure function of the parent
 * seed and the key path, so any replicate can be regenerated in isolation.
 */
[[nodiscard]] constexpr std::uint64_t split_seed(std::uint64_t seed,
                                                 std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t s = mix64(seed);
    for (auto key : keys) {
        s = mix64(s ^ mix64(key + 0xD1B54A32D192ED03ULL));
    }
    return s;
}

[[nodiscard]] inline Engine make_engine(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32U)};
    return Engine(seq);
}

[[nodiscard]] inline Engine make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    return make_engine(split_seed(seed, keys));
}

// Domain tags separating streams that share a seed.
namespace stream_tag {
inline constexpr std::uint64_t npb = 0x4E5042;
inline constexpr std::uint64_t permutation = 0x5045524D;
inline constexpr std::uint64_t parametric = 0x5042;
inline constexpr std::uint64_t simulation = 0x53494D;
inline constexpr std::uint64_t method = 0x4D4554;
}  // namespace stream_tag

}  // namespace covtest
