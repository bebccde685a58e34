#pragma once

#include <cstdint>
#include <random>

namespace ftg {

using rng_type = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent per-run seeds from a
// master seed and a counter.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31U);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t counter) noexcept
{
    return mix_seed(mix_seed(master ^ mix_seed(stream)) + counter);
}

} // namespace ftg
