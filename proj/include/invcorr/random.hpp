#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace invcorr {

using Rng = std::mt19937_64;

/// Seed of replica `k` under master seed `master`. Every parallel stream in the
/// toolkit is derived this way so results do not depend on the thread count.
[[nodiscard]] constexpr std::uint64_t replica_seed(std::uint64_t master, std::uint64_t k) noexcept {
    return master ^ k;
}

/// Independent stream for a named sub-task (a stock, an investor) under `master`:
/// FNV-1a of the label mixed through splitmix64.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view label) noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (const char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    std::uint64_t z = (master ^ h) + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace invcorr
