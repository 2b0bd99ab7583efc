#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace teachable {

/// Uniform integer in [0, bound) from a 64-bit engine by rejection sampling.
/// Unlike std::uniform_int_distribution the result is the same on every
/// standard library.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - (~std::uint64_t{0} % bound));
    std::uint64_t x = rng();
    while (x >= limit)
        x = rng();
    return x % bound;
}

/// Portable Fisher-Yates shuffle.
template <typename T>
void seeded_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace teachable
