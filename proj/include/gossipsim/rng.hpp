// Random streams and seed derivation.
//
// Every experiment is driven by a single 64-bit seed. Independent streams
// (graph generation, churn, endpoint selection, protocol coins) are derived
// from it with the splitmix64 finalizer, so adding draws to one stream never
// perturbs another.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <unordered_set>
#include <vector>

namespace gossipsim {

using Rng = std::mt19937_64;

/// splitmix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for the `stream`-th substream of `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(seed ^ mix64(stream + 0xD1B54A32D192ED03ULL));
}

enum class Stream : std::uint64_t {
    Graph = 1,
    Dynamics = 2,
    Endpoints = 3,
    Protocol = 4,
    Analysis = 5,
};

inline Rng make_rng(std::uint64_t seed, Stream stream) {
    return Rng{derive_seed(seed, static_cast<std::uint64_t>(stream))};
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>{0, n - 1}(rng);
}

inline bool bernoulli(Rng& rng, double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return std::bernoulli_distribution{p}(rng);
}

inline std::size_t binomial(Rng& rng, std::size_t trials, double p) {
    if (trials == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    return static_cast<std::size_t>(
        std::binomial_distribution<std::uint64_t>{trials, p}(rng));
}

/// `k` distinct indices drawn uniformly from [0, n), in draw order.
inline void sample_distinct(Rng& rng, std::size_t n, std::size_t k,
                            std::vector<std::size_t>& out) {
    out.clear();
    k = std::min(k, n);
    if (k == 0) return;
    if (k * 4 > n) {
        // Dense: partial Fisher-Yates.
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + uniform_index(rng, n - i);
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
        return;
    }
    std::unordered_set<std::size_t> taken;
    taken.reserve(k * 2);
    while (out.size() < k) {
        std::size_t i = uniform_index(rng, n);
        if (taken.insert(i).second) out.push_back(i);
    }
}

}  // namespace gossipsim
