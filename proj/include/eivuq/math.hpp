#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <vector>

namespace eivuq {

using Rng = std::mt19937_64;

// logistic(t) = 1 / (1 + e^-t), sign-split so neither branch overflows.
inline double logistic(double t) {
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

// softplus(t) = ln(1 + e^t) without overflow for large |t|.
inline double softplus(double t) {
    if (t > 0.0) {
        return t + std::log1p(std::exp(-t));
    }
    return std::log1p(std::exp(t));
}

// Shannon entropy of a Bernoulli(p) in nats, with 0*ln(0) == 0.
inline double bernoulli_entropy(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log(p);
    if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
    return h;
}

// splitmix64 finalizer. Used for all seed derivation so that derived streams
// are order-independent and reproducible.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Derive the seed for sub-stream `stream` of a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master + (stream + 1) * 0x9E3779B97F4A7C15ULL);
}

// Uniform double in [0, 1) from the top 53 bits of the generator.
// std::uniform_real_distribution is implementation-defined; this is not.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

// Unbiased integer in [0, n) by rejection.
inline std::uint64_t bounded_uint(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = (UINT64_MAX / n) * n;
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % n;
}

// Standard normal via Box-Muller (one value per pair of uniforms).
inline double standard_normal(Rng& rng) {
    double u1 = uniform_unit(rng);
    while (u1 <= 0.0) u1 = uniform_unit(rng);
    const double u2 = uniform_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// Fisher-Yates with our own bounded sampler; std::shuffle is
// implementation-defined and would break cross-toolchain reproducibility.
template <typename T>
void shuffle_inplace(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(bounded_uint(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

inline constexpr std::uint64_t kFnvOffset = 0xCBF29CE484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001B3ULL;

inline std::uint64_t fnv1a64(const void* bytes, std::size_t len, std::uint64_t h = kFnvOffset) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    return h;
}

// Hash of a feature vector's bit patterns, e.g. to derive a per-query RNG.
inline std::uint64_t hash_doubles(const std::vector<double>& xs) {
    std::uint64_t h = kFnvOffset;
    for (double x : xs) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, sizeof bits);
        h = fnv1a64(&bits, sizeof bits, h);
    }
    return h;
}

} // namespace eivuq
