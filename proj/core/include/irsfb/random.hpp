// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

#include "irsfb/tensor.hpp"

namespace irsfb {

using Rng = std::mt19937_64;

/// Circularly symmetric complex Gaussian with E|z|^2 = variance.
inline Complex complex_gaussian(Rng& rng, double variance = 1.0) {
    std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

inline CVector complex_gaussian_vector(Rng& rng, std::size_t n, double variance = 1.0) {
    CVector v(n);
    for (auto& z : v) z = complex_gaussian(rng, variance);
    return v;
}

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Order-sensitive hash of a list of words, used to derive per-trial seeds.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (auto w : words) h = mix64(h ^ mix64(w));
    return h;
}

/// FNV-1a, for folding short strings (scenario names) into a seed.
constexpr std::uint64_t hash_string(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace irsfb
