// rng.hpp
// Seed derivation and the few sampling helpers used across the library.
// Every stream is a pure function of its seed words, independent of
// thread scheduling.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace chessprob {

using Rng = std::mt19937_64;

// Engine seeded from an arbitrary list of 64-bit words.
inline Rng make_stream(std::initializer_list<std::uint64_t> words) {
    std::vector<std::uint32_t> seq;
    seq.reserve(words.size() * 2);
    for (std::uint64_t w : words) {
        seq.push_back(static_cast<std::uint32_t>(w));
        seq.push_back(static_cast<std::uint32_t>(w >> 32));
    }
    std::seed_seq ss(seq.begin(), seq.end());
    return Rng(ss);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    Rng r = make_stream({master, index, 0x736565642d646572ULL});
    return r();
}

// Uniform in [0, 1) with 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Uniform in [0, n); unbiased by rejection.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// Index drawn with probability proportional to weights (non-negative, not all zero).
template <typename Range>
std::size_t weighted_index(Rng& rng, const Range& weights) {
    double total = 0;
    for (double w : weights)
        total += w;
    double u = uniform01(rng) * total;
    std::size_t i = 0, last = 0;
    for (double w : weights) {
        if (w > 0) {
            last = i;
            if (u < w)
                return i;
            u -= w;
        }
        ++i;
    }
    return last;
}

} // namespace chessprob
