#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "fdiv/distribution.hpp"

namespace fdx::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of substream `counter` under `master`: a pure function of both.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
    return splitmix64(splitmix64(master) ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
}

using Engine = std::mt19937_64;

inline Engine substream(std::uint64_t master, std::uint64_t counter) {
    return Engine(derive_seed(master, counter));
}

// The helpers below only use raw engine output, so draws are identical on
// every standard library (std distributions are implementation-defined).

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Engine& e) { return static_cast<double>(e() >> 11) * 0x1.0p-53; }

inline double uniform(Engine& e, double lo, double hi) { return lo + (hi - lo) * uniform01(e); }

// Uniform on {0, ..., n - 1}; n > 0.
inline std::uint64_t uniform_index(Engine& e, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do x = e();
    while (x >= limit);
    return x % n;
}

inline double exponential(Engine& e) { return -std::log1p(-uniform01(e)); }

// Flat Dirichlet(1, ..., 1) draw.
inline FiniteDistribution dirichlet(Engine& e, std::size_t n) {
    std::vector<double> w(n);
    double s = 0.0;
    do {
        s = 0.0;
        for (auto& x : w) s += (x = exponential(e));
    } while (!(s > 0.0));
    return FiniteDistribution::normalized(std::move(w));
}

// Index drawn from a finite distribution by inversion.
inline std::size_t categorical(Engine& e, const FiniteDistribution& d) {
    const double u = uniform01(e);
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] == 0.0) continue;
        last = i;
        acc += d[i];
        if (u < acc) return i;
    }
    return last;
}

}  // namespace fdx::rng
