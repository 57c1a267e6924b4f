#pragma once

// Random instance generators and independent reference computations shared by
// the unit tests and the acceptance binary.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "fdiv/distribution.hpp"

namespace fdx::testing {

inline std::mt19937_64 rng_for(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_int(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Dirichlet(alpha, ..., alpha) draw.
inline FiniteDistribution dirichlet(std::mt19937_64& rng, std::size_t n, double alpha = 1.0) {
    std::gamma_distribution<double> gam(alpha, 1.0);
    std::vector<double> w(n);
    for (;;) {
        double s = 0.0;
        for (auto& x : w) s += (x = gam(rng));
        if (s > 0.0) break;
    }
    return FiniteDistribution::normalized(std::move(w));
}

// Dirichlet draw with every weight at least floor / n before renormalising,
// so that density ratios stay bounded.
inline FiniteDistribution dirichlet_full_support(std::mt19937_64& rng, std::size_t n,
                                                 double floor = 0.05) {
    const auto d = dirichlet(rng, n);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = d[i] + floor / static_cast<double>(n);
    return FiniteDistribution::normalized(std::move(w));
}

inline MeasurableFunction uniform_function(std::mt19937_64& rng, std::size_t n, double lo,
                                           double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(rng, lo, hi);
    return MeasurableFunction(std::move(v));
}

// Plain double loop, no compensation: the reference for E_mu[h].
inline double naive_expectation(const FiniteDistribution& mu, const MeasurableFunction& h) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < mu.size(); ++i) s += static_cast<long double>(mu[i]) * h[i];
    return static_cast<double>(s);
}

// log E_pi[exp h] via log-sum-exp in long double.
inline double log_mean_exp(const FiniteDistribution& pi, const MeasurableFunction& h) {
    long double m = -INFINITY;
    for (std::size_t i = 0; i < pi.size(); ++i)
        if (pi[i] > 0.0) m = std::max<long double>(m, h[i]);
    long double s = 0.0L;
    for (std::size_t i = 0; i < pi.size(); ++i)
        if (pi[i] > 0.0) s += pi[i] * std::exp(static_cast<long double>(h[i]) - m);
    return static_cast<double>(m + std::log(s));
}

// sup_{x >= 0} (x t - f(x)) by brute force: dense log grid on (0, x_max] plus
// x = 0, then a local parabola-free refinement by shrinking the grid around
// the best cell. Only meant for well-behaved finite conjugates.
template <class F>
double brute_conjugate(F&& f, double t, double x_max = 1e4) {
    auto obj = [&](double x) { return x * t - f(x); };
    double best_x = 0.0, best = obj(0.0);
    const int n = 20000;
    const double lmin = std::log(1e-9), lmax = std::log(x_max);
    for (int i = 0; i <= n; ++i) {
        const double x = std::exp(lmin + (lmax - lmin) * i / n);
        const double v = obj(x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    double lo = best_x * std::exp(-(lmax - lmin) / n), hi = best_x * std::exp((lmax - lmin) / n);
    if (best_x == 0.0) {
        lo = 0.0;
        hi = 1e-9;
    }
    for (int round = 0; round < 60; ++round) {
        const int m = 50;
        double bx = lo;
        for (int i = 0; i <= m; ++i) {
            const double x = lo + (hi - lo) * i / m;
            const double v = obj(x);
            if (v > best) {
                best = v;
                bx = x;
            } else if (v == best) {
                bx = x;
            }
        }
        const double w = (hi - lo) / m;
        lo = std::max(0.0, bx - w);
        hi = bx + w;
    }
    return best;
}

}  // namespace fdx::testing
