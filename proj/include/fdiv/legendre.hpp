#pragma once

#include <optional>

#include "fdiv/distribution.hpp"
#include "fdiv/ext_real.hpp"
#include "fdiv/generator.hpp"

namespace fdx {

// Legendre transform of nu -> D_f(nu, pi) at h, with its two upper bounds.
struct TransformReport {
    ExtReal exact = kPosInf;
    std::optional<double> c_star;
    // Maximiser with density f*'(h + c*) relative to pi.
    std::optional<FiniteDistribution> nu_star;
    ExtReal crude = kPosInf;
    std::optional<ExtReal> tight;   // only for generators in F_c
    std::optional<ExtReal> oracle;  // filled by callers that ran simplex_oracle
};

// Solves E_pi[f*'(h + c)] = 1 for c by geometric bracketing from c = 0
// (initial width 1, factor 2, at most 200 doublings) and bisection until
// |M(c) - 1| <= tol. exact = E_pi[f*(h + c*)] - c*.
//
// When the residual cannot be met because M jumps across 1, the infimum over
// c is still reported but nu_star stays empty. Without any bracket, exact is
// +inf. Throws UnsupportedGenerator for generators that are not strictly
// convex, NoConvergence if bisection stalls on a wide bracket.
TransformReport exact_transform(const Generator& g, const FiniteDistribution& pi,
                                const MeasurableFunction& h, double tol = 1e-12);

// E_pi[f*(h)]; +inf if any pi-charged term is +inf.
ExtReal crude_transform(const Generator& g, const FiniteDistribution& pi,
                        const MeasurableFunction& h);

// E_pi[f*(h)] + f'(m) - f*(f'(m)) with m = E_pi[f*'(h)], falling back to the
// crude value when m = +inf or when the correction is lost to cancellation
// (relative rounding error above 1e-8). Throws UnsupportedGenerator outside F_c.
ExtReal tight_transform(const Generator& g, const FiniteDistribution& pi,
                        const MeasurableFunction& h);

enum class OracleMode { grid, ascent };

// 1e-2 for n <= 4, 5e-2 for n <= 8.
double default_grid_resolution(std::size_t n);

inline constexpr std::size_t kMaxGridSupport = 8;

// Direct search for sup_nu E_nu[h] - D_f(nu, pi) over the simplex.
//
// grid: every lattice point nu = k / K with K = round(1 / resolution); n must
// not exceed kMaxGridSupport. ascent: exponentiated-gradient ascent from pi
// with step 1/sqrt(t), 1e4 iterations; `resolution` is ignored. Both return
// values of feasible points, so they never exceed the exact transform beyond
// rounding.
ExtReal simplex_oracle(const Generator& g, const FiniteDistribution& pi,
                       const MeasurableFunction& h, double resolution,
                       OracleMode mode = OracleMode::grid);

}  // namespace fdx
