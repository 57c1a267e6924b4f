#include "fdiv/conjugate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdiv/scalar_search.hpp"

namespace fdx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxDoublings = 1000;
// Boundary case t == f'(inf): stop doubling at 2^64.
constexpr int kMaxBoundaryDoublings = 64;

}  // namespace

ConjugatePoint conjugate_search(const std::function<ExtReal(double)>& f, ExtReal fprime_at_inf,
                                double t, double tol) {
    if (t > fprime_at_inf.value()) return {kPosInf, kPosInf};

    auto objective = [&](double x) -> double {
        const ExtReal fx = f(x);
        if (fx.is_pos_inf()) return -kInf;
        return x * t - fx.value();
    };

    if (t == fprime_at_inf.value()) {
        // Objective is nondecreasing; its supremum is the limit along x = 2^k.
        // Increments that stop shrinking (logarithmic or faster growth) mean
        // divergence; increments below tolerance or rounding noise mean the
        // limit is reached.
        double x = 1.0;
        double prev = objective(x);
        double best = std::max(objective(0.0), prev);
        double best_x = objective(0.0) >= prev ? 0.0 : x;
        double prev_inc = -kInf;
        int steady = 0;
        for (int k = 0; k < kMaxBoundaryDoublings; ++k) {
            x *= 2.0;
            const double v = objective(x);
            const double inc = v - prev;
            prev = v;
            if (v > best) {
                best = v;
                best_x = x;
            }
            const ExtReal fx = f(x);
            const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                                 (std::abs(x * t) + (fx.is_finite() ? std::abs(fx.value()) : 0.0) + 1.0);
            if (inc <= std::max(tol * 1e-3, noise)) return {best, best_x <= 1.0 ? ExtReal(best_x) : kPosInf};
            steady = (prev_inc > 0.0 && inc >= 0.9 * prev_inc) ? steady + 1 : 0;
            if (steady >= 3) return {kPosInf, kPosInf};
            prev_inc = inc;
        }
        return {kPosInf, kPosInf};
    }

    double h = 1.0;
    double vh = objective(h);
    int k = 0;
    for (; k < kMaxDoublings; ++k) {
        const double v2 = objective(2.0 * h);
        if (v2 < vh) break;
        h *= 2.0;
        vh = v2;
    }
    if (k == kMaxDoublings) return {kPosInf, kPosInf};

    const double lo = (k == 0) ? 0.0 : 0.5 * h;
    const double hi = 2.0 * h;
    auto neg = [&](double x) { return -objective(x); };
    const auto m = search::golden_section_min(neg, lo, hi, 1e-13 * std::max(1.0, hi), 500);
    return {-m.fx, m.x};
}

ExtReal conjugate_numeric(const Generator& g, double t, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("conjugate_numeric: tol must be positive");
    auto f = [&g](double x) { return g.eval_f(x); };
    return conjugate_search(f, g.fprime_at_inf(), t, tol).value;
}

}  // namespace fdx
