#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace fdx::search {

struct ScalarMin {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
};

inline constexpr double kInvPhi = 0.6180339887498948482;  // (sqrt(5) - 1) / 2

// Golden-section minimisation of f on [lo, hi]. f may return +inf; ties keep
// the left point. Stops when the bracket is narrower than x_tol or after
// max_iter iterations. Returns the best point evaluated, endpoints included.
template <class F>
ScalarMin golden_section_min(F&& f, double lo, double hi, double x_tol, int max_iter) {
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    ScalarMin best{c, fc, 0};
    auto consider = [&best](double x, double fx) {
        if (fx < best.fx) {
            best.x = x;
            best.fx = fx;
        }
    };
    consider(d, fd);
    int it = 0;
    for (; it < max_iter && (b - a) > x_tol; ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
            consider(c, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
            consider(d, fd);
        }
    }
    consider(lo, f(lo));
    consider(hi, f(hi));
    best.iterations = it;
    return best;
}

// Uniform grid scan followed by golden-section refinement between the
// neighbours of the best grid cell. Robust to +inf plateaus where plain golden
// section would lose the finite region.
template <class F>
ScalarMin scan_then_golden_min(F&& f, double lo, double hi, int grid_points, double x_tol,
                               int max_iter) {
    grid_points = std::max(grid_points, 3);
    const double step = (hi - lo) / (grid_points - 1);
    int best_i = 0;
    double best_f = f(lo);
    for (int i = 1; i < grid_points; ++i) {
        const double fx = f(lo + step * i);
        if (fx < best_f) {
            best_f = fx;
            best_i = i;
        }
    }
    const double a = lo + step * std::max(best_i - 1, 0);
    const double b = lo + step * std::min(best_i + 1, grid_points - 1);
    ScalarMin refined = golden_section_min(f, a, b, x_tol, max_iter);
    const double grid_x = lo + step * best_i;
    if (best_f < refined.fx) {
        refined.x = grid_x;
        refined.fx = best_f;
    }
    return refined;
}

}  // namespace fdx::search
