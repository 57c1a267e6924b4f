#include "fdiv/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fdiv/errors.hpp"

namespace fdx {

namespace {

constexpr int kMaxDoublings = 200;
constexpr int kMaxBisections = 2000;
constexpr int kAscentIterations = 10000;

// E_pi[f*'(h + c)]
ExtReal density_mass(const Generator& g, const FiniteDistribution& pi,
                     const MeasurableFunction& h, double c) {
    ExtSum s;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (pi[i] == 0.0) continue;
        s.add(pi[i] * g.eval_fstar_prime(h[i] + c));
    }
    return s.total();
}

// E_pi[f*(h + c)] - c
ExtReal dual_objective(const Generator& g, const FiniteDistribution& pi,
                       const MeasurableFunction& h, double c) {
    ExtSum s;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (pi[i] == 0.0) continue;
        s.add(pi[i] * g.eval_fstar(h[i] + c));
    }
    s.add(-c);
    return s.total();
}

}  // namespace

ExtReal crude_transform(const Generator& g, const FiniteDistribution& pi,
                        const MeasurableFunction& h) {
    require_same_support(pi.size(), h.size(), "crude_transform");
    return dual_objective(g, pi, h, 0.0);
}

ExtReal tight_transform(const Generator& g, const FiniteDistribution& pi,
                        const MeasurableFunction& h) {
    require_same_support(pi.size(), h.size(), "tight_transform");
    if (!g.in_fc()) throw UnsupportedGenerator("tight transform requires F_c: " + g.label());
    const ExtReal crude = crude_transform(g, pi, h);
    if (crude.is_pos_inf()) return crude;
    const ExtReal m = density_mass(g, pi, h, 0.0);
    if (m.is_pos_inf()) return crude;
    const ExtReal slope = g.eval_fprime(m.value());
    if (!slope.is_finite()) return crude;
    const ExtReal fs = g.eval_fstar(slope.value());
    if (!fs.is_finite()) return crude;
    const double out = crude.value() + slope.value() - fs.value();
    // crude and f*(slope) nearly cancel; past this point the difference is
    // rounding noise and the crude value is the honest answer
    const double err = 8.0 * std::numeric_limits<double>::epsilon() *
                       (std::abs(crude.value()) + std::abs(slope.value()) + std::abs(fs.value()));
    if (err > 1e-8 * (1.0 + std::abs(out))) return crude;
    return out;
}

TransformReport exact_transform(const Generator& g, const FiniteDistribution& pi,
                                const MeasurableFunction& h, double tol) {
    require_same_support(pi.size(), h.size(), "exact_transform");
    if (!(tol > 0.0)) throw std::invalid_argument("exact_transform: tol must be positive");
    if (!g.strictly_convex())
        throw UnsupportedGenerator("exact transform requires a strictly convex generator: " +
                                   g.label());

    TransformReport r;
    r.crude = crude_transform(g, pi, h);
    if (g.in_fc()) r.tight = tight_transform(g, pi, h);

    auto residual = [&](double c) { return density_mass(g, pi, h, c) - ExtReal(1.0); };

    // Bracket [lo, hi] with M(lo) < 1 <= M(hi).
    double lo = 0.0, hi = 0.0;
    const ExtReal r0 = residual(0.0);
    bool bracketed = false;
    double width = 1.0;
    if (r0 < ExtReal(0.0)) {
        lo = 0.0;
        for (int k = 0; k < kMaxDoublings && std::isfinite(width); ++k, width *= 2.0) {
            const double c = lo + width;
            if (residual(c) >= ExtReal(0.0)) {
                hi = c;
                bracketed = true;
                break;
            }
            lo = c;
        }
    } else {
        hi = 0.0;
        for (int k = 0; k < kMaxDoublings && std::isfinite(width); ++k, width *= 2.0) {
            const double c = hi - width;
            if (residual(c) < ExtReal(0.0)) {
                lo = c;
                bracketed = true;
                break;
            }
            hi = c;
        }
    }
    if (!bracketed) return r;

    double c_best = hi;
    bool converged = false;
    {
        const ExtReal rh = residual(hi);
        if (rh.is_finite() && std::abs(rh.value()) <= tol) {
            converged = true;
        }
    }
    for (int it = 0; !converged && it < kMaxBisections; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;  // bracket at machine resolution
        const ExtReal rm = residual(mid);
        if (rm.is_finite() && std::abs(rm.value()) <= tol) {
            c_best = mid;
            converged = true;
            break;
        }
        if (rm < ExtReal(0.0))
            lo = mid;
        else
            hi = mid;
        c_best = hi;
    }
    if (!converged) {
        const double spacing = std::nextafter(std::abs(lo), INFINITY) - std::abs(lo);
        if (hi - lo > 4.0 * std::max(spacing, std::numeric_limits<double>::denorm_min()))
            throw NoConvergence("exact_transform: bisection did not converge", lo, hi);
        // M jumps across 1 between two adjacent doubles; the infimum over c sits
        // at the jump. Report the better of the two sides.
        const ExtReal vlo = dual_objective(g, pi, h, lo);
        const ExtReal vhi = dual_objective(g, pi, h, hi);
        r.exact = min(vlo, vhi);
        r.c_star = vhi <= vlo ? hi : lo;
        return r;
    }

    r.c_star = c_best;
    r.exact = dual_objective(g, pi, h, c_best);

    std::vector<double> w(pi.size(), 0.0);
    double mass = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (pi[i] == 0.0) continue;
        const ExtReal d = g.eval_fstar_prime(h[i] + c_best);
        if (!d.is_finite()) {
            finite = false;
            break;
        }
        w[i] = pi[i] * d.value();
        mass += w[i];
    }
    if (finite && std::abs(mass - 1.0) <= 10.0 * tol) r.nu_star = FiniteDistribution::normalized(w);
    return r;
}

double default_grid_resolution(std::size_t n) { return n <= 4 ? 1e-2 : 5e-2; }

namespace {

ExtReal grid_oracle(const Generator& g, const FiniteDistribution& pi, const MeasurableFunction& h,
                    double resolution) {
    const std::size_t n = pi.size();
    if (n > kMaxGridSupport)
        throw std::invalid_argument("simplex_oracle: grid mode supports at most 8 atoms");
    const long k_total = std::max(1L, std::lround(1.0 / resolution));
    // term[i][k] = (k/K) h_i - pi_i f(k / (K pi_i)), the contribution of atom i
    std::vector<std::vector<double>> term(n, std::vector<double>(k_total + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (long k = 0; k <= k_total; ++k) {
            const double nu_i = static_cast<double>(k) / static_cast<double>(k_total);
            double v;
            if (pi[i] == 0.0) {
                v = k == 0 ? 0.0 : -INFINITY;
            } else {
                const ExtReal fk = g.eval_f(nu_i / pi[i]);
                v = fk.is_pos_inf() ? -INFINITY : nu_i * h[i] - pi[i] * fk.value();
            }
            term[i][k] = v;
        }
    }
    double best = -INFINITY;
    // Iterative enumeration of compositions of k_total into n parts.
    std::vector<long> parts(n, 0);
    std::vector<double> prefix(n + 1, 0.0);
    std::vector<long> remaining(n + 1, 0);
    remaining[0] = k_total;
    std::size_t depth = 0;
    parts[0] = -1;
    while (true) {
        if (depth == n - 1) {
            const long k = remaining[depth];
            const double v = prefix[depth] + term[depth][k];
            if (v > best) best = v;
            if (depth == 0) break;
            --depth;
            continue;
        }
        ++parts[depth];
        if (parts[depth] > remaining[depth]) {
            if (depth == 0) break;
            --depth;
            continue;
        }
        prefix[depth + 1] = prefix[depth] + term[depth][parts[depth]];
        remaining[depth + 1] = remaining[depth] - parts[depth];
        ++depth;
        if (depth < n - 1) parts[depth] = -1;
    }
    if (best == -INFINITY) return kNegInf;
    return best;
}

ExtReal ascent_oracle(const Generator& g, const FiniteDistribution& pi,
                      const MeasurableFunction& h) {
    const std::size_t n = pi.size();
    std::vector<double> nu(pi.weights().begin(), pi.weights().end());
    auto objective = [&](const std::vector<double>& v) -> double {
        ExtSum s;
        for (std::size_t i = 0; i < n; ++i) {
            if (pi[i] == 0.0) continue;
            s.add(v[i] * h[i]);
            s.add(-(pi[i] * g.eval_f(v[i] / pi[i])));
        }
        const ExtReal t = s.total();
        return t.value();
    };
    double best = objective(nu);
    std::vector<double> grad(n), next(n);
    for (int t = 1; t <= kAscentIterations; ++t) {
        double gmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pi[i] == 0.0) {
                grad[i] = 0.0;
                continue;
            }
            const ExtReal d = g.eval_fprime(nu[i] / pi[i]);
            grad[i] = h[i] - (d.is_finite() ? d.value() : (d.is_neg_inf() ? -1e6 : 1e6));
            gmax = std::max(gmax, std::abs(grad[i]));
        }
        if (gmax == 0.0) break;
        const double eta = 1.0 / (std::sqrt(static_cast<double>(t)) * std::max(1.0, gmax));
        double shift = -INFINITY;
        for (std::size_t i = 0; i < n; ++i)
            if (pi[i] > 0.0) shift = std::max(shift, eta * grad[i]);
        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] = pi[i] == 0.0 ? 0.0 : std::max(nu[i], 1e-300) * std::exp(eta * grad[i] - shift);
            z += next[i];
        }
        for (std::size_t i = 0; i < n; ++i) next[i] /= z;
        nu.swap(next);
        best = std::max(best, objective(nu));
    }
    return best;
}

}  // namespace

ExtReal simplex_oracle(const Generator& g, const FiniteDistribution& pi,
                       const MeasurableFunction& h, double resolution, OracleMode mode) {
    require_same_support(pi.size(), h.size(), "simplex_oracle");
    if (mode == OracleMode::ascent) return ascent_oracle(g, pi, h);
    if (!(resolution > 0.0) || !std::isfinite(resolution))
        throw std::invalid_argument("simplex_oracle: resolution must be positive");
    return grid_oracle(g, pi, h, resolution);
}

}  // namespace fdx
