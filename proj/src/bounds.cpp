#include "fdiv/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fdiv/divergence.hpp"
#include "fdiv/legendre.hpp"
#include "fdiv/parallel.hpp"
#include "fdiv/random.hpp"
#include "fdiv/scalar_search.hpp"

namespace fdx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kGoldenIterations = 128;
constexpr double kLogLambdaLo = -13.815510557964274;  // log 1e-6
constexpr double kLogLambdaHi = 13.815510557964274;   // log 1e6

// E_pi[fn(h)] over the support of pi.
template <class Fn>
ExtReal pi_mean(const FiniteDistribution& pi, const MeasurableFunction& h, Fn&& fn) {
    ExtSum s;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (pi[i] == 0.0) continue;
        s.add(ExtReal(pi[i]) * fn(h[i]));
    }
    return s.total();
}

double mean_finite(const FiniteDistribution& pi, const MeasurableFunction& h) {
    return expectation(pi, h);
}

double range_scale(const FiniteDistribution& pi, const MeasurableFunction& h) {
    const double r = max_on_support(pi, h) - min_on_support(pi, h);
    return r > 0.0 ? r : 1.0;
}

// x^a for x >= 0 in the extended sense: 0^a = +inf for a < 0, inf^a = 0 for
// a < 0 and inf for a > 0.
ExtReal ext_pow(ExtReal x, double a) {
    if (x.is_pos_inf()) return a > 0.0 ? kPosInf : (a < 0.0 ? ExtReal(0.0) : ExtReal(1.0));
    const double v = x.value();
    if (v == 0.0) return a > 0.0 ? ExtReal(0.0) : (a < 0.0 ? kPosInf : ExtReal(1.0));
    return std::pow(v, a);
}

double log_mean_exp(const FiniteDistribution& pi, const MeasurableFunction& h, double lambda) {
    double m = -kInf;
    for (std::size_t i = 0; i < pi.size(); ++i)
        if (pi[i] > 0.0) m = std::max(m, lambda * h[i]);
    ExtSum s;
    for (std::size_t i = 0; i < pi.size(); ++i)
        if (pi[i] > 0.0) s.add(pi[i] * std::exp(lambda * h[i] - m));
    return m + std::log(s.total().value());
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

double default_p(BoundRow row) {
    switch (row) {
        case BoundRow::power_tight: return 1.5;
        case BoundRow::power: return 3.0;
        case BoundRow::power_sub1: return 0.5;
        case BoundRow::power_neg: return -1.0;
        case BoundRow::pearson_chi2: return 2.0;
        default: return std::numeric_limits<double>::quiet_NaN();
    }
}

void validate_p(BoundRow row, double p) {
    bool ok = true;
    switch (row) {
        case BoundRow::power_tight: ok = p > 1.0 && p <= 2.0; break;
        case BoundRow::power: ok = p > 1.0 && std::isfinite(p); break;
        case BoundRow::power_sub1: ok = p > 0.0 && p < 1.0; break;
        case BoundRow::power_neg: ok = p < 0.0 && std::isfinite(p); break;
        default: break;
    }
    if (!ok)
        throw std::invalid_argument("exponent p = " + std::to_string(p) + " is out of range for row " +
                                    std::string(to_string(row)));
}

// Row value with every parameter it needs present.
ExtReal row_value(const BoundSpec& s, const FiniteDistribution& pi, const MeasurableFunction& h,
                  ExtReal d) {
    if (d.is_pos_inf()) return kPosInf;
    const double dv = d.value();
    const double hmax = max_on_support(pi, h);
    const double cs = row_is_shifted(s.row) ? hmax + *s.c : 0.0;
    switch (s.row) {
        case BoundRow::kl: {
            const double lam = *s.lambda;
            return (log_mean_exp(pi, h, lam) + dv) / lam;
        }
        case BoundRow::power_tight: {
            const double p = row_p(s), q = p / (p - 1.0);
            const ExtReal a = pi_mean(pi, h, [&](double x) { return ExtReal(std::pow(std::max(x, 0.0), q - 1.0)); });
            const ExtReal b = pi_mean(pi, h, [&](double x) { return ExtReal(std::pow(std::max(x, 0.0), q)); });
            const double w = std::max(b.value() - std::pow(a.value(), p), 0.0);
            return std::pow(a.value(), p - 1.0) + std::pow(w, 1.0 / q) * std::pow(dv, 1.0 / p);
        }
        case BoundRow::power: {
            const double p = row_p(s), q = p / (p - 1.0);
            const double c = *s.c;
            const ExtReal b = pi_mean(pi, h, [&](double x) { return ExtReal(std::pow(std::max(x - c, 0.0), q)); });
            return c + std::pow(b.value(), 1.0 / q) * std::pow(1.0 + dv, 1.0 / p);
        }
        case BoundRow::pearson_chi2: {
            const double m = mean_finite(pi, h);
            const ExtReal pos = pi_mean(pi, h, [](double x) { return ExtReal(std::max(x, 0.0)); });
            const ExtReal var = pi_mean(pi, h, [&](double x) { return ExtReal((x - m) * (x - m)); });
            return pos + std::sqrt(var.value()) * std::sqrt(dv);
        }
        case BoundRow::power_sub1: {
            const double p = row_p(s), q = p / (p - 1.0);
            if (dv >= 1.0) return cs;
            const ExtReal b = pi_mean(pi, h, [&](double x) { return ext_pow(std::max(cs - x, 0.0), q); });
            return ExtReal(cs) - ext_pow(b, 1.0 / q) * std::pow(1.0 - dv, 1.0 / p);
        }
        case BoundRow::power_neg: {
            const double p = row_p(s), q = p / (p - 1.0);
            const ExtReal b = pi_mean(pi, h, [&](double x) { return ext_pow(std::max(cs - x, 0.0), q); });
            return ExtReal(cs) - ext_pow(b, 1.0 / q) * std::pow(1.0 + dv, 1.0 / p);
        }
        case BoundRow::total_variation: {
            const double g = *s.gamma;
            const ExtReal t = pi_mean(pi, h, [&](double x) { return ExtReal(std::max(x - hmax, -g)); });
            return ExtReal(hmax) + t + g * dv;
        }
        case BoundRow::squared_hellinger: {
            if (dv >= 1.0) return cs;
            const ExtReal b = pi_mean(pi, h, [&](double x) { return ext_pow(std::max(cs - x, 0.0), -1.0); });
            if (b.is_pos_inf()) return cs;
            return cs - (1.0 - dv) * (1.0 - dv) / b.value();
        }
        case BoundRow::reverse_pearson: {
            const ExtReal a = pi_mean(pi, h, [&](double x) { return ExtReal(std::sqrt(std::max(cs - x, 0.0))); });
            return cs - a.value() * a.value() / (1.0 + dv);
        }
        case BoundRow::reverse_kl: {
            const ExtReal g = pi_mean(pi, h, [&](double x) -> ExtReal {
                const double u = std::max(cs - x, 0.0);
                return u == 0.0 ? kNegInf : ExtReal(std::log(u));
            });
            if (g.is_neg_inf()) return cs;
            return cs - std::exp(g.value() - dv);
        }
        case BoundRow::lin:
        case BoundRow::jensen_shannon: {
            const double lam = *s.lambda;
            const double theta = row_theta(s);
            // log(1 - exp(lambda (h - c') / theta)) <= 0, -inf where h = c'
            auto log_term = [&](double x) -> ExtReal {
                const double e = -std::expm1(lam * (x - cs) / theta);
                return e <= 0.0 ? kNegInf : ExtReal(std::log(e));
            };
            const ExtReal m = pi_mean(pi, h, log_term);
            if (m.is_neg_inf()) return kPosInf;
            if (s.row == BoundRow::jensen_shannon) return cs - 0.5 * m.value() / lam + dv / lam;
            const double konst = (1.0 - theta) * std::log1p(-theta) - theta * std::log(theta);
            return cs - (1.0 - theta) * m.value() / lam + (dv + konst) / lam;
        }
        case BoundRow::vincze_lecam: {
            const ExtReal a = pi_mean(pi, h, [&](double x) { return ExtReal(std::sqrt(std::max(cs - x, 0.0))); });
            return 2.0 * cs - mean_finite(pi, h) - 4.0 * a.value() * a.value() / (2.0 + dv);
        }
    }
    return kPosInf;
}

search::ScalarMin minimize_axis(const std::function<double(double)>& f, double lo, double hi) {
    const double tol = 1e-13 * std::max({1.0, std::abs(lo), std::abs(hi)});
    return search::scan_then_golden_min(f, lo, hi, 33, tol, kGoldenIterations);
}

struct Point2 {
    double u = 0.0, v = 0.0, f = kInf;
};

// Coarse grid, then coordinate golden-section passes, accepting only
// improvements; seeds are extra starting candidates.
Point2 minimize_2d(const std::function<double(double, double)>& f, double ulo, double uhi,
                   double vlo, double vhi, std::span<const Point2> seeds) {
    constexpr int kGrid = 25;
    constexpr int kRounds = 40;
    Point2 best;
    for (int i = 0; i < kGrid; ++i) {
        const double u = ulo + (uhi - ulo) * i / (kGrid - 1);
        for (int j = 0; j < kGrid; ++j) {
            const double v = vlo + (vhi - vlo) * j / (kGrid - 1);
            const double fv = f(u, v);
            if (fv < best.f) best = {u, v, fv};
        }
    }
    for (const auto& s : seeds) {
        const double fv = f(s.u, s.v);
        if (fv < best.f) best = {s.u, s.v, fv};
    }
    if (!(best.f < kInf)) return best;
    for (int round = 0; round < kRounds; ++round) {
        const double before = best.f;
        const double lo_u = std::min(ulo, best.u), hi_u = std::max(uhi, best.u);
        const auto ru = minimize_axis([&](double u) { return f(u, best.v); }, lo_u, hi_u);
        if (ru.fx < best.f) best = {ru.x, best.v, ru.fx};
        const double lo_v = std::min(vlo, best.v), hi_v = std::max(vhi, best.v);
        const auto rv = minimize_axis([&](double v) { return f(best.u, v); }, lo_v, hi_v);
        if (rv.fx < best.f) best = {best.u, rv.x, rv.fx};
        if (!(before - best.f > 1e-15 * (1.0 + std::abs(best.f)))) break;
    }
    return best;
}

double as_double(ExtReal x) { return x.value(); }

// Bracket for c > 0 on a log scale, relative to the spread of h.
std::pair<double, double> log_c_box(const FiniteDistribution& pi, const MeasurableFunction& h) {
    const double s = range_scale(pi, h);
    return {std::log(1e-9 * s), std::log(1e6 * s)};
}

BoundSpec resolve(const BoundSpec& in, const FiniteDistribution& pi, const MeasurableFunction& h,
                  ExtReal d) {
    BoundSpec s = in;
    const RowParameters need = row_parameters(s.row);
    if (!need.lambda) s.lambda.reset();
    if (!need.c) s.c.reset();
    if (!need.gamma) s.gamma.reset();
    if (s.lambda) require_positive(*s.lambda, "lambda");
    if (s.gamma) require_positive(*s.gamma, "gamma");
    if (s.c) {
        require_finite(*s.c, "c");
        if (s.row == BoundRow::power_neg && *s.c < 0.0)
            throw std::invalid_argument("c must be >= 0 for row power_neg");
        if (row_is_shifted(s.row) && s.row != BoundRow::power_neg && !(*s.c > 0.0))
            throw std::invalid_argument("c must be > 0 for row " + std::string(to_string(s.row)));
    }
    const bool all_set = (!need.lambda || s.lambda) && (!need.c || s.c) && (!need.gamma || s.gamma);
    if (all_set || d.is_pos_inf()) {
        // placeholders so that row_value never dereferences an empty optional
        if (need.lambda && !s.lambda) s.lambda = 1.0;
        if (need.gamma && !s.gamma) s.gamma = 1.0;
        if (need.c && !s.c) s.c = row_is_shifted(s.row) ? 1.0 : 0.0;
        return s;
    }

    auto value_with = [&](BoundSpec t) { return as_double(row_value(t, pi, h, d)); };

    switch (s.row) {
        case BoundRow::kl: {
            const auto r = minimize_axis(
                [&](double u) {
                    BoundSpec t = s;
                    t.lambda = std::exp(u);
                    return value_with(t);
                },
                kLogLambdaLo, kLogLambdaHi);
            s.lambda = std::exp(r.x);
            break;
        }
        case BoundRow::power: {
            const double lo = min_on_support(pi, h) - 5.0 * range_scale(pi, h);
            const double hi = max_on_support(pi, h);
            const auto r = minimize_axis(
                [&](double c) {
                    BoundSpec t = s;
                    t.c = c;
                    return value_with(t);
                },
                lo, hi);
            s.c = r.x;
            break;
        }
        case BoundRow::total_variation: {
            // Piecewise linear and convex in gamma with breakpoints h_max - h_i;
            // as gamma -> 0 the value tends to h_max.
            const double hmax = max_on_support(pi, h);
            double best_g = 0.0, best_v = hmax;
            for (std::size_t i = 0; i < pi.size(); ++i) {
                if (pi[i] == 0.0) continue;
                const double g = hmax - h[i];
                if (!(g > 0.0)) continue;
                BoundSpec t = s;
                t.gamma = g;
                const double v = value_with(t);
                if (v < best_v || (v == best_v && best_g == 0.0)) {
                    best_v = v;
                    best_g = g;
                }
            }
            if (best_g == 0.0) {
                // no breakpoint beats the limit: take a gamma small enough that
                // the value is h_max to rounding
                best_g = 1e-12 * range_scale(pi, h);
            }
            s.gamma = best_g;
            break;
        }
        case BoundRow::power_sub1:
        case BoundRow::power_neg:
        case BoundRow::squared_hellinger:
        case BoundRow::reverse_pearson:
        case BoundRow::reverse_kl:
        case BoundRow::vincze_lecam: {
            const auto [lo, hi] = log_c_box(pi, h);
            const auto r = minimize_axis(
                [&](double v) {
                    BoundSpec t = s;
                    t.c = std::exp(v);
                    return value_with(t);
                },
                lo, hi);
            s.c = std::exp(r.x);
            if (s.row == BoundRow::power_neg) {
                BoundSpec t = s;
                t.c = 0.0;
                if (value_with(t) <= r.fx) s.c = 0.0;
            }
            break;
        }
        case BoundRow::lin:
        case BoundRow::jensen_shannon: {
            const auto [lo, hi] = log_c_box(pi, h);
            auto f = [&](double u, double v) {
                BoundSpec t = s;
                t.lambda = s.lambda ? *s.lambda : std::exp(u);
                t.c = s.c ? *s.c : std::exp(v);
                return value_with(t);
            };
            const auto best = minimize_2d(f, kLogLambdaLo, kLogLambdaHi, lo, hi, {});
            if (!s.lambda) s.lambda = std::exp(best.u);
            if (!s.c) s.c = std::exp(best.v);
            break;
        }
        case BoundRow::power_tight:
        case BoundRow::pearson_chi2:
            break;
    }
    return s;
}

Generator row_bound_generator(const BoundSpec& spec) {
    if (spec.row == BoundRow::vincze_lecam)
        return extended_generator(make_generator("vincze_lecam"), Extension::analytic);
    return row_generator(spec);
}

BoundMode row_mode(BoundRow row) {
    switch (row) {
        case BoundRow::kl:
        case BoundRow::power_tight:
        case BoundRow::pearson_chi2: return BoundMode::tight;
        default: return BoundMode::crude;
    }
}

}  // namespace

std::string_view to_string(BoundRow row) {
    switch (row) {
        case BoundRow::kl: return "kl";
        case BoundRow::power_tight: return "power_tight";
        case BoundRow::power: return "power";
        case BoundRow::pearson_chi2: return "pearson_chi2";
        case BoundRow::power_sub1: return "power_sub1";
        case BoundRow::power_neg: return "power_neg";
        case BoundRow::total_variation: return "total_variation";
        case BoundRow::squared_hellinger: return "squared_hellinger";
        case BoundRow::reverse_pearson: return "reverse_pearson";
        case BoundRow::reverse_kl: return "reverse_kl";
        case BoundRow::lin: return "lin";
        case BoundRow::jensen_shannon: return "jensen_shannon";
        case BoundRow::vincze_lecam: return "vincze_lecam";
    }
    return "kl";
}

BoundRow parse_row(std::string_view name) {
    for (BoundRow r : kAllRows)
        if (to_string(r) == name) return r;
    throw std::invalid_argument("unknown bound row '" + std::string(name) + "'");
}

RowParameters row_parameters(BoundRow row) {
    switch (row) {
        case BoundRow::kl: return {true, false, false};
        case BoundRow::power_tight:
        case BoundRow::pearson_chi2: return {false, false, false};
        case BoundRow::total_variation: return {false, false, true};
        case BoundRow::lin:
        case BoundRow::jensen_shannon: return {true, true, false};
        default: return {false, true, false};
    }
}

bool row_is_shifted(BoundRow row) {
    switch (row) {
        case BoundRow::power_sub1:
        case BoundRow::power_neg:
        case BoundRow::squared_hellinger:
        case BoundRow::reverse_pearson:
        case BoundRow::reverse_kl:
        case BoundRow::lin:
        case BoundRow::jensen_shannon:
        case BoundRow::vincze_lecam: return true;
        default: return false;
    }
}

bool row_has_lambda_formula(BoundRow row) {
    switch (row) {
        case BoundRow::kl:
        case BoundRow::total_variation:
        case BoundRow::lin:
        case BoundRow::jensen_shannon: return false;
        default: return true;
    }
}

double row_p(const BoundSpec& spec) {
    if (spec.row == BoundRow::pearson_chi2) return 2.0;
    const double p = spec.p.value_or(default_p(spec.row));
    validate_p(spec.row, p);
    return p;
}

double row_theta(const BoundSpec& spec) {
    if (spec.row == BoundRow::jensen_shannon) return 0.5;
    const double theta = spec.theta.value_or(0.3);
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
    return theta;
}

Generator row_generator(const BoundSpec& spec) {
    switch (spec.row) {
        case BoundRow::kl: return make_generator("kl");
        case BoundRow::power_tight:
        case BoundRow::power:
        case BoundRow::power_sub1:
        case BoundRow::power_neg: return make_generator("power", {row_p(spec)});
        case BoundRow::pearson_chi2: return make_generator("pearson_chi2");
        case BoundRow::total_variation: return make_generator("total_variation");
        case BoundRow::squared_hellinger: return make_generator("squared_hellinger");
        case BoundRow::reverse_pearson: return make_generator("reverse_pearson");
        case BoundRow::reverse_kl: return make_generator("reverse_kl");
        case BoundRow::lin: return make_generator("lin", {row_theta(spec)});
        case BoundRow::jensen_shannon: return make_generator("jensen_shannon");
        case BoundRow::vincze_lecam: return make_generator("vincze_lecam");
    }
    return make_generator("kl");
}

BoundResult eval_bound(const BoundSpec& spec, const FiniteDistribution& pi,
                       const MeasurableFunction& h, ExtReal d_value) {
    require_same_support(pi.size(), h.size(), "eval_bound");
    if (d_value < ExtReal(0.0)) throw std::invalid_argument("d_value must be >= 0");
    (void)row_generator(spec);  // validates p and theta
    BoundResult r;
    r.row = spec.row;
    r.divergence_value = d_value;
    r.spec_used = resolve(spec, pi, h, d_value);
    r.value = row_value(r.spec_used, pi, h, d_value);
    return r;
}

BoundResult eval_bound_for(const BoundSpec& spec, const FiniteDistribution& pi,
                           const MeasurableFunction& h, const FiniteDistribution& nu) {
    require_same_support(pi.size(), nu.size(), "eval_bound_for");
    return eval_bound(spec, pi, h, f_divergence(row_generator(spec), nu, pi));
}

ExtReal free_objective(const Generator& g, const FiniteDistribution& pi,
                       const MeasurableFunction& h, ExtReal d_value, BoundMode mode,
                       double lambda, double c) {
    require_positive(lambda, "lambda");
    if (d_value.is_pos_inf()) return kPosInf;
    std::vector<double> scaled_h(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) scaled_h[i] = lambda * (h[i] - c);
    const MeasurableFunction hs(std::move(scaled_h));
    const ExtReal b = mode == BoundMode::tight ? tight_transform(g, pi, hs) : crude_transform(g, pi, hs);
    return ExtReal(c) + (b + d_value) / ExtReal(lambda);
}

ExtReal parametric_bound(const BoundSpec& spec, const FiniteDistribution& pi,
                         const MeasurableFunction& h, ExtReal d_value, double lambda) {
    const double c0 = spec.c.value_or(0.0);
    const double c = row_is_shifted(spec.row) ? max_on_support(pi, h) + c0 : c0;
    return free_objective(row_bound_generator(spec), pi, h, d_value, row_mode(spec.row), lambda, c);
}

ExtReal optimal_lambda(const BoundSpec& spec, const FiniteDistribution& pi,
                       const MeasurableFunction& h, ExtReal d_value) {
    if (!row_has_lambda_formula(spec.row))
        throw std::invalid_argument("row " + std::string(to_string(spec.row)) +
                                    " has no closed-form optimal scale");
    if (d_value < ExtReal(0.0)) throw std::invalid_argument("d_value must be >= 0");
    if (d_value.is_pos_inf()) return 0.0;
    const double d = d_value.value();
    const double c0 = spec.c.value_or(0.0);
    const double cs = row_is_shifted(spec.row) ? max_on_support(pi, h) + c0 : c0;
    auto ratio_pow = [](ExtReal num, ExtReal den, double e) -> ExtReal {
        if (den == ExtReal(0.0)) return kPosInf;
        return ext_pow(num / den, e);
    };
    switch (spec.row) {
        case BoundRow::power_tight:
        case BoundRow::pearson_chi2: {
            const double p = row_p(spec), q = p / (p - 1.0);
            const ExtReal a = pi_mean(pi, h, [&](double x) { return ExtReal(std::pow(std::max(x - cs, 0.0), q / p)); });
            const ExtReal b = pi_mean(pi, h, [&](double x) { return ExtReal(std::pow(std::max(x - cs, 0.0), q)); });
            const double w = std::max(b.value() - std::pow(a.value(), p), 0.0);
            return ExtReal(p) * ratio_pow(d, w, 1.0 / q);
        }
        case BoundRow::power: {
            const double p = row_p(spec), q = p / (p - 1.0);
            const ExtReal b = pi_mean(pi, h, [&](double x) { return ExtReal(std::pow(std::max(x - cs, 0.0), q)); });
            return ExtReal(p) * ratio_pow(1.0 + d, b, 1.0 / q);
        }
        case BoundRow::power_sub1: {
            const double p = row_p(spec), q = p / (p - 1.0);
            if (d >= 1.0) return kPosInf;
            const ExtReal b = pi_mean(pi, h, [&](double x) { return ext_pow(std::max(cs - x, 0.0), q); });
            if (b.is_pos_inf()) return kPosInf;
            return ExtReal(p) * ext_pow((1.0 - d) / b.value(), 1.0 / q);
        }
        case BoundRow::power_neg: {
            const double p = row_p(spec), q = p / (p - 1.0);
            const ExtReal b = pi_mean(pi, h, [&](double x) { return ext_pow(std::max(cs - x, 0.0), q); });
            return ExtReal(-p) * ratio_pow(1.0 + d, b, 1.0 / q);
        }
        case BoundRow::squared_hellinger: {
            if (d >= 1.0) return kPosInf;
            const ExtReal b = pi_mean(pi, h, [&](double x) { return ext_pow(std::max(cs - x, 0.0), -1.0); });
            return b / ExtReal(2.0 * (1.0 - d));
        }
        case BoundRow::reverse_pearson: {
            const ExtReal a = pi_mean(pi, h, [&](double x) { return ExtReal(std::sqrt(std::max(cs - x, 0.0))); });
            return ratio_pow(1.0 + d, a, 2.0);
        }
        case BoundRow::reverse_kl: {
            const ExtReal g = pi_mean(pi, h, [&](double x) -> ExtReal {
                const double u = std::max(cs - x, 0.0);
                return u == 0.0 ? kNegInf : ExtReal(std::log(u));
            });
            if (g.is_neg_inf()) return kPosInf;
            return std::exp(d - g.value());
        }
        case BoundRow::vincze_lecam: {
            const ExtReal a = pi_mean(pi, h, [&](double x) { return ExtReal(std::sqrt(std::max(cs - x, 0.0))); });
            return ratio_pow(1.0 + 0.5 * d, a, 2.0);
        }
        default: break;
    }
    throw std::invalid_argument("row has no closed-form optimal scale");
}

OptimizedBound optimize_free_params(const Generator& g, const FiniteDistribution& pi,
                                    const MeasurableFunction& h, ExtReal d_value, BoundMode mode,
                                    std::span<const FreeParams> seeds) {
    require_same_support(pi.size(), h.size(), "optimize_free_params");
    if (mode == BoundMode::tight && !g.in_fc())
        throw std::invalid_argument("tight mode requires a generator in F_c");
    OptimizedBound out;
    if (d_value.is_pos_inf()) return out;
    const double r = range_scale(pi, h);
    const double clo = min_on_support(pi, h) - 5.0 * r;
    const double chi = max_on_support(pi, h) + 5.0 * r;
    auto f = [&](double u, double c) {
        return as_double(free_objective(g, pi, h, d_value, mode, std::exp(u), c));
    };
    std::vector<Point2> starts;
    for (const auto& s : seeds) {
        require_positive(s.lambda, "seed lambda");
        starts.push_back({std::log(s.lambda), s.c, kInf});
    }
    const auto best = minimize_2d(f, kLogLambdaLo, kLogLambdaHi, clo, chi, starts);
    if (!(best.f < kInf)) return out;
    out.value = best.f;
    out.params = {std::exp(best.u), best.v};
    return out;
}

ExtReal vincze_lecam_refined(const FiniteDistribution& pi, const MeasurableFunction& h,
                             ExtReal d_value, double C, double lambda) {
    require_same_support(pi.size(), h.size(), "vincze_lecam_refined");
    require_positive(lambda, "lambda");
    require_finite(C, "C");
    if (C < max_on_support(pi, h)) throw std::invalid_argument("C must be >= h_max");
    if (d_value < ExtReal(0.0)) throw std::invalid_argument("d_value must be >= 0");
    if (d_value.is_pos_inf()) return kPosInf;
    const ExtReal m = pi_mean(pi, h, [&](double x) -> ExtReal {
        if (x < C - 4.0 / lambda) return 0.0;
        const double u = lambda * (C - x);
        return 4.0 - 4.0 * std::sqrt(u) + u;
    });
    return C + (m.value() + d_value.value() - 2.0) / lambda;
}

ExtReal hostile_bound(const FiniteDistribution& pi, const MeasurableFunction& h,
                      const FiniteDistribution& nu) {
    require_same_support(pi.size(), h.size(), "hostile_bound");
    require_same_support(pi.size(), nu.size(), "hostile_bound");
    for (double x : h.values())
        if (x < 0.0) throw std::invalid_argument("hostile_bound requires h >= 0");
    for (std::size_t i = 0; i < pi.size(); ++i)
        if (pi[i] == 0.0 && nu[i] > 0.0) return kPosInf;
    auto xlogx = [](double x) { return x == 0.0 ? 0.0 : x * std::log(x); };
    const double ent = pi_mean(pi, h, [&](double x) { return ExtReal(xlogx(x)); }).value();
    const double mean = expectation(pi, h);
    // log E_pi[exp(dnu/dpi)], shifted by the largest density for stability
    double dmax = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i)
        if (pi[i] > 0.0) dmax = std::max(dmax, nu[i] / pi[i]);
    ExtSum s;
    for (std::size_t i = 0; i < pi.size(); ++i)
        if (pi[i] > 0.0) s.add(pi[i] * std::exp(nu[i] / pi[i] - dmax));
    const double lme = dmax + std::log(s.total().value());
    return ent - xlogx(mean) + mean * lme;
}

namespace {

BoundSpec random_spec(BoundRow row, rng::Engine& e, bool auto_params) {
    BoundSpec s;
    s.row = row;
    switch (row) {
        case BoundRow::power_tight: s.p = rng::uniform(e, 1.05, 2.0); break;
        case BoundRow::power: s.p = rng::uniform(e, 1.05, 4.0); break;
        case BoundRow::power_sub1: s.p = rng::uniform(e, 0.05, 0.95); break;
        case BoundRow::power_neg: s.p = rng::uniform(e, -3.0, -0.1); break;
        case BoundRow::lin: s.theta = rng::uniform(e, 0.05, 0.95); break;
        default: break;
    }
    const RowParameters need = row_parameters(row);
    const double lam = std::exp(rng::uniform(e, -3.0, 3.0));
    const double c_any = rng::uniform(e, -2.0, 2.0);
    const double c_pos = std::exp(rng::uniform(e, -5.0, 2.0));
    const double gam = std::exp(rng::uniform(e, -3.0, 2.0));
    if (auto_params) return s;
    if (need.lambda) s.lambda = lam;
    if (need.c) s.c = row_is_shifted(row) ? c_pos : c_any;
    if (need.gamma) s.gamma = gam;
    return s;
}

MeasurableFunction random_h(rng::Engine& e, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng::uniform(e, -2.0, 2.0);
    return MeasurableFunction(std::move(v));
}

struct DominanceOutcome {
    std::size_t checks = 0;
    std::size_t violations = 0;
};

DominanceOutcome dominance_instance(std::uint64_t seed) {
    static const std::vector<Generator> gens = {make_generator("kl"), make_generator("power", {1.5}),
                                                make_generator("pearson_chi2")};
    auto e = rng::Engine(seed);
    const std::size_t n = 1 + rng::uniform_index(e, 4);
    const auto pi = rng::dirichlet(e, n);
    const auto h = random_h(e, n);
    DominanceOutcome out;
    for (const auto& g : gens) {
        const auto r = exact_transform(g, pi, h);
        const ExtReal oracle = simplex_oracle(g, pi, h, default_grid_resolution(n));
        ++out.checks;
        const bool ok = oracle <= r.exact + ExtReal(5e-3) && r.exact <= *r.tight + ExtReal(1e-8) &&
                        *r.tight <= r.crude + ExtReal(1e-8);
        if (!ok) ++out.violations;
    }
    return out;
}

}  // namespace

SweepSummary soundness_sweep(std::span<const BoundRow> rows, std::size_t instances,
                             std::uint64_t master_seed, unsigned threads, bool check_dominance) {
    SweepSummary summary;
    const std::size_t total = rows.size() * instances;
    summary.records.resize(total);
    parallel_for(total, threads, [&](std::size_t idx) {
        const std::size_t ri = idx / instances;
        const std::size_t k = idx % instances;
        const BoundRow row = rows[ri];
        const std::uint64_t counter =
            (static_cast<std::uint64_t>(static_cast<int>(row)) << 32) + static_cast<std::uint64_t>(k);
        const std::uint64_t seed = rng::derive_seed(master_seed, counter);
        auto e = rng::Engine(seed);
        const std::size_t n = 2 + rng::uniform_index(e, 7);
        const auto h = random_h(e, n);
        const auto nu = rng::dirichlet(e, n);
        const auto pi = rng::dirichlet(e, n);
        const BoundSpec spec = random_spec(row, e, k % 2 == 1);
        const ExtReal d = f_divergence(row_generator(spec), nu, pi);
        const BoundResult res = eval_bound(spec, pi, h, d);
        SweepRecord& rec = summary.records[idx];
        rec.row = row;
        rec.n = n;
        rec.seed = seed;
        rec.spec = res.spec_used;
        rec.d_value = d;
        rec.e_nu_h = expectation(nu, h);
        rec.bound = res.value;
        rec.violated = res.value < ExtReal(rec.e_nu_h - kSoundnessSlack);
    });
    std::stable_sort(summary.records.begin(), summary.records.end(),
                     [](const SweepRecord& a, const SweepRecord& b) {
                         if (a.row != b.row) return static_cast<int>(a.row) < static_cast<int>(b.row);
                         return a.seed < b.seed;
                     });
    for (const auto& r : summary.records) summary.violations += r.violated ? 1 : 0;

    if (check_dominance) {
        std::vector<DominanceOutcome> outcomes(instances);
        parallel_for(instances, threads, [&](std::size_t k) {
            outcomes[k] = dominance_instance(rng::derive_seed(master_seed, (std::uint64_t{1} << 40) + k));
        });
        for (const auto& o : outcomes) {
            summary.dominance_checks += o.checks;
            summary.dominance_violations += o.violations;
        }
    }
    return summary;
}

}  // namespace fdx
