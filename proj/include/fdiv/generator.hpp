#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdiv/ext_real.hpp"

namespace fdx {

enum class GeneratorKind {
    kl,
    power,
    pearson_chi2,
    total_variation,
    squared_hellinger,
    reverse_kl,
    reverse_pearson,
    lin,
    jensen_shannon,
    vincze_lecam,
    delta,
    custom,
};

std::string_view to_string(GeneratorKind kind);

// Convex generator f with f(1) = 0 together with its convex conjugate
// f*(t) = sup_{x >= 0} (x t - f(x)) and derivative data.
//
// Generators are immutable values; every evaluation is total and returns
// +inf rather than throwing when its argument leaves the effective domain.
class Generator {
public:
    using RealMap = std::function<ExtReal(double)>;

    struct Parts {
        GeneratorKind kind = GeneratorKind::custom;
        std::string label;
        std::vector<double> params;
        RealMap f;
        RealMap fstar;
        RealMap fstar_prime;
        RealMap fprime;
        ExtReal fprime_at_zero;
        ExtReal fprime_at_inf;
        // Right limit of f'' at 0, when it exists and is finite.
        std::optional<double> fsecond_at_zero;
        bool in_fc = false;
        bool strictly_convex = true;
    };

    explicit Generator(Parts parts);

    GeneratorKind kind() const noexcept { return p_.kind; }
    // Spec string, e.g. "kl", "power:1.5", "reverse(kl)".
    const std::string& label() const noexcept { return p_.label; }
    const std::vector<double>& params() const noexcept { return p_.params; }

    ExtReal eval_f(double x) const { return p_.f(x); }
    ExtReal eval_fstar(double t) const { return p_.fstar(t); }
    // A selection from the subdifferential of f* at t; nonnegative.
    ExtReal eval_fstar_prime(double t) const { return p_.fstar_prime(t); }
    // A selection from the subdifferential of f at x >= 0. At x = 0 this is
    // the right limit fprime_at_zero().
    ExtReal eval_fprime(double x) const { return p_.fprime(x); }

    ExtReal fprime_at_zero() const noexcept { return p_.fprime_at_zero; }
    ExtReal fprime_at_inf() const noexcept { return p_.fprime_at_inf; }
    std::optional<double> fsecond_at_zero() const noexcept { return p_.fsecond_at_zero; }
    bool in_fc() const noexcept { return p_.in_fc; }
    bool strictly_convex() const noexcept { return p_.strictly_convex; }

    const Parts& parts() const noexcept { return p_; }

private:
    Parts p_;
};

// Catalog constructor. Throws std::invalid_argument for unknown names or
// out-of-range parameters (power with p in {0, 1}; lin with theta outside
// (0, 1)).
Generator make_generator(std::string_view name, const std::vector<double>& params = {});

// Parses "kl", "power:1.5", "lin:0.3", ...
Generator parse_generator(std::string_view spec);

// The thirteen generators behind the bound table rows, in row order, with
// representative parameters (power 1.5, 3, 0.5, -1; lin 0.3).
std::vector<Generator> bound_table_generators();

// The kernel generator t -> t - 1.
Generator delta_generator();

// f_g(t) = t g(1/t): D_{f_g}(nu, pi) = D_g(pi, nu). The conjugate is computed
// numerically.
Generator reverse(const Generator& g);

// g + c (t - 1). Same divergence; conjugate shifts as g*(t - c) + c.
Generator kernel_shifted(const Generator& g, double c);

// lambda g for lambda > 0.
Generator scaled(const Generator& g, double lambda);

enum class Extension {
    // f(0) + t f'(0) + t^2 f''(0) / 2 on t < 0.
    quadratic,
    // Vincze-Le Cam only: the closed form (2 - 2t)/(t + 1) continued to (-1, 0).
    analytic,
};

// Convex extension of g to part of the negative half-line. The extended
// conjugate dominates the original one pointwise and coincides with it for
// t >= f'(0). Throws UnsupportedGenerator when f'(0) is infinite or f''(0) is
// not in (0, inf), or when `analytic` is requested for a generator other than
// vincze_lecam.
Generator extended_generator(const Generator& g, Extension kind = Extension::quadratic);

struct CustomGeneratorSpec {
    std::string label = "custom";
    std::function<double(double)> f;  // on x >= 0; +inf allowed
    std::function<double(double)> fprime;  // optional; finite differences otherwise
    ExtReal fprime_at_zero = kNegInf;
    ExtReal fprime_at_inf = kPosInf;
    bool in_fc = false;  // declared by the caller, not verified
    bool strictly_convex = true;
};

// User-supplied generator whose conjugate and conjugate derivative come from
// the numerical conjugate search.
Generator make_custom_generator(CustomGeneratorSpec spec);

}  // namespace fdx
