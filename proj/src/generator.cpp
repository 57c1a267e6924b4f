#include "fdiv/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <utility>

#include "fdiv/conjugate.hpp"
#include "fdiv/errors.hpp"

namespace fdx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Accuracy of numerically computed conjugates (reverse and custom generators).
constexpr double kDerivedConjugateTol = 1e-12;

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

// Wraps an evaluation of f on [0, inf) so that f = +inf on the negative axis.
Generator::RealMap on_nonnegative(std::function<double(double)> fn) {
    return [fn = std::move(fn)](double x) -> ExtReal {
        if (x < 0.0) return kPosInf;
        return fn(x);
    };
}

Generator make_kl() {
    Generator::Parts p;
    p.kind = GeneratorKind::kl;
    p.label = "kl";
    p.f = on_nonnegative(xlogx);
    p.fstar = [](double t) -> ExtReal { return std::exp(t - 1.0); };
    p.fstar_prime = [](double t) -> ExtReal { return std::exp(t - 1.0); };
    p.fprime = [](double x) -> ExtReal {
        if (x <= 0.0) return kNegInf;
        return std::log(x) + 1.0;
    };
    p.fprime_at_zero = kNegInf;
    p.fprime_at_inf = kPosInf;
    p.in_fc = true;
    return Generator(std::move(p));
}

// t^p - 1 for p > 1 or p < 0, 1 - t^p for 0 < p < 1.
Generator make_power(double p, GeneratorKind kind, std::string label) {
    const double q = p / (p - 1.0);
    Generator::Parts g;
    g.kind = kind;
    g.label = std::move(label);
    g.params = {p};
    if (p > 1.0) {
        const double coef = std::pow(p, 1.0 - q) / q;
        g.f = on_nonnegative([p](double x) { return std::pow(x, p) - 1.0; });
        g.fstar = [coef, q](double t) -> ExtReal {
            if (t <= 0.0) return 1.0;
            return coef * std::pow(t, q) + 1.0;
        };
        g.fstar_prime = [p, q](double t) -> ExtReal {
            if (t <= 0.0) return 0.0;
            return std::pow(t / p, q - 1.0);
        };
        g.fprime = [p](double x) -> ExtReal { return p * std::pow(std::max(x, 0.0), p - 1.0); };
        g.fprime_at_zero = 0.0;
        g.fprime_at_inf = kPosInf;
        if (p == 2.0)
            g.fsecond_at_zero = 2.0;
        else if (p > 2.0)
            g.fsecond_at_zero = 0.0;
        g.in_fc = p <= 2.0;
    } else if (p > 0.0) {
        const double coef = std::pow(p, 1.0 - q) / (-q);
        g.f = on_nonnegative([p](double x) { return 1.0 - std::pow(x, p); });
        g.fstar = [coef, q](double t) -> ExtReal {
            if (t >= 0.0) return kPosInf;
            return -1.0 + coef * std::pow(-t, q);
        };
        g.fstar_prime = [p, q](double t) -> ExtReal {
            if (t >= 0.0) return kPosInf;
            return std::pow(-t / p, q - 1.0);
        };
        g.fprime = [p](double x) -> ExtReal {
            if (x <= 0.0) return kNegInf;
            return -p * std::pow(x, p - 1.0);
        };
        g.fprime_at_zero = kNegInf;
        g.fprime_at_inf = 0.0;
    } else {
        const double coef = std::pow(-p, 1.0 - q) / q;
        g.f = on_nonnegative([p](double x) { return std::pow(x, p) - 1.0; });
        g.fstar = [coef, q](double t) -> ExtReal {
            if (t > 0.0) return kPosInf;
            return 1.0 - coef * std::pow(-t, q);
        };
        g.fstar_prime = [p, q](double t) -> ExtReal {
            if (t >= 0.0) return kPosInf;
            return std::pow(-t / -p, q - 1.0);
        };
        g.fprime = [p](double x) -> ExtReal {
            if (x <= 0.0) return kNegInf;
            return p * std::pow(x, p - 1.0);
        };
        g.fprime_at_zero = kNegInf;
        g.fprime_at_inf = 0.0;
    }
    return Generator(std::move(g));
}

Generator make_pearson() {
    Generator::Parts g;
    g.kind = GeneratorKind::pearson_chi2;
    g.label = "pearson_chi2";
    g.params = {};
    g.f = on_nonnegative([](double x) { return x * x - 1.0; });
    g.fstar = [](double t) -> ExtReal {
        const double tp = std::max(t, 0.0);
        return 0.25 * tp * tp + 1.0;
    };
    g.fstar_prime = [](double t) -> ExtReal { return 0.5 * std::max(t, 0.0); };
    g.fprime = [](double x) -> ExtReal { return 2.0 * std::max(x, 0.0); };
    g.fprime_at_zero = 0.0;
    g.fprime_at_inf = kPosInf;
    g.fsecond_at_zero = 2.0;
    g.in_fc = true;
    return Generator(std::move(g));
}

Generator make_total_variation() {
    Generator::Parts g;
    g.kind = GeneratorKind::total_variation;
    g.label = "total_variation";
    g.f = on_nonnegative([](double x) { return 0.5 * std::abs(x - 1.0); });
    g.fstar = [](double t) -> ExtReal {
        if (t < -0.5) return -0.5;
        if (t <= 0.5) return t;
        return kPosInf;
    };
    g.fstar_prime = [](double t) -> ExtReal {
        if (t <= -0.5) return 0.0;
        if (t <= 0.5) return 1.0;
        return kPosInf;
    };
    // Midpoint of the subdifferential [-1/2, 1/2] at x = 1.
    g.fprime = [](double x) -> ExtReal {
        if (x < 1.0) return -0.5;
        if (x > 1.0) return 0.5;
        return 0.0;
    };
    g.fprime_at_zero = -0.5;
    g.fprime_at_inf = 0.5;
    g.fsecond_at_zero = 0.0;
    g.strictly_convex = false;
    return Generator(std::move(g));
}

Generator make_squared_hellinger() {
    Generator::Parts g;
    g.kind = GeneratorKind::squared_hellinger;
    g.label = "squared_hellinger";
    g.f = on_nonnegative([](double x) { return 1.0 - std::sqrt(x); });
    g.fstar = [](double t) -> ExtReal {
        if (t >= 0.0) return kPosInf;
        return -1.0 + 0.25 / -t;
    };
    g.fstar_prime = [](double t) -> ExtReal {
        if (t >= 0.0) return kPosInf;
        return 0.25 / (t * t);
    };
    g.fprime = [](double x) -> ExtReal {
        if (x <= 0.0) return kNegInf;
        return -0.5 / std::sqrt(x);
    };
    g.fprime_at_zero = kNegInf;
    g.fprime_at_inf = 0.0;
    return Generator(std::move(g));
}

Generator make_reverse_kl() {
    Generator::Parts g;
    g.kind = GeneratorKind::reverse_kl;
    g.label = "reverse_kl";
    g.f = on_nonnegative([](double x) { return x == 0.0 ? kInf : -std::log(x); });
    g.fstar = [](double t) -> ExtReal {
        if (t >= 0.0) return kPosInf;
        return -1.0 - std::log(-t);
    };
    g.fstar_prime = [](double t) -> ExtReal {
        if (t >= 0.0) return kPosInf;
        return -1.0 / t;
    };
    g.fprime = [](double x) -> ExtReal {
        if (x <= 0.0) return kNegInf;
        return -1.0 / x;
    };
    g.fprime_at_zero = kNegInf;
    g.fprime_at_inf = 0.0;
    return Generator(std::move(g));
}

Generator make_reverse_pearson() {
    Generator::Parts g;
    g.kind = GeneratorKind::reverse_pearson;
    g.label = "reverse_pearson";
    g.f = on_nonnegative([](double x) { return x == 0.0 ? kInf : 1.0 / x - 1.0; });
    g.fstar = [](double t) -> ExtReal {
        if (t > 0.0) return kPosInf;
        return 1.0 - 2.0 * std::sqrt(-t);
    };
    g.fstar_prime = [](double t) -> ExtReal {
        if (t >= 0.0) return kPosInf;
        return 1.0 / std::sqrt(-t);
    };
    g.fprime = [](double x) -> ExtReal {
        if (x <= 0.0) return kNegInf;
        return -1.0 / (x * x);
    };
    g.fprime_at_zero = kNegInf;
    g.fprime_at_inf = 0.0;
    return Generator(std::move(g));
}

// f(t) = th t log(th t) - (th t + 1 - th) log(th t + 1 - th) - th log th,
// the parenthesisation with f(1) = 0.
Generator make_lin(double theta, GeneratorKind kind, std::string label) {
    Generator::Parts g;
    g.kind = kind;
    g.label = std::move(label);
    g.params = {theta};
    const double tail = xlogx(theta);
    g.f = on_nonnegative([theta, tail](double x) {
        const double tx = theta * x;
        return xlogx(tx) - xlogx(tx + 1.0 - theta) - tail;
    });
    // f*(t) = (1 - th) log((1 - th) / (1 - e^{t/th})) + th log th on t < 0.
    g.fstar = [theta, tail](double t) -> ExtReal {
        if (t >= 0.0) return kPosInf;
        const double one_minus_u = -std::expm1(t / theta);
        return (1.0 - theta) * (std::log1p(-theta) - std::log(one_minus_u)) + tail;
    };
    g.fstar_prime = [theta](double t) -> ExtReal {
        if (t >= 0.0) return kPosInf;
        const double u = std::exp(t / theta);
        return (1.0 - theta) / theta * u / -std::expm1(t / theta);
    };
    g.fprime = [theta](double x) -> ExtReal {
        if (x <= 0.0) return kNegInf;
        const double tx = theta * x;
        return theta * std::log(tx / (tx + 1.0 - theta));
    };
    g.fprime_at_zero = kNegInf;
    g.fprime_at_inf = 0.0;
    return Generator(std::move(g));
}

Generator make_vincze_lecam() {
    Generator::Parts g;
    g.kind = GeneratorKind::vincze_lecam;
    g.label = "vincze_lecam";
    g.f = on_nonnegative([](double x) { return (2.0 - 2.0 * x) / (x + 1.0); });
    g.fstar = [](double t) -> ExtReal {
        if (t <= -4.0) return -2.0;
        if (t <= 0.0) return -4.0 * std::sqrt(-t) - t + 2.0;
        return kPosInf;
    };
    g.fstar_prime = [](double t) -> ExtReal {
        if (t <= -4.0) return 0.0;
        if (t < 0.0) return 2.0 / std::sqrt(-t) - 1.0;
        return kPosInf;
    };
    g.fprime = [](double x) -> ExtReal {
        const double s = 1.0 + std::max(x, 0.0);
        return -4.0 / (s * s);
    };
    g.fprime_at_zero = -4.0;
    g.fprime_at_inf = 0.0;
    g.fsecond_at_zero = 8.0;
    return Generator(std::move(g));
}

}  // namespace

Generator::Generator(Parts parts) : p_(std::move(parts)) {
    if (!p_.f || !p_.fstar || !p_.fstar_prime || !p_.fprime)
        throw std::invalid_argument("Generator: all evaluation maps must be set");
}

std::string_view to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::kl: return "kl";
        case GeneratorKind::power: return "power";
        case GeneratorKind::pearson_chi2: return "pearson_chi2";
        case GeneratorKind::total_variation: return "total_variation";
        case GeneratorKind::squared_hellinger: return "squared_hellinger";
        case GeneratorKind::reverse_kl: return "reverse_kl";
        case GeneratorKind::reverse_pearson: return "reverse_pearson";
        case GeneratorKind::lin: return "lin";
        case GeneratorKind::jensen_shannon: return "jensen_shannon";
        case GeneratorKind::vincze_lecam: return "vincze_lecam";
        case GeneratorKind::delta: return "delta";
        case GeneratorKind::custom: return "custom";
    }
    return "custom";
}

Generator delta_generator() {
    Generator::Parts g;
    g.kind = GeneratorKind::delta;
    g.label = "delta";
    g.f = on_nonnegative([](double x) { return x - 1.0; });
    g.fstar = [](double t) -> ExtReal {
        if (t <= 1.0) return 1.0;
        return kPosInf;
    };
    g.fstar_prime = [](double t) -> ExtReal {
        if (t <= 1.0) return 0.0;
        return kPosInf;
    };
    g.fprime = [](double) -> ExtReal { return 1.0; };
    g.fprime_at_zero = 1.0;
    g.fprime_at_inf = 1.0;
    g.fsecond_at_zero = 0.0;
    g.strictly_convex = false;
    return Generator(std::move(g));
}

Generator make_generator(std::string_view name, const std::vector<double>& params) {
    auto expect_params = [&](std::size_t n) {
        if (params.size() != n)
            throw std::invalid_argument("generator '" + std::string(name) + "' takes " +
                                        std::to_string(n) + " parameter(s)");
    };
    if (name == "kl") {
        expect_params(0);
        return make_kl();
    }
    if (name == "power") {
        expect_params(1);
        const double p = params[0];
        if (!std::isfinite(p) || p == 0.0 || p == 1.0)
            throw std::invalid_argument("power generator requires finite p not in {0, 1}");
        return make_power(p, GeneratorKind::power, "power:" + short_number(p));
    }
    if (name == "pearson_chi2") {
        expect_params(0);
        return make_pearson();
    }
    if (name == "total_variation") {
        expect_params(0);
        return make_total_variation();
    }
    if (name == "squared_hellinger") {
        expect_params(0);
        return make_squared_hellinger();
    }
    if (name == "reverse_kl") {
        expect_params(0);
        return make_reverse_kl();
    }
    if (name == "reverse_pearson") {
        expect_params(0);
        return make_reverse_pearson();
    }
    if (name == "lin") {
        expect_params(1);
        const double theta = params[0];
        if (!(theta > 0.0 && theta < 1.0))
            throw std::invalid_argument("lin generator requires 0 < theta < 1");
        return make_lin(theta, GeneratorKind::lin, "lin:" + short_number(theta));
    }
    if (name == "jensen_shannon") {
        expect_params(0);
        return make_lin(0.5, GeneratorKind::jensen_shannon, "jensen_shannon");
    }
    if (name == "vincze_lecam") {
        expect_params(0);
        return make_vincze_lecam();
    }
    if (name == "delta") {
        expect_params(0);
        return delta_generator();
    }
    throw std::invalid_argument("unknown generator '" + std::string(name) + "'");
}

Generator parse_generator(std::string_view spec) {
    const auto colon = spec.find(':');
    const std::string_view name = spec.substr(0, colon);
    std::vector<double> params;
    if (colon != std::string_view::npos) {
        std::string rest(spec.substr(colon + 1));
        std::size_t pos = 0;
        while (pos <= rest.size()) {
            const auto comma = rest.find(',', pos);
            const std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos
                                                                                 : comma - pos);
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(item, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (item.empty() || used != item.size())
                throw std::invalid_argument("bad generator parameter '" + item + "' in '" +
                                            std::string(spec) + "'");
            params.push_back(v);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    return make_generator(name, params);
}

std::vector<Generator> bound_table_generators() {
    return {
        make_generator("kl"),
        make_generator("power", {1.5}),
        make_generator("power", {3.0}),
        make_generator("pearson_chi2"),
        make_generator("power", {0.5}),
        make_generator("power", {-1.0}),
        make_generator("total_variation"),
        make_generator("squared_hellinger"),
        make_generator("reverse_pearson"),
        make_generator("reverse_kl"),
        make_generator("lin", {0.3}),
        make_generator("jensen_shannon"),
        make_generator("vincze_lecam"),
    };
}

Generator reverse(const Generator& g) {
    Generator::Parts r;
    r.kind = GeneratorKind::custom;
    r.label = "reverse(" + g.label() + ")";
    r.params = g.params();
    // f_g(0) = lim_{t->0} t g(1/t) = g'(inf).
    const ExtReal f_at_zero = g.fprime_at_inf();
    r.f = [g, f_at_zero](double t) -> ExtReal {
        if (t < 0.0) return kPosInf;
        if (t == 0.0) return f_at_zero;
        return ExtReal(t) * g.eval_f(1.0 / t);
    };
    r.fprime = [g](double t) -> ExtReal {
        if (t <= 0.0) {
            const ExtReal gi = g.fprime_at_inf();
            return gi.is_pos_inf() ? kNegInf : -g.eval_fstar(gi.value());
        }
        return g.eval_f(1.0 / t) - g.eval_fprime(1.0 / t) / ExtReal(t);
    };
    // f_g'(0) = -lim_{x->inf} (x g'(x) - g(x)) = -g*(g'(inf)).
    {
        const ExtReal gi = g.fprime_at_inf();
        r.fprime_at_zero = gi.is_pos_inf() ? kNegInf : -g.eval_fstar(gi.value());
    }
    // f_g'(inf) = lim_{x->0} (g(x) - x g'(x)) = g(0).
    r.fprime_at_inf = g.eval_f(0.0);
    r.strictly_convex = g.strictly_convex();
    r.in_fc = false;

    const Generator::RealMap f = r.f;
    const ExtReal fi = r.fprime_at_inf;
    r.fstar = [f, fi](double t) { return conjugate_search(f, fi, t, kDerivedConjugateTol).value; };
    r.fstar_prime = [f, fi](double t) {
        return conjugate_search(f, fi, t, kDerivedConjugateTol).argmax;
    };
    return Generator(std::move(r));
}

Generator kernel_shifted(const Generator& g, double c) {
    Generator::Parts s;
    s.kind = GeneratorKind::custom;
    s.label = g.label() + "+" + short_number(c) + "*delta";
    s.params = g.params();
    s.f = [g, c](double x) -> ExtReal {
        if (x < 0.0) return kPosInf;
        return g.eval_f(x) + c * (x - 1.0);
    };
    s.fstar = [g, c](double t) { return g.eval_fstar(t - c) + c; };
    s.fstar_prime = [g, c](double t) { return g.eval_fstar_prime(t - c); };
    s.fprime = [g, c](double x) { return g.eval_fprime(x) + c; };
    s.fprime_at_zero = g.fprime_at_zero() + c;
    s.fprime_at_inf = g.fprime_at_inf() + c;
    s.fsecond_at_zero = g.fsecond_at_zero();
    s.in_fc = g.in_fc();
    s.strictly_convex = g.strictly_convex();
    return Generator(std::move(s));
}

Generator scaled(const Generator& g, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("scaled: lambda must be positive and finite");
    Generator::Parts s;
    s.kind = GeneratorKind::custom;
    s.label = short_number(lambda) + "*" + g.label();
    s.params = g.params();
    s.f = [g, lambda](double x) { return lambda * g.eval_f(x); };
    s.fstar = [g, lambda](double t) { return lambda * g.eval_fstar(t / lambda); };
    s.fstar_prime = [g, lambda](double t) { return g.eval_fstar_prime(t / lambda); };
    s.fprime = [g, lambda](double x) { return lambda * g.eval_fprime(x); };
    s.fprime_at_zero = lambda * g.fprime_at_zero();
    s.fprime_at_inf = lambda * g.fprime_at_inf();
    if (auto f2 = g.fsecond_at_zero()) s.fsecond_at_zero = lambda * *f2;
    s.in_fc = g.in_fc();
    s.strictly_convex = g.strictly_convex();
    return Generator(std::move(s));
}

Generator extended_generator(const Generator& g, Extension kind) {
    Generator::Parts e;
    e.kind = GeneratorKind::custom;
    e.params = g.params();
    e.fprime_at_zero = kNegInf;
    e.fprime_at_inf = g.fprime_at_inf();
    e.strictly_convex = g.strictly_convex();
    e.in_fc = false;

    if (kind == Extension::analytic) {
        if (g.kind() != GeneratorKind::vincze_lecam)
            throw UnsupportedGenerator("analytic extension is only defined for vincze_lecam");
        e.label = "analytic_ext(" + g.label() + ")";
        e.f = [](double x) -> ExtReal {
            if (x <= -1.0) return kPosInf;
            return (2.0 - 2.0 * x) / (x + 1.0);
        };
        e.fstar = [](double t) -> ExtReal {
            if (t > 0.0) return kPosInf;
            return -4.0 * std::sqrt(-t) - t + 2.0;
        };
        e.fstar_prime = [](double t) -> ExtReal {
            if (t >= 0.0) return kPosInf;
            return 2.0 / std::sqrt(-t) - 1.0;
        };
        e.fprime = [](double x) -> ExtReal {
            if (x <= -1.0) return kNegInf;
            return -4.0 / ((1.0 + x) * (1.0 + x));
        };
        e.fsecond_at_zero = 8.0;
        return Generator(std::move(e));
    }

    const ExtReal a_ext = g.fprime_at_zero();
    const auto b_opt = g.fsecond_at_zero();
    if (!a_ext.is_finite())
        throw UnsupportedGenerator("extension requires a finite f'(0) for " + g.label());
    if (!b_opt || !(*b_opt > 0.0) || !std::isfinite(*b_opt))
        throw UnsupportedGenerator("extension requires 0 < f''(0) < inf for " + g.label());
    const double a = a_ext.value();
    const double b = *b_opt;
    const ExtReal f0 = g.eval_f(0.0);
    if (!f0.is_finite()) throw UnsupportedGenerator("extension requires a finite f(0)");
    const double f0v = f0.value();

    e.label = "quadratic_ext(" + g.label() + ")";
    e.f = [g, a, b, f0v](double x) -> ExtReal {
        if (x < 0.0) return f0v + a * x + 0.5 * b * x * x;
        return g.eval_f(x);
    };
    e.fstar = [g, a, b, f0v](double t) -> ExtReal {
        if (t < a) return -f0v + (t - a) * (t - a) / (2.0 * b);
        return g.eval_fstar(t);
    };
    e.fstar_prime = [g, a, b](double t) -> ExtReal {
        if (t < a) return (t - a) / b;
        return g.eval_fstar_prime(t);
    };
    e.fprime = [g, a, b](double x) -> ExtReal {
        if (x < 0.0) return a + b * x;
        if (x == 0.0) return a;
        return g.eval_fprime(x);
    };
    e.fsecond_at_zero = b;
    return Generator(std::move(e));
}

Generator make_custom_generator(CustomGeneratorSpec spec) {
    if (!spec.f) throw std::invalid_argument("custom generator requires f");
    Generator::Parts c;
    c.kind = GeneratorKind::custom;
    c.label = spec.label;
    auto user_f = spec.f;
    c.f = [user_f](double x) -> ExtReal {
        if (x < 0.0) return kPosInf;
        const double v = user_f(x);
        if (std::isnan(v)) return kPosInf;
        return v;
    };
    const ExtReal fz = spec.fprime_at_zero;
    if (spec.fprime) {
        auto user_fp = spec.fprime;
        c.fprime = [user_fp, fz](double x) -> ExtReal {
            if (x <= 0.0) return fz;
            return user_fp(x);
        };
    } else {
        c.fprime = [user_f, fz](double x) -> ExtReal {
            if (x <= 0.0) return fz;
            const double h = 1e-6 * std::max(1.0, x);
            const double lo = std::max(x - h, 0.0);
            return (user_f(x + h) - user_f(lo)) / (x + h - lo);
        };
    }
    c.fprime_at_zero = spec.fprime_at_zero;
    c.fprime_at_inf = spec.fprime_at_inf;
    c.in_fc = spec.in_fc;
    c.strictly_convex = spec.strictly_convex;
    const Generator::RealMap f = c.f;
    const ExtReal fi = c.fprime_at_inf;
    c.fstar = [f, fi](double t) { return conjugate_search(f, fi, t, kDerivedConjugateTol).value; };
    c.fstar_prime = [f, fi](double t) {
        return conjugate_search(f, fi, t, kDerivedConjugateTol).argmax;
    };
    return Generator(std::move(c));
}

}  // namespace fdx
