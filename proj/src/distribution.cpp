#include "fdiv/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fdiv/ext_real.hpp"

namespace fdx {

namespace {

constexpr double kSumTolerance = 1e-12;

double compensated_sum(std::span<const double> xs) {
    ExtSum s;
    for (double x : xs) s.add(x);
    return s.total().value();
}

}  // namespace

FiniteDistribution::FiniteDistribution(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw std::invalid_argument("FiniteDistribution: empty support");
    for (double w : w_) {
        if (!std::isfinite(w) || w < 0.0)
            throw std::invalid_argument("FiniteDistribution: weights must be finite and >= 0");
    }
    const double s = compensated_sum(w_);
    if (std::abs(s - 1.0) > kSumTolerance)
        throw std::invalid_argument("FiniteDistribution: weights sum to " + std::to_string(s) +
                                    ", expected 1");
}

FiniteDistribution FiniteDistribution::normalized(std::vector<double> weights) {
    double s = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0)
            throw std::invalid_argument("FiniteDistribution: weights must be finite and >= 0");
    }
    s = compensated_sum(weights);
    if (!(s > 0.0) || !std::isfinite(s))
        throw std::invalid_argument("FiniteDistribution: weights must have a positive sum");
    for (double& w : weights) w /= s;
    return FiniteDistribution(std::move(weights));
}

FiniteDistribution FiniteDistribution::uniform(std::size_t n) {
    if (n == 0) throw std::invalid_argument("FiniteDistribution: empty support");
    return FiniteDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

FiniteDistribution FiniteDistribution::dirac(std::size_t n, std::size_t at) {
    if (at >= n) throw std::invalid_argument("FiniteDistribution::dirac: index out of range");
    std::vector<double> w(n, 0.0);
    w[at] = 1.0;
    return FiniteDistribution(std::move(w));
}

MeasurableFunction::MeasurableFunction(std::vector<double> values) : v_(std::move(values)) {
    if (v_.empty()) throw std::invalid_argument("MeasurableFunction: empty support");
    for (double v : v_) {
        if (!std::isfinite(v)) throw std::invalid_argument("MeasurableFunction: values must be finite");
    }
}

void require_same_support(std::size_t a, std::size_t b, const char* what) {
    if (a != b)
        throw std::invalid_argument(std::string(what) + ": support sizes differ (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
}

double expectation(const FiniteDistribution& mu, const MeasurableFunction& h) {
    require_same_support(mu.size(), h.size(), "expectation");
    ExtSum s;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu[i] > 0.0) s.add(mu[i] * h[i]);
    }
    return s.total().value();
}

double max_on_support(const FiniteDistribution& pi, const MeasurableFunction& h) {
    require_same_support(pi.size(), h.size(), "max_on_support");
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (pi[i] > 0.0) m = std::max(m, h[i]);
    }
    return m;
}

double min_on_support(const FiniteDistribution& pi, const MeasurableFunction& h) {
    require_same_support(pi.size(), h.size(), "min_on_support");
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (pi[i] > 0.0) m = std::min(m, h[i]);
    }
    return m;
}

}  // namespace fdx
