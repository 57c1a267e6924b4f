#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fdx {

// Probability vector over support indices 0..n-1.
class FiniteDistribution {
public:
    // Validates: n >= 1, finite nonnegative weights summing to 1 within 1e-12.
    explicit FiniteDistribution(std::vector<double> weights);

    // Divides by the sum first; still requires nonnegative weights with a
    // positive finite sum.
    static FiniteDistribution normalized(std::vector<double> weights);
    static FiniteDistribution uniform(std::size_t n);
    static FiniteDistribution dirac(std::size_t n, std::size_t at);

    std::size_t size() const noexcept { return w_.size(); }
    double operator[](std::size_t i) const noexcept { return w_[i]; }
    std::span<const double> weights() const noexcept { return w_; }

    bool operator==(const FiniteDistribution&) const = default;

private:
    std::vector<double> w_;
};

// Real-valued function on the support of a FiniteDistribution.
class MeasurableFunction {
public:
    explicit MeasurableFunction(std::vector<double> values);

    std::size_t size() const noexcept { return v_.size(); }
    double operator[](std::size_t i) const noexcept { return v_[i]; }
    std::span<const double> values() const noexcept { return v_; }

private:
    std::vector<double> v_;
};

// Throws std::invalid_argument unless the sizes agree.
void require_same_support(std::size_t a, std::size_t b, const char* what);

// E_mu[h] with compensated summation.
double expectation(const FiniteDistribution& mu, const MeasurableFunction& h);

// max of h over {i : pi_i > 0}.
double max_on_support(const FiniteDistribution& pi, const MeasurableFunction& h);
double min_on_support(const FiniteDistribution& pi, const MeasurableFunction& h);

}  // namespace fdx
