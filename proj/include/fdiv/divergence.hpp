#pragma once

#include <string>
#include <utility>

#include "fdiv/distribution.hpp"
#include "fdiv/ext_real.hpp"
#include "fdiv/generator.hpp"

namespace fdx {

// D_f(nu, pi) = sum_i pi_i f(nu_i / pi_i) with the conventions
//   pi_i = 0, nu_i > 0  ->  +inf (nu is not absolutely continuous)
//   pi_i = 0, nu_i = 0  ->  term is 0
//   nu_i = 0, pi_i > 0  ->  term is pi_i f(0), possibly +inf.
// The sum is compensated; tiny negative round-off is clamped to 0.
ExtReal f_divergence(const Generator& g, const FiniteDistribution& nu,
                     const FiniteDistribution& pi);

// (D_{reverse(g)}(nu, pi), D_g(pi, nu)). The two agree when both measures
// share a support, or whenever g'(inf) = +inf.
std::pair<ExtReal, ExtReal> divergence_pair_check(const Generator& g, const FiniteDistribution& nu,
                                                  const FiniteDistribution& pi);

// Closed-form formulas for named divergences, independent of the generator
// machinery.
namespace named {
double total_variation(const FiniteDistribution& nu, const FiniteDistribution& pi);  // 1/2 L1
ExtReal pearson_chi2(const FiniteDistribution& nu, const FiniteDistribution& pi);
double squared_hellinger(const FiniteDistribution& nu, const FiniteDistribution& pi);  // 1 - sum sqrt
ExtReal kl(const FiniteDistribution& nu, const FiniteDistribution& pi);
}  // namespace named

// File formats: JSON {"weights": [...]} / {"values": [...]}, or a single CSV
// column with header `w` / `h`. Throws std::runtime_error on I/O failure and
// std::invalid_argument on malformed content.
FiniteDistribution read_distribution(const std::string& path);
MeasurableFunction read_function(const std::string& path);
FiniteDistribution parse_distribution(const std::string& text);
MeasurableFunction parse_function(const std::string& text);

// Raised when a file cannot be opened or read.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fdx
