#pragma once

#include <functional>

#include "fdiv/ext_real.hpp"
#include "fdiv/generator.hpp"

namespace fdx {

struct ConjugatePoint {
    ExtReal value;     // sup_{x >= 0} (x t - f(x))
    ExtReal argmax;    // maximiser, +inf when the supremum is only approached
};

// Numerical Legendre transform of a convex f on [0, inf).
//
// The objective x t - f(x) is concave. Returns +inf immediately for
// t > fprime_at_inf. Otherwise the bracket [0, 2] is doubled until the
// objective decreases, then refined by golden section. At t == fprime_at_inf
// the objective is nondecreasing and the supremum is the limit along x = 2^k;
// it is reported as +inf when the increments along x = 2^k stop shrinking.
ConjugatePoint conjugate_search(const std::function<ExtReal(double)>& f, ExtReal fprime_at_inf,
                                double t, double tol);

ExtReal conjugate_numeric(const Generator& g, double t, double tol);

}  // namespace fdx
