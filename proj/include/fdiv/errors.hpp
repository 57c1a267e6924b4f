#pragma once

#include <stdexcept>
#include <string>

namespace fdx {

// Operation is not defined for the given generator (e.g. the exact transform
// of a generator that is not strictly convex).
class UnsupportedGenerator : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Iterative search exhausted its budget. Carries the last bracket.
class NoConvergence : public std::runtime_error {
public:
    NoConvergence(const std::string& what, double lo, double hi)
        : std::runtime_error(what + " (last bracket [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "])"),
          lo_(lo),
          hi_(hi) {}

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

}  // namespace fdx
