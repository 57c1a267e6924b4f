#pragma once

#include <cmath>
#include <compare>
#include <iosfwd>
#include <limits>
#include <stdexcept>

namespace fdx {

// Extended real number: finite, +inf or -inf. Never NaN.
//
// Arithmetic follows measure-theoretic conventions: 0 * (+-inf) = 0, and the
// indeterminate forms inf - inf and inf / inf raise std::domain_error instead
// of silently producing NaN.
class ExtReal {
public:
    enum class Kind { finite, pos_inf, neg_inf };

    constexpr ExtReal() noexcept = default;

    // Implicit on purpose: every double except NaN is a valid extended real.
    ExtReal(double v) : v_(v) {  // NOLINT(google-explicit-constructor)
        if (std::isnan(v)) throw std::domain_error("ExtReal: NaN is not an extended real");
    }

    static ExtReal pos_inf() noexcept { return from_raw(std::numeric_limits<double>::infinity()); }
    static ExtReal neg_inf() noexcept { return from_raw(-std::numeric_limits<double>::infinity()); }

    Kind kind() const noexcept {
        if (std::isfinite(v_)) return Kind::finite;
        return v_ > 0 ? Kind::pos_inf : Kind::neg_inf;
    }
    bool is_finite() const noexcept { return std::isfinite(v_); }
    bool is_pos_inf() const noexcept { return v_ == std::numeric_limits<double>::infinity(); }
    bool is_neg_inf() const noexcept { return v_ == -std::numeric_limits<double>::infinity(); }

    // Raw IEEE value; infinities map to +-HUGE_VAL.
    double value() const noexcept { return v_; }

    // Throws std::domain_error when the value is infinite.
    double finite_value() const {
        if (!is_finite()) throw std::domain_error("ExtReal: value is not finite");
        return v_;
    }

    ExtReal operator-() const noexcept { return from_raw(-v_); }

    ExtReal& operator+=(ExtReal rhs) { return *this = *this + rhs; }
    ExtReal& operator-=(ExtReal rhs) { return *this = *this - rhs; }
    ExtReal& operator*=(ExtReal rhs) { return *this = *this * rhs; }

    friend ExtReal operator+(ExtReal a, ExtReal b) {
        if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf()))
            throw std::domain_error("ExtReal: indeterminate form inf - inf");
        return from_raw(a.v_ + b.v_);
    }
    friend ExtReal operator-(ExtReal a, ExtReal b) { return a + (-b); }

    friend ExtReal operator*(ExtReal a, ExtReal b) noexcept {
        if (a.v_ == 0.0 || b.v_ == 0.0) return ExtReal{};
        return from_raw(a.v_ * b.v_);
    }

    friend ExtReal operator/(ExtReal a, ExtReal b) {
        if (b.v_ == 0.0) throw std::domain_error("ExtReal: division by zero");
        if (!a.is_finite() && !b.is_finite())
            throw std::domain_error("ExtReal: indeterminate form inf / inf");
        return from_raw(a.v_ / b.v_);
    }

    friend bool operator==(ExtReal a, ExtReal b) noexcept { return a.v_ == b.v_; }
    // Total order: no NaN can be stored.
    friend std::strong_ordering operator<=>(ExtReal a, ExtReal b) noexcept {
        if (a.v_ < b.v_) return std::strong_ordering::less;
        if (a.v_ > b.v_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

private:
    static ExtReal from_raw(double v) noexcept {
        ExtReal r;
        r.v_ = v;
        return r;
    }

    double v_ = 0.0;
};

inline const ExtReal kPosInf = ExtReal::pos_inf();
inline const ExtReal kNegInf = ExtReal::neg_inf();

inline ExtReal min(ExtReal a, ExtReal b) noexcept { return b < a ? b : a; }
inline ExtReal max(ExtReal a, ExtReal b) noexcept { return a < b ? b : a; }

// |a - b| <= tol, or both the same infinity.
inline bool near(ExtReal a, ExtReal b, double tol) noexcept {
    if (!a.is_finite() || !b.is_finite()) return a == b;
    return std::abs(a.value() - b.value()) <= tol;
}

std::ostream& operator<<(std::ostream& os, ExtReal x);

// Neumaier-compensated accumulator over extended reals. Infinite terms are
// tracked separately so that the finite part keeps full precision.
class ExtSum {
public:
    void add(ExtReal x) {
        if (x.is_pos_inf()) {
            if (neg_inf_) throw std::domain_error("ExtSum: indeterminate form inf - inf");
            pos_inf_ = true;
            return;
        }
        if (x.is_neg_inf()) {
            if (pos_inf_) throw std::domain_error("ExtSum: indeterminate form inf - inf");
            neg_inf_ = true;
            return;
        }
        const double v = x.value();
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }

    ExtReal total() const {
        if (pos_inf_) return kPosInf;
        if (neg_inf_) return kNegInf;
        return sum_ + comp_;
    }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    bool pos_inf_ = false;
    bool neg_inf_ = false;
};

}  // namespace fdx
