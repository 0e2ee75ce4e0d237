// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <compare>
#include <ostream>
#include <string>

#include "scdt/errors.hpp"

namespace scdt {

/// A point of the extended real line [-inf, +inf].
///
/// The infinities are explicit sentinels rather than IEEE infinities so that
/// ordering is total and serialization is unambiguous. Only comparison and
/// storage are defined on sentinels; arithmetic goes through finite_value().
class ExtendedReal {
public:
    enum class Kind : unsigned char { neg_inf = 0, finite = 1, pos_inf = 2 };

    constexpr ExtendedReal() = default;
    constexpr ExtendedReal(double v) : value_(v) {} // NOLINT(google-explicit-constructor)

    static constexpr ExtendedReal neg_inf() { return ExtendedReal(Kind::neg_inf); }
    static constexpr ExtendedReal pos_inf() { return ExtendedReal(Kind::pos_inf); }

    /// Maps IEEE infinities onto the sentinels; NaN is rejected.
    static ExtendedReal from_double(double v)
    {
        if (std::isnan(v)) throw RangeError("NaN is not an extended real");
        if (std::isinf(v)) return v > 0 ? pos_inf() : neg_inf();
        return ExtendedReal(v);
    }

    constexpr Kind kind() const { return kind_; }
    constexpr bool is_finite() const { return kind_ == Kind::finite; }
    constexpr bool is_pos_inf() const { return kind_ == Kind::pos_inf; }
    constexpr bool is_neg_inf() const { return kind_ == Kind::neg_inf; }

    double finite_value() const
    {
        if (!is_finite()) throw RangeError("finite value requested from an infinite sentinel");
        return value_;
    }

    /// IEEE view, for plotting and diagnostics only.
    constexpr double to_double() const
    {
        switch (kind_) {
        case Kind::neg_inf: return -HUGE_VAL;
        case Kind::pos_inf: return HUGE_VAL;
        default: return value_;
        }
    }

    friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b)
    {
        return a.kind_ == b.kind_ && (a.kind_ != Kind::finite || a.value_ == b.value_);
    }

    friend constexpr std::partial_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b)
    {
        if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
        if (a.kind_ != Kind::finite) return std::partial_ordering::equivalent;
        return a.value_ <=> b.value_;
    }

    friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& x)
    {
        switch (x.kind_) {
        case Kind::neg_inf: return os << "-inf";
        case Kind::pos_inf: return os << "inf";
        default: return os << x.value_;
        }
    }

private:
    constexpr explicit ExtendedReal(Kind k) : kind_(k) {}

    Kind kind_ = Kind::finite;
    double value_ = 0.0;
};

inline constexpr ExtendedReal NEG_INF = ExtendedReal::neg_inf();
inline constexpr ExtendedReal POS_INF = ExtendedReal::pos_inf();

} // namespace scdt
