// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "scdt/errors.hpp"
#include "scdt/extended_real.hpp"

namespace scdt {

/// Right-continuous step function on the extended real line.
///
/// With breakpoints x_1 < ... < x_k and values v_0..v_k the function takes
/// v_0 on [-inf, x_1), v_i on [x_i, x_{i+1}) and v_k on [x_k, +inf). The value
/// at the single point +inf is stored separately (it defaults to v_k); this is
/// what lets a CDF carry an atom at +inf and lets a generalized inverse honour
/// F(+inf) = +inf.
///
/// Comparisons against stored values are exact. Callers must not rely on
/// ties at the 1-ulp level, e.g. a prefix sum of weights that is meant to
/// equal a quantile level.
class StepFunction {
public:
    StepFunction(std::vector<double> breakpoints, std::vector<ExtendedReal> values,
                 std::optional<ExtendedReal> at_pos_inf = std::nullopt)
        : breakpoints_(std::move(breakpoints)), values_(std::move(values))
    {
        if (values_.size() != breakpoints_.size() + 1)
            throw RangeError("step function needs exactly one more value than breakpoints");
        for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
            if (!std::isfinite(breakpoints_[i])) throw RangeError("step function breakpoints must be finite");
            if (i > 0 && !(breakpoints_[i - 1] < breakpoints_[i]))
                throw RangeError("step function breakpoints must be strictly increasing");
        }
        top_ = at_pos_inf.value_or(values_.back());
        monotone_ = std::is_sorted(values_.begin(), values_.end()) && values_.back() <= top_;
    }

    static StepFunction constant(ExtendedReal c) { return StepFunction({}, {c}); }

    std::span<const double> breakpoints() const { return breakpoints_; }
    std::span<const ExtendedReal> values() const { return values_; }
    ExtendedReal at_pos_inf() const { return top_; }
    bool monotone() const { return monotone_; }

    friend bool operator==(const StepFunction&, const StepFunction&) = default;

private:
    std::vector<double> breakpoints_;
    std::vector<ExtendedReal> values_;
    ExtendedReal top_;
    bool monotone_ = false;
};

inline ExtendedReal eval(const StepFunction& f, ExtendedReal x)
{
    if (x.is_neg_inf()) return f.values().front();
    if (x.is_pos_inf()) return f.at_pos_inf();
    const auto bp = f.breakpoints();
    const auto idx = std::upper_bound(bp.begin(), bp.end(), x.finite_value()) - bp.begin();
    return f.values()[static_cast<std::size_t>(idx)];
}

namespace detail {

inline void require_monotone(const StepFunction& f)
{
    if (!f.monotone()) throw NotMonotoneError("generalized inverse requires a non-decreasing step function");
}

// inf{x : f(x) > y} for a monotone f. The superlevel set is an up-set of the
// extended line, so its infimum is a breakpoint or one of the two sentinels.
inline ExtendedReal geninv_eval_unchecked(const StepFunction& f, ExtendedReal y)
{
    const auto vals = f.values();
    const auto it = std::upper_bound(vals.begin(), vals.end(), y);
    if (it == vals.begin()) return NEG_INF;
    if (it == vals.end()) return POS_INF; // either empty or {+inf}
    return f.breakpoints()[static_cast<std::size_t>(it - vals.begin()) - 1];
}

} // namespace detail

/// Monotone generalized inverse F†(y) = inf{x : F(x) > y}, with inf of the
/// empty set equal to +inf.
inline ExtendedReal geninv_eval(const StepFunction& f, double y)
{
    detail::require_monotone(f);
    if (std::isnan(y)) throw RangeError("generalized inverse evaluated at NaN");
    return detail::geninv_eval_unchecked(f, ExtendedReal::from_double(y));
}

/// Closed-form step representation of y -> geninv_eval(f, y).
///
/// Breakpoints are the distinct finite levels of f; the result is
/// non-decreasing, right-continuous and equal to +inf at +inf.
inline StepFunction geninv(const StepFunction& f)
{
    detail::require_monotone(f);

    std::vector<double> levels;
    for (const auto& v : f.values()) {
        if (v.is_finite() && (levels.empty() || levels.back() != v.finite_value()))
            levels.push_back(v.finite_value());
    }

    std::vector<ExtendedReal> out;
    out.reserve(levels.size() + 1);
    if (levels.empty()) {
        // All levels are sentinels: every finite y sees the same superlevel set.
        out.push_back(detail::geninv_eval_unchecked(f, 0.0));
    } else {
        const auto vals = f.values();
        const auto n_neg = std::count_if(vals.begin(), vals.end(), [](const ExtendedReal& v) { return v.is_neg_inf(); });
        out.push_back(n_neg == 0 ? NEG_INF : ExtendedReal(f.breakpoints()[static_cast<std::size_t>(n_neg) - 1]));
    }
    for (double level : levels) out.push_back(detail::geninv_eval_unchecked(f, level));
    return StepFunction(std::move(levels), std::move(out), POS_INF);
}

/// Continuous non-decreasing map given by knots and linear interpolation,
/// extended linearly beyond the end knots with the end-segment slopes.
class PiecewiseLinearMap {
public:
    PiecewiseLinearMap(std::vector<double> xs, std::vector<double> ys) : xs_(std::move(xs)), ys_(std::move(ys))
    {
        if (xs_.size() != ys_.size() || xs_.size() < 2)
            throw RangeError("piecewise-linear map needs at least two knots with matching coordinates");
        for (std::size_t i = 0; i < xs_.size(); ++i) {
            if (!std::isfinite(xs_[i]) || !std::isfinite(ys_[i])) throw RangeError("knots must be finite");
            if (i > 0 && !(xs_[i - 1] < xs_[i])) throw RangeError("knot abscissae must be strictly increasing");
            if (i > 0 && ys_[i] < ys_[i - 1]) throw NotMonotoneError("piecewise-linear map must be non-decreasing");
        }
        slope_left_ = (ys_[1] - ys_[0]) / (xs_[1] - xs_[0]);
        const std::size_t n = xs_.size() - 1;
        slope_right_ = (ys_[n] - ys_[n - 1]) / (xs_[n] - xs_[n - 1]);
    }

    static PiecewiseLinearMap identity() { return PiecewiseLinearMap({0.0, 1.0}, {0.0, 1.0}); }

    std::span<const double> xs() const { return xs_; }
    std::span<const double> ys() const { return ys_; }

    bool strictly_increasing() const
    {
        for (std::size_t i = 1; i < ys_.size(); ++i)
            if (!(ys_[i - 1] < ys_[i])) return false;
        return true;
    }

    /// Strictly increasing with unbounded range, i.e. a bijection of the real line.
    bool surjective() const { return strictly_increasing() && slope_left_ > 0 && slope_right_ > 0; }

    double operator()(double x) const
    {
        const std::size_t n = xs_.size() - 1;
        if (x < xs_[0]) return ys_[0] - (xs_[0] - x) * slope_left_;
        if (x >= xs_[n]) return ys_[n] + (x - xs_[n]) * slope_right_;
        const auto j = static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin());
        if (x == xs_[j - 1]) return ys_[j - 1];
        return interpolate(ys_, xs_, j, x);
    }

    ExtendedReal operator()(ExtendedReal x) const
    {
        if (x.is_finite()) return (*this)(x.finite_value());
        if (x.is_pos_inf()) return slope_right_ > 0 ? POS_INF : ExtendedReal(ys_.back());
        return slope_left_ > 0 ? NEG_INF : ExtendedReal(ys_.front());
    }

    /// inf{x : G(x) >= b}.
    ExtendedReal lower_inverse(ExtendedReal b) const
    {
        if (b.is_neg_inf()) return NEG_INF;
        if (b.is_pos_inf()) return POS_INF;
        const double v = b.finite_value();
        const std::size_t n = xs_.size() - 1;
        const auto j = static_cast<std::size_t>(std::lower_bound(ys_.begin(), ys_.end(), v) - ys_.begin());
        if (j == 0) {
            if (slope_left_ <= 0) return NEG_INF;
            return v == ys_[0] ? ExtendedReal(xs_[0]) : ExtendedReal(xs_[0] - (ys_[0] - v) / slope_left_);
        }
        if (j > n) return slope_right_ > 0 ? ExtendedReal(xs_[n] + (v - ys_[n]) / slope_right_) : POS_INF;
        if (ys_[j] == v) return xs_[j];
        return interpolate(xs_, ys_, j, v);
    }

    /// inf{x : G(x) > b}, the monotone generalized inverse of the map.
    ExtendedReal upper_inverse(ExtendedReal b) const
    {
        if (b.is_neg_inf()) return NEG_INF;
        if (b.is_pos_inf()) return POS_INF;
        const double v = b.finite_value();
        const std::size_t n = xs_.size() - 1;
        const auto j = static_cast<std::size_t>(std::upper_bound(ys_.begin(), ys_.end(), v) - ys_.begin());
        if (j == 0) return slope_left_ > 0 ? ExtendedReal(xs_[0] - (ys_[0] - v) / slope_left_) : NEG_INF;
        if (j > n) return slope_right_ > 0 ? ExtendedReal(xs_[n] + (v - ys_[n]) / slope_right_) : POS_INF;
        if (ys_[j - 1] == v) return xs_[j - 1];
        return interpolate(xs_, ys_, j, v);
    }

private:
    // Linear interpolation of `to` over segment (j-1, j) of `from`.
    static double interpolate(const std::vector<double>& to, const std::vector<double>& from, std::size_t j, double v)
    {
        return to[j - 1] + (v - from[j - 1]) * (to[j] - to[j - 1]) / (from[j] - from[j - 1]);
    }

    std::vector<double> xs_;
    std::vector<double> ys_;
    double slope_left_ = 0.0;
    double slope_right_ = 0.0;
};

inline ExtendedReal geninv_eval(const PiecewiseLinearMap& g, ExtendedReal y) { return g.upper_inverse(y); }

/// Step representation of x -> eval(f, g(x)).
///
/// g is continuous and non-decreasing, so {x : g(x) >= b} is a closed up-set
/// and every breakpoint b of f turns into the breakpoint inf{x : g(x) >= b}.
inline StepFunction compose(const StepFunction& f, const PiecewiseLinearMap& g)
{
    const auto bp = f.breakpoints();
    const auto vals = f.values();

    std::size_t passed = 0; // breakpoints of f already below every g(x)
    std::vector<double> out_bp;
    std::vector<ExtendedReal> out_vals;
    for (std::size_t i = 0; i < bp.size(); ++i) {
        const ExtendedReal c = g.lower_inverse(bp[i]);
        if (c.is_neg_inf()) {
            passed = i + 1;
        } else if (c.is_finite()) {
            if (!out_bp.empty() && out_bp.back() == c.finite_value()) {
                out_vals.back() = vals[i + 1];
            } else {
                out_bp.push_back(c.finite_value());
                out_vals.push_back(vals[i + 1]);
            }
        }
    }
    out_vals.insert(out_vals.begin(), vals[passed]);
    // Breakpoints whose preimage is +inf never fire and were skipped above.
    return StepFunction(std::move(out_bp), std::move(out_vals), eval(f, g(POS_INF)));
}

} // namespace scdt
