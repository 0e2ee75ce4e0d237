// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scdt/errors.hpp"
#include "scdt/extended_real.hpp"
#include "scdt/step_function.hpp"

namespace scdt {

struct Atom {
    ExtendedReal location;
    double weight = 0.0;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finite positive measure on the extended real line as a sorted list of
/// weighted atoms. Atoms at -inf and +inf are allowed.
class DiscreteMeasure {
public:
    /// The zero measure.
    DiscreteMeasure() = default;

    /// Sorts atoms, merges duplicate locations and drops zero weights.
    explicit DiscreteMeasure(std::vector<Atom> atoms) : atoms_(normalize(std::move(atoms)))
    {
        for (const auto& a : atoms_) total_ += a.weight;
    }

    /// Like the plain constructor, but pins total_mass() to a known value
    /// (e.g. an exact mass that the summed weights only reproduce to rounding).
    static DiscreteMeasure with_total(std::vector<Atom> atoms, double total)
    {
        DiscreteMeasure m(std::move(atoms));
        if (!(std::abs(m.total_ - total) <= 1e-12 * std::max(1.0, std::abs(total))))
            throw MassError("declared total mass disagrees with the sum of weights");
        m.total_ = total;
        return m;
    }

    static DiscreteMeasure dirac(ExtendedReal x, double weight = 1.0) { return DiscreteMeasure({{x, weight}}); }

    std::span<const Atom> atoms() const { return atoms_; }
    double total_mass() const { return total_; }
    bool is_zero() const { return atoms_.empty(); }

    bool has_infinite_atoms() const
    {
        return !atoms_.empty() && (!atoms_.front().location.is_finite() || !atoms_.back().location.is_finite());
    }

    DiscreteMeasure scaled(double c) const
    {
        if (!(c >= 0) || !std::isfinite(c)) throw MassError("measures can only be scaled by finite non-negative factors");
        std::vector<Atom> out(atoms_.begin(), atoms_.end());
        for (auto& a : out) a.weight *= c;
        return DiscreteMeasure(std::move(out));
    }

    friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

private:
    static std::vector<Atom> normalize(std::vector<Atom> atoms)
    {
        for (const auto& a : atoms) {
            if (!std::isfinite(a.weight) || a.weight < 0) throw MassError("atom weights must be finite and non-negative");
            if (a.location.is_finite() && !std::isfinite(a.location.finite_value()))
                throw RangeError("use the infinite sentinels for atoms at infinity");
        }
        std::stable_sort(atoms.begin(), atoms.end(),
                         [](const Atom& a, const Atom& b) { return a.location < b.location; });
        std::vector<Atom> out;
        out.reserve(atoms.size());
        for (const auto& a : atoms) {
            if (a.weight == 0) continue;
            if (!out.empty() && out.back().location == a.location)
                out.back().weight += a.weight;
            else
                out.push_back(a);
        }
        return out;
    }

    std::vector<Atom> atoms_;
    double total_ = 0.0;
};

/// F(x) = m([-inf, x]). Finite atoms become breakpoints, an atom at -inf
/// lifts the leading value and an atom at +inf only shows at F(+inf).
inline StepFunction cdf(const DiscreteMeasure& m)
{
    const double total = m.total_mass();
    std::vector<double> bp;
    std::vector<ExtendedReal> vals;
    double run = 0.0;
    auto atoms = m.atoms();
    std::size_t i = 0;
    if (i < atoms.size() && atoms[i].location.is_neg_inf()) run += atoms[i++].weight;
    vals.push_back(std::min(run, total));
    for (; i < atoms.size() && atoms[i].location.is_finite(); ++i) {
        run += atoms[i].weight;
        bp.push_back(atoms[i].location.finite_value());
        vals.push_back(std::min(run, total)); // pinned totals may sit an ulp below the running sum
    }
    return StepFunction(std::move(bp), std::move(vals), ExtendedReal(total));
}

/// Signed measure held as its Jordan decomposition.
class SignedMeasure {
public:
    SignedMeasure() = default;

    SignedMeasure(DiscreteMeasure positive, DiscreteMeasure negative)
        : positive_(std::move(positive)), negative_(std::move(negative))
    {
        check_disjoint(positive_, negative_);
    }

    /// Sums signed weights per location and splits them by sign.
    static SignedMeasure from_signed_atoms(const std::vector<std::pair<ExtendedReal, double>>& atoms)
    {
        std::vector<std::pair<ExtendedReal, double>> sorted(atoms);
        std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<Atom> pos, neg;
        for (std::size_t i = 0; i < sorted.size();) {
            double w = 0.0;
            std::size_t j = i;
            for (; j < sorted.size() && sorted[j].first == sorted[i].first; ++j) w += sorted[j].second;
            if (w > 0) pos.push_back({sorted[i].first, w});
            if (w < 0) neg.push_back({sorted[i].first, -w});
            i = j;
        }
        return SignedMeasure(DiscreteMeasure(std::move(pos)), DiscreteMeasure(std::move(neg)));
    }

    const DiscreteMeasure& positive() const { return positive_; }
    const DiscreteMeasure& negative() const { return negative_; }
    bool is_zero() const { return positive_.is_zero() && negative_.is_zero(); }
    double total_variation() const { return positive_.total_mass() + negative_.total_mass(); }
    SignedMeasure negated() const { return SignedMeasure(negative_, positive_); }

    friend bool operator==(const SignedMeasure&, const SignedMeasure&) = default;

    static void check_disjoint(const DiscreteMeasure& p, const DiscreteMeasure& n)
    {
        auto a = p.atoms();
        auto b = n.atoms();
        std::size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i].location == b[j].location)
                throw InvalidDecompositionError("positive and negative parts share an atom location");
            if (a[i].location < b[j].location)
                ++i;
            else
                ++j;
        }
    }

private:
    DiscreteMeasure positive_;
    DiscreteMeasure negative_;
};

inline std::pair<DiscreteMeasure, DiscreteMeasure> jordan_parts(const SignedMeasure& s)
{
    SignedMeasure::check_disjoint(s.positive(), s.negative());
    return {s.positive(), s.negative()};
}

/// Signed samples of a piecewise-constant density on N equal bins of [t0, t1].
struct GridDensity {
    double t0 = 0.0;
    double t1 = 1.0;
    std::vector<double> samples;

    void validate() const
    {
        if (!std::isfinite(t0) || !std::isfinite(t1) || !(t0 < t1)) throw RangeError("grid needs finite t0 < t1");
        if (samples.empty()) throw RangeError("grid needs at least one bin");
        if (!(dt() > 0)) throw RangeError("grid bin width underflows");
    }

    std::size_t size() const { return samples.size(); }
    double dt() const { return (t1 - t0) / static_cast<double>(samples.size()); }
    double center(std::size_t i) const { return t0 + (static_cast<double>(i) + 0.5) * dt(); }

    friend bool operator==(const GridDensity&, const GridDensity&) = default;
};

/// Midpoint binning: each nonzero sample becomes an atom at its bin centre
/// with weight |s_i| * dt, in the part matching its sign.
inline SignedMeasure measure_from_density(const GridDensity& d)
{
    d.validate();
    const double dt = d.dt();
    std::vector<Atom> pos, neg;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double s = d.samples[i];
        if (!std::isfinite(s)) throw RangeError("density samples must be finite");
        if (s > 0) pos.push_back({d.center(i), s * dt});
        if (s < 0) neg.push_back({d.center(i), -s * dt});
    }
    return SignedMeasure(DiscreteMeasure(std::move(pos)), DiscreteMeasure(std::move(neg)));
}

/// Bins a signed measure back onto [t0, t1] with N bins; the bin value is
/// (positive mass - negative mass) / dt.
inline GridDensity rebin(const SignedMeasure& m, double t0, double t1, std::size_t n)
{
    GridDensity out{t0, t1, std::vector<double>(n, 0.0)};
    out.validate();
    const double dt = out.dt();
    std::vector<double> pos(n, 0.0), neg(n, 0.0);
    auto accumulate = [&](const DiscreteMeasure& part, std::vector<double>& acc) {
        for (const auto& a : part.atoms()) {
            if (!a.location.is_finite()) throw RangeError("atoms at infinity cannot be binned");
            const double x = a.location.finite_value();
            if (x < t0 || x > t1) throw RangeError("atom at " + std::to_string(x) + " lies outside the grid");
            auto k = static_cast<std::size_t>(std::floor((x - t0) / dt));
            acc[std::min(k, n - 1)] += a.weight;
        }
    };
    accumulate(m.positive(), pos);
    accumulate(m.negative(), neg);
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = (pos[i] - neg[i]) / dt;
    return out;
}

/// Atomless reference measure with a continuous piecewise-linear CDF that is
/// strictly increasing between its first and last knot.
class ReferenceMeasure {
public:
    /// Knots (x_i, F(x_i)); F(x_0) must be 0 (no atom at x_0) and both
    /// coordinates strictly increasing.
    ReferenceMeasure(std::vector<double> xs, std::vector<double> cdf_values)
        : xs_(std::move(xs)), cs_(std::move(cdf_values))
    {
        if (xs_.size() < 2 || xs_.size() != cs_.size())
            throw ReferenceError("reference CDF needs at least two knots with matching coordinates");
        if (cs_.front() != 0.0) throw ReferenceError("reference CDF must start at 0, otherwise the first knot is an atom");
        for (std::size_t i = 0; i < xs_.size(); ++i) {
            if (!std::isfinite(xs_[i]) || !std::isfinite(cs_[i])) throw ReferenceError("reference knots must be finite");
            if (i > 0 && !(xs_[i - 1] < xs_[i])) throw ReferenceError("reference knot positions must be strictly increasing");
            if (i > 0 && !(cs_[i - 1] < cs_[i])) throw ReferenceError("reference CDF must be strictly increasing on its support");
        }
    }

    static ReferenceMeasure uniform(double a, double b, double mass = 1.0)
    {
        if (!(a < b)) throw ReferenceError("uniform reference needs a < b");
        if (!(mass > 0) || !std::isfinite(mass)) throw ReferenceError("reference mass must be positive and finite");
        return ReferenceMeasure({a, b}, {0.0, mass});
    }

    std::span<const double> xs() const { return xs_; }
    std::span<const double> cdf_values() const { return cs_; }
    double total_mass() const { return cs_.back(); }
    double support_min() const { return xs_.front(); }
    double support_max() const { return xs_.back(); }

    double cdf(double x) const
    {
        if (x <= xs_.front()) return 0.0;
        if (x >= xs_.back()) return cs_.back();
        const auto j = static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin());
        if (x == xs_[j - 1]) return cs_[j - 1];
        return cs_[j - 1] + (x - xs_[j - 1]) * (cs_[j] - cs_[j - 1]) / (xs_[j] - xs_[j - 1]);
    }

    /// Inverse of the normalized CDF; p must lie in [0, 1].
    double quantile(double p) const
    {
        if (!(p >= 0.0 && p <= 1.0)) throw RangeError("quantile level must lie in [0, 1]");
        const double c = p * total_mass();
        const auto j = static_cast<std::size_t>(std::lower_bound(cs_.begin(), cs_.end(), c) - cs_.begin());
        if (j >= cs_.size()) return xs_.back();
        if (cs_[j] == c) return xs_[j];
        return xs_[j - 1] + (c - cs_[j - 1]) * (xs_[j] - xs_[j - 1]) / (cs_[j] - cs_[j - 1]);
    }

    friend bool operator==(const ReferenceMeasure&, const ReferenceMeasure&) = default;

private:
    std::vector<double> xs_;
    std::vector<double> cs_;
};

inline double reference_cdf_eval(const ReferenceMeasure& ref, double x) { return ref.cdf(x); }
inline double reference_quantile(const ReferenceMeasure& ref, double p) { return ref.quantile(p); }

/// Empirical push-forward mass * f#(mu0 / |mu0|) of a monotone map sampled at
/// the M equal-mass quantile points of the reference: each sample carries
/// mass / M, coincident samples merge. The result's total mass is `mass`.
inline DiscreteMeasure pushforward(std::span<const ExtendedReal> samples, double mass)
{
    if (!std::isfinite(mass) || mass < 0) throw MassError("push-forward mass must be finite and non-negative");
    if (!std::is_sorted(samples.begin(), samples.end()))
        throw NotMonotoneError("push-forward map samples must be non-decreasing");
    if (mass == 0 || samples.empty()) {
        if (mass != 0) throw RangeError("push-forward of a positive mass needs at least one sample");
        return {};
    }
    const double m = static_cast<double>(samples.size());
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < samples.size();) {
        std::size_t j = i;
        while (j < samples.size() && samples[j] == samples[i]) ++j;
        atoms.push_back({samples[i], mass * (static_cast<double>(j - i) / m)});
        i = j;
    }
    return DiscreteMeasure::with_total(std::move(atoms), mass);
}

} // namespace scdt
