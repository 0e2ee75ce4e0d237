// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "scdt/errors.hpp"
#include "scdt/extended_real.hpp"
#include "scdt/measures.hpp"
#include "scdt/step_function.hpp"

namespace scdt {

inline constexpr std::size_t kDefaultQuantiles = 1024;

/// Reference measure plus the M-point midpoint quantile grid on which every
/// transform is sampled: q_j = (j - 1/2) / M, x_j = F_mu0^{-1}(q_j).
///
/// The grid stays strictly inside (0, 1), so the +-inf endpoint values of a
/// generalized inverse are never sampled.
class TransformConfig {
public:
    explicit TransformConfig(ReferenceMeasure reference = ReferenceMeasure::uniform(0.0, 1.0),
                             std::size_t m = kDefaultQuantiles)
        : reference_(std::move(reference))
    {
        if (m < 2) throw RangeError("transform needs at least two quantile points");
        quantiles_.resize(m);
        points_.resize(m);
        levels_.resize(m);
        const double mass = reference_.total_mass();
        for (std::size_t j = 0; j < m; ++j) {
            quantiles_[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
            points_[j] = reference_.quantile(quantiles_[j]);
            levels_[j] = reference_.cdf(points_[j]) / mass;
        }
    }

    const ReferenceMeasure& reference() const { return reference_; }
    std::size_t size() const { return quantiles_.size(); }
    std::span<const double> quantiles() const { return quantiles_; }
    /// Reference quantile points x_j.
    std::span<const double> reference_points() const { return points_; }
    /// F_mu0(x_j) / |mu0|, which equals q_j up to rounding.
    std::span<const double> levels() const { return levels_; }

    friend bool operator==(const TransformConfig& a, const TransformConfig& b)
    {
        return a.reference_ == b.reference_ && a.quantiles_.size() == b.quantiles_.size();
    }

private:
    ReferenceMeasure reference_;
    std::vector<double> quantiles_;
    std::vector<double> points_;
    std::vector<double> levels_;
};

/// Sampled transform of a positive measure: nu* on the quantile grid plus the
/// total mass. The zero measure is encoded as all-zero samples with mass 0;
/// the mass field alone tells it apart from a measure concentrated at 0.
struct CdtResult {
    std::vector<ExtendedReal> samples;
    double mass = 0.0;

    bool is_zero() const { return mass == 0.0; }

    static CdtResult zero(std::size_t m) { return {std::vector<ExtendedReal>(m, ExtendedReal(0.0)), 0.0}; }

    void validate() const
    {
        if (!std::isfinite(mass) || mass < 0) throw MassError("transform mass must be finite and non-negative");
        if (!std::is_sorted(samples.begin(), samples.end()))
            throw NotMonotoneError("transform samples must be non-decreasing");
        if (mass == 0 && std::any_of(samples.begin(), samples.end(), [](const ExtendedReal& s) { return s != 0.0; }))
            throw MassError("a zero-mass transform must have all-zero samples");
    }

    friend bool operator==(const CdtResult&, const CdtResult&) = default;
};

/// The 4-tuple (f, r, g, s): transforms of the positive and negative Jordan parts.
struct ScdtResult {
    CdtResult plus;
    CdtResult minus;

    friend bool operator==(const ScdtResult&, const ScdtResult&) = default;
};

namespace detail {

// nu*(x_j) = F_nu^dagger(|nu| * F_mu0(x_j) / |mu0|).
inline std::vector<ExtendedReal> star_samples(const DiscreteMeasure& nu, const TransformConfig& cfg)
{
    const StepFunction f = cdf(nu);
    const double mass = nu.total_mass();
    std::vector<ExtendedReal> out;
    out.reserve(cfg.size());
    for (double level : cfg.levels()) out.push_back(geninv_eval(f, mass * level));
    return out;
}

inline void require_grid(const CdtResult& c, const TransformConfig& cfg)
{
    if (c.samples.size() != cfg.size()) throw RangeError("transform samples do not match the quantile grid");
}

} // namespace detail

/// CDT of a probability measure: F_nu^dagger sampled at F_mu0(x_j) / |mu0|.
inline std::vector<ExtendedReal> cdt_probability(const DiscreteMeasure& nu, const TransformConfig& cfg)
{
    if (!(std::abs(nu.total_mass() - 1.0) <= 1e-12)) throw MassError("probability transform needs unit total mass");
    return detail::star_samples(nu, cfg);
}

inline CdtResult cdt_positive(const DiscreteMeasure& nu, const TransformConfig& cfg)
{
    if (nu.is_zero()) return CdtResult::zero(cfg.size());
    return {detail::star_samples(nu, cfg), nu.total_mass()};
}

inline ScdtResult scdt_forward(const SignedMeasure& s, const TransformConfig& cfg)
{
    auto [pos, neg] = jordan_parts(s);
    return {cdt_positive(pos, cfg), cdt_positive(neg, cfg)};
}

/// mass * f#(mu0 / |mu0|); the zero tuple maps to the zero measure.
inline DiscreteMeasure cdt_inverse(const CdtResult& c, const TransformConfig& cfg)
{
    detail::require_grid(c, cfg);
    c.validate();
    if (c.is_zero()) return {};
    return pushforward(c.samples, c.mass);
}

struct InverseDiagnostics {
    /// Pairs of positive/negative atom locations closer than the collision tolerance.
    std::vector<std::pair<ExtendedReal, ExtendedReal>> near_collisions;
};

inline constexpr double kCollisionTolerance = 1e-9;

/// r f#(mu0/|mu0|) - s g#(mu0/|mu0|). Coincident atoms in the two channels
/// violate mutual singularity and throw; atoms within kCollisionTolerance
/// (relative to max(1, |x|)) are reported through `diag` when given.
inline SignedMeasure scdt_inverse(const ScdtResult& t, const TransformConfig& cfg, InverseDiagnostics* diag = nullptr)
{
    DiscreteMeasure pos = cdt_inverse(t.plus, cfg);
    DiscreteMeasure neg = cdt_inverse(t.minus, cfg);

    auto a = pos.atoms();
    auto b = neg.atoms();
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const ExtendedReal x = a[i].location;
        const ExtendedReal y = b[j].location;
        if (x == y) throw SingularityError("positive and negative channels push forward onto the same atom");
        if (diag != nullptr && x.is_finite() && y.is_finite()) {
            const double xv = x.finite_value();
            const double yv = y.finite_value();
            if (std::abs(xv - yv) <= kCollisionTolerance * std::max({1.0, std::abs(xv), std::abs(yv)}))
                diag->near_collisions.emplace_back(x, y);
        }
        if (x < y)
            ++i;
        else
            ++j;
    }
    return SignedMeasure(std::move(pos), std::move(neg));
}

} // namespace scdt
