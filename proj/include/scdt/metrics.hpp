// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "scdt/errors.hpp"
#include "scdt/measures.hpp"
#include "scdt/transform.hpp"

namespace scdt {

struct DistanceComponent {
    std::string name;
    double value = 0.0;
};

/// A distance and, optionally, the terms whose squares add up to its square.
struct DistanceReport {
    double value = 0.0;
    std::vector<DistanceComponent> components;

    double component(const std::string& name) const
    {
        for (const auto& c : components)
            if (c.name == name) return c.value;
        throw RangeError("distance report has no component named " + name);
    }
};

namespace detail {

inline void require_finite_atoms(const DiscreteMeasure& m)
{
    if (m.has_infinite_atoms()) throw RangeError("atoms at infinity have infinite second moment");
}

// Quantile function of m / |m| at the midpoint levels (j - 1/2) / M.
inline std::vector<double> normalized_quantiles(const DiscreteMeasure& m, std::size_t grid)
{
    require_finite_atoms(m);
    const StepFunction f = cdf(m);
    const double mass = m.total_mass();
    std::vector<double> out(grid);
    for (std::size_t j = 0; j < grid; ++j) {
        const double q = (static_cast<double>(j) + 0.5) / static_cast<double>(grid);
        out[j] = geninv_eval(f, mass * q).finite_value();
    }
    return out;
}

inline double mean_squared_gap(const std::vector<double>& a, const std::vector<double>& b)
{
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) acc += (a[j] - b[j]) * (a[j] - b[j]);
    return acc / static_cast<double>(a.size());
}

inline void require_grid_size(std::size_t grid)
{
    if (grid < 1) throw RangeError("quantile grid needs at least one point");
}

} // namespace detail

/// 2-Wasserstein distance between probability measures through the
/// quantile formula, integrated with the midpoint rule on M levels.
inline double w2(const DiscreteMeasure& nu, const DiscreteMeasure& eta, std::size_t grid = kDefaultQuantiles)
{
    detail::require_grid_size(grid);
    for (const auto* m : {&nu, &eta})
        if (!(std::abs(m->total_mass() - 1.0) <= 1e-12)) throw MassError("w2 needs probability measures");
    return std::sqrt(detail::mean_squared_gap(detail::normalized_quantiles(nu, grid),
                                              detail::normalized_quantiles(eta, grid)));
}

/// The same quantile formula integrated exactly: both quantile functions are
/// step functions in the level, so the integral is a finite sum over the
/// merged jump levels.
inline double w2_exact(const DiscreteMeasure& nu, const DiscreteMeasure& eta)
{
    for (const auto* m : {&nu, &eta}) {
        if (!(std::abs(m->total_mass() - 1.0) <= 1e-12)) throw MassError("w2 needs probability measures");
        detail::require_finite_atoms(*m);
    }
    const auto a = nu.atoms();
    const auto b = eta.atoms();
    std::size_t i = 0, j = 0;
    double ca = a[0].weight, cb = b[0].weight; // cumulative level at the end of the current atom
    double level = 0.0, acc = 0.0;
    while (i < a.size() && j < b.size()) {
        const double next = std::min(ca, cb);
        const double d = a[i].location.finite_value() - b[j].location.finite_value();
        acc += (next - level) * d * d;
        level = next;
        if (ca <= next && i + 1 < a.size()) ca += a[++i].weight;
        else if (ca <= next) ++i;
        if (cb <= next && j + 1 < b.size()) cb += b[++j].weight;
        else if (cb <= next) ++j;
    }
    return std::sqrt(acc);
}

/// Unbalanced distance on finite positive measures: the Wasserstein distance
/// of the normalized measures combined with the mass gap. When one side is
/// the zero measure the quantile term is the L2 norm of the other side's
/// normalized quantile function; two zero measures are at distance 0.
inline DistanceReport d_w2(const DiscreteMeasure& nu, const DiscreteMeasure& eta, std::size_t grid = kDefaultQuantiles)
{
    detail::require_grid_size(grid);
    detail::require_finite_atoms(nu);
    detail::require_finite_atoms(eta);

    double quantile_sq = 0.0;
    if (!nu.is_zero() && !eta.is_zero()) {
        quantile_sq = detail::mean_squared_gap(detail::normalized_quantiles(nu, grid),
                                               detail::normalized_quantiles(eta, grid));
    } else if (!nu.is_zero() || !eta.is_zero()) {
        const auto q = detail::normalized_quantiles(nu.is_zero() ? eta : nu, grid);
        quantile_sq = detail::mean_squared_gap(q, std::vector<double>(grid, 0.0));
    }
    const double mass_gap = std::abs(nu.total_mass() - eta.total_mass());
    const double quantile = std::sqrt(quantile_sq);
    return {std::sqrt(quantile_sq + mass_gap * mass_gap), {{"quantile", quantile}, {"mass", mass_gap}}};
}

/// Signed distance: part-wise d_w2 on the Jordan decompositions.
inline DistanceReport d_s(const SignedMeasure& a, const SignedMeasure& b, std::size_t grid = kDefaultQuantiles)
{
    const DistanceReport plus = d_w2(a.positive(), b.positive(), grid);
    const DistanceReport minus = d_w2(a.negative(), b.negative(), grid);
    return {std::sqrt(plus.value * plus.value + minus.value * minus.value),
            {{"plus_quantile", plus.components[0].value},
             {"plus_mass", plus.components[1].value},
             {"minus_quantile", minus.components[0].value},
             {"minus_mass", minus.components[1].value}}};
}

/// Norm of t1 - t2 in (L2(mu0) x R)^2 on the quantile grid:
/// sqrt( sum over parts of |mu0|/M * sum_j (df_j)^2 + (dmass)^2 ).
inline double transform_l2(const ScdtResult& t1, const ScdtResult& t2, const TransformConfig& cfg)
{
    const double weight = cfg.reference().total_mass() / static_cast<double>(cfg.size());
    double total = 0.0;
    for (const auto& [x, y] : {std::pair{&t1.plus, &t2.plus}, std::pair{&t1.minus, &t2.minus}}) {
        if (x->samples.size() != cfg.size() || y->samples.size() != cfg.size())
            throw RangeError("transforms were sampled on different quantile grids");
        double acc = 0.0;
        for (std::size_t j = 0; j < cfg.size(); ++j) {
            const double d = x->samples[j].finite_value() - y->samples[j].finite_value();
            acc += d * d;
        }
        const double dm = x->mass - y->mass;
        total += weight * acc + dm * dm;
    }
    return std::sqrt(total);
}

} // namespace scdt
