// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "scdt/errors.hpp"
#include "scdt/extended_real.hpp"
#include "scdt/measures.hpp"
#include "scdt/step_function.hpp"
#include "scdt/transform.hpp"

namespace scdt {

/// g(x) = x - a. Measures move right by a.
struct Translation {
    double a = 0.0;
};

/// g(x) = x / a with a > 0. Measures stretch by a.
struct Dilation {
    double a = 1.0;
};

/// g(x) = a x + b with a > 0.
struct Affine {
    double a = 1.0;
    double b = 0.0;
};

/// Strictly increasing surjection of the real line, acting on measures by
/// F_eta = F_nu o g, i.e. eta = (g^{-1})# nu.
class IncreasingReparam {
public:
    using Kind = std::variant<Translation, Dilation, Affine, PiecewiseLinearMap>;

    template <class K>
        requires std::constructible_from<Kind, K>
    IncreasingReparam(K&& k) : kind_(std::forward<K>(k)) // NOLINT(google-explicit-constructor)
    {
        std::visit(
            [](const auto& g) {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, Translation>) {
                    if (!std::isfinite(g.a)) throw RangeError("translation must be finite");
                } else if constexpr (std::is_same_v<T, Dilation>) {
                    if (!(g.a > 0) || !std::isfinite(g.a)) throw NotMonotoneError("dilation factor must be positive");
                } else if constexpr (std::is_same_v<T, Affine>) {
                    if (!(g.a > 0) || !std::isfinite(g.a) || !std::isfinite(g.b))
                        throw NotMonotoneError("affine reparameterization needs a positive slope");
                } else {
                    if (!g.surjective())
                        throw NotMonotoneError("piecewise-linear reparameterization must be a strictly increasing bijection");
                }
            },
            kind_);
    }

    static IncreasingReparam identity() { return Translation{0.0}; }

    const Kind& kind() const { return kind_; }

    double forward(double x) const
    {
        return std::visit(
            [x](const auto& g) -> double {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, Translation>) return x - g.a;
                else if constexpr (std::is_same_v<T, Dilation>) return x / g.a;
                else if constexpr (std::is_same_v<T, Affine>) return g.a * x + g.b;
                else return g(x);
            },
            kind_);
    }

    /// g^{-1}; for a continuous strictly increasing g this is also g†.
    ExtendedReal inverse(ExtendedReal y) const
    {
        if (!y.is_finite()) return y;
        const double v = y.finite_value();
        return std::visit(
            [v](const auto& g) -> ExtendedReal {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, Translation>) return v + g.a;
                else if constexpr (std::is_same_v<T, Dilation>) return g.a * v;
                else if constexpr (std::is_same_v<T, Affine>) return (v - g.b) / g.a;
                else return g.upper_inverse(v);
            },
            kind_);
    }

    /// Coefficients (p, q) with g^{-1}(y) = p y + q, for the affine kinds.
    std::optional<std::pair<double, double>> affine_inverse() const
    {
        if (const auto* t = std::get_if<Translation>(&kind_)) return std::pair{1.0, t->a};
        if (const auto* d = std::get_if<Dilation>(&kind_)) return std::pair{d->a, 0.0};
        if (const auto* f = std::get_if<Affine>(&kind_)) return std::pair{1.0 / f->a, -f->b / f->a};
        return std::nullopt;
    }

private:
    Kind kind_;
};

namespace detail {

inline DiscreteMeasure relocate(const DiscreteMeasure& m, const IncreasingReparam& g)
{
    std::vector<Atom> out;
    out.reserve(m.atoms().size());
    for (const auto& a : m.atoms()) out.push_back({g.inverse(a.location), a.weight});
    return DiscreteMeasure(std::move(out));
}

inline CdtResult map_samples(const CdtResult& c, const IncreasingReparam& g)
{
    if (c.is_zero()) return c;
    CdtResult out{c.samples, c.mass};
    for (auto& s : out.samples) s = g.inverse(s);
    return out;
}

} // namespace detail

/// eta with F_eta = F_nu o g: every atom moves to g^{-1}(x), weights are kept,
/// so both Jordan masses are preserved exactly.
inline SignedMeasure apply_reparam(const SignedMeasure& s, const IncreasingReparam& g)
{
    return SignedMeasure(detail::relocate(s.positive(), g), detail::relocate(s.negative(), g));
}

/// Transform of apply_reparam(s, g) predicted from the transform of s:
/// samples go through g† = g^{-1}, masses are unchanged, zero parts stay zero.
inline ScdtResult predict_transform_under_reparam(const ScdtResult& t, const IncreasingReparam& g)
{
    return {detail::map_samples(t.plus, g), detail::map_samples(t.minus, g)};
}

/// The reparameterization k with k^{-1} = alpha g^{-1} + (1 - alpha) h^{-1}.
inline IncreasingReparam blend_inverse(const IncreasingReparam& g, const IncreasingReparam& h, double alpha)
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw RangeError("blend weight must lie in [0, 1]");
    const auto ag = g.affine_inverse();
    const auto ah = h.affine_inverse();
    if (ag && ah) {
        const double p = alpha * ag->first + (1.0 - alpha) * ah->first;
        const double q = alpha * ag->second + (1.0 - alpha) * ah->second;
        return Affine{1.0 / p, -q / p};
    }
    // k^{-1} is piecewise linear with kinks where either inverse has one.
    std::set<double> knots;
    for (const auto* r : {&g, &h})
        if (const auto* m = std::get_if<PiecewiseLinearMap>(&r->kind()))
            knots.insert(m->ys().begin(), m->ys().end());
    std::vector<double> ys(knots.begin(), knots.end());
    std::vector<double> xs;
    xs.reserve(ys.size());
    for (double y : ys)
        xs.push_back(alpha * g.inverse(y).finite_value() + (1.0 - alpha) * h.inverse(y).finite_value());
    return PiecewiseLinearMap(std::move(xs), std::move(ys));
}

/// alpha T(eta_g) + (1 - alpha) T(eta_h) with eta_r = apply_reparam(nu, r).
/// For a class generated by an affine family this is the transform of the
/// member generated by blend_inverse(g, h, alpha).
inline ScdtResult convexity_probe(const SignedMeasure& nu, const IncreasingReparam& g, const IncreasingReparam& h,
                                  double alpha, const TransformConfig& cfg)
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw RangeError("blend weight must lie in [0, 1]");
    const ScdtResult tg = scdt_forward(apply_reparam(nu, g), cfg);
    const ScdtResult th = scdt_forward(apply_reparam(nu, h), cfg);
    auto mix = [alpha](const CdtResult& x, const CdtResult& y) {
        if (x.is_zero() && y.is_zero()) return x;
        CdtResult out;
        out.samples.reserve(x.samples.size());
        for (std::size_t j = 0; j < x.samples.size(); ++j) {
            const ExtendedReal a = x.samples[j];
            const ExtendedReal b = y.samples[j];
            if (a.is_finite() && b.is_finite())
                out.samples.emplace_back(alpha * a.finite_value() + (1.0 - alpha) * b.finite_value());
            else
                out.samples.push_back(alpha == 0.0 ? b : a);
        }
        out.mass = alpha * x.mass + (1.0 - alpha) * y.mass;
        return out;
    };
    return {mix(tg.plus, th.plus), mix(tg.minus, th.minus)};
}

// ---------------------------------------------------------------------------
// Synthetic three-class signals
// ---------------------------------------------------------------------------

enum class ClassTemplate { gabor, sawtooth, square };

inline std::string_view template_name(ClassTemplate t)
{
    switch (t) {
    case ClassTemplate::gabor: return "gabor";
    case ClassTemplate::sawtooth: return "sawtooth";
    default: return "square";
    }
}

inline ClassTemplate parse_template(std::string_view name)
{
    if (name == "gabor") return ClassTemplate::gabor;
    if (name == "sawtooth") return ClassTemplate::sawtooth;
    if (name == "square") return ClassTemplate::square;
    throw ParseError("unknown class template: " + std::string(name));
}

/// Shape constants shared by the templates. They are declared defaults: a
/// Gaussian window centred on the middle of the default grid and a carrier
/// with three periods across the window.
struct TemplateShape {
    double center = 2.25;
    double window_width = 0.35;
    double period = 0.4;
    double amplitude = 1.0;
};

/// Closed-form template value at u; all three cross zero.
inline double template_value(ClassTemplate t, double u, const TemplateShape& shape = {})
{
    const double d = u - shape.center;
    const double window = shape.amplitude * std::exp(-0.5 * (d / shape.window_width) * (d / shape.window_width));
    const double phase = d / shape.period;
    switch (t) {
    case ClassTemplate::gabor: return window * std::cos(2.0 * std::numbers::pi * phase);
    case ClassTemplate::sawtooth: {
        const double frac = phase + 0.5 - std::floor(phase + 0.5);
        return window * (2.0 * frac - 1.0);
    }
    default: {
        const double s = std::sin(2.0 * std::numbers::pi * phase);
        return window * (s > 0 ? 1.0 : (s < 0 ? -1.0 : 0.0));
    }
    }
}

struct GenConfig {
    double t0 = -0.5;
    double t1 = 5.0;
    std::size_t grid_size = 1024;
    double a_min = 0.75;
    double a_max = 2.0;
    double b_min = -0.25;
    double b_max = 0.25;
    double noise_sigma = 0.02;
    /// Total number of signals. Signals come in consecutive pairs of one class:
    /// signal i belongs to class (i / 2) mod classes.size().
    std::size_t count = 500;
    std::vector<ClassTemplate> classes{ClassTemplate::gabor, ClassTemplate::sawtooth, ClassTemplate::square};
    std::uint64_t seed = 0;
    TemplateShape shape{};

    void validate() const
    {
        if (!(t0 < t1)) throw RangeError("generator grid needs t0 < t1");
        if (grid_size < 1) throw RangeError("generator grid needs at least one sample");
        if (!(a_min <= a_max) || !(a_min > 0)) throw RangeError("dilation range must be a nonempty subset of (0, inf)");
        if (!(b_min <= b_max)) throw RangeError("translation range must be nonempty");
        if (!(noise_sigma >= 0)) throw RangeError("noise level must be non-negative");
        if (classes.empty()) throw RangeError("generator needs at least one class");
        if (count == 0) throw RangeError("generator needs a positive signal count");
    }
};

struct LabeledSignal {
    GridDensity signal;
    int label = 0;
    double a = 1.0;
    double b = 0.0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace detail

/// Draws one member per index: class (i / 2) mod C, (a, b) uniform in the
/// configured ranges, density a * template(a t + b) on the bin centres plus
/// Gaussian noise. Each index has its own derived seed.
inline std::vector<LabeledSignal> generate_dataset(const GenConfig& cfg)
{
    cfg.validate();
    std::vector<LabeledSignal> out;
    out.reserve(cfg.count);
    for (std::size_t i = 0; i < cfg.count; ++i) {
        std::mt19937_64 rng(detail::splitmix64(cfg.seed ^ detail::splitmix64(i)));
        std::uniform_real_distribution<double> ua(cfg.a_min, cfg.a_max);
        std::uniform_real_distribution<double> ub(cfg.b_min, cfg.b_max);
        const double a = cfg.a_min == cfg.a_max ? cfg.a_min : ua(rng);
        const double b = cfg.b_min == cfg.b_max ? cfg.b_min : ub(rng);
        const int label = static_cast<int>((i / 2) % cfg.classes.size());
        const ClassTemplate tpl = cfg.classes[static_cast<std::size_t>(label)];

        GridDensity d{cfg.t0, cfg.t1, std::vector<double>(cfg.grid_size)};
        std::normal_distribution<double> noise(0.0, cfg.noise_sigma > 0 ? cfg.noise_sigma : 1.0);
        for (std::size_t k = 0; k < cfg.grid_size; ++k) {
            double v = a * template_value(tpl, a * d.center(k) + b, cfg.shape);
            if (cfg.noise_sigma > 0) v += noise(rng);
            d.samples[k] = v;
        }
        out.push_back({std::move(d), label, a, b});
    }
    return out;
}

} // namespace scdt
