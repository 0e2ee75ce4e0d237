// SPDX-License-Identifier: Apache-2.0
// Independent oracles and random generators shared by the unit tests and the
// acceptance runner. Nothing here calls the library's inverse or transform
// code paths; the oracles use only evaluation and plain arithmetic.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <random>
#include <utility>
#include <vector>

#include "scdt/extended_real.hpp"
#include "scdt/measures.hpp"
#include "scdt/step_function.hpp"

namespace scdt::testing {

// inf{x : F(x) > y} by scanning -inf, every breakpoint, then +inf. For a step
// function the superlevel set's infimum is one of those points.
inline ExtendedReal inf_scan(const StepFunction& f, ExtendedReal y)
{
    if (eval(f, NEG_INF) > y) return NEG_INF;
    for (double x : f.breakpoints())
        if (eval(f, x) > y) return x;
    return POS_INF;
}

// Same infimum over a uniform grid on [lo, hi]; returns the first grid point
// where F exceeds y, or +inf.
inline ExtendedReal inf_scan_grid(const StepFunction& f, double y, double lo, double hi, std::size_t n)
{
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
        if (eval(f, x) > y) return x;
    }
    return POS_INF;
}

// Sum of weights at locations <= x, straight from a raw (unsorted, unmerged) list.
inline double prefix_sum_cdf(const std::vector<Atom>& atoms, ExtendedReal x)
{
    double s = 0.0;
    for (const auto& a : atoms)
        if (a.location <= x) s += a.weight;
    return s;
}

// Dense two-phase simplex with Bland's rule for min c.x subject to A x = b,
// x >= 0, b >= 0. Small problems only.
inline double simplex_min(std::vector<std::vector<double>> a, std::vector<double> b, const std::vector<double>& c)
{
    const std::size_t m = a.size();
    const std::size_t n = c.size();
    const std::size_t cols = n + m; // structural + artificial
    std::vector<std::vector<double>> t(m, std::vector<double>(cols + 1, 0.0));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
        t[i][n + i] = 1.0;
        t[i][cols] = b[i];
        basis[i] = n + i;
    }
    const double eps = 1e-12;

    auto run = [&](const std::vector<double>& cost, std::size_t allowed) {
        for (int iter = 0; iter < 100000; ++iter) {
            std::size_t enter = cols;
            for (std::size_t j = 0; j < allowed; ++j) {
                double rc = cost[j];
                for (std::size_t i = 0; i < m; ++i) rc -= cost[basis[i]] * t[i][j];
                if (rc < -eps) {
                    enter = j;
                    break;
                }
            }
            if (enter == cols) return;
            std::size_t leave = m;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i) {
                if (t[i][enter] > eps) {
                    const double r = t[i][cols] / t[i][enter];
                    if (r < best - eps || (std::abs(r - best) <= eps && leave < m && basis[i] < basis[leave])) {
                        best = r;
                        leave = i;
                    }
                }
            }
            if (leave == m) throw std::runtime_error("simplex: unbounded");
            const double p = t[leave][enter];
            for (auto& v : t[leave]) v /= p;
            for (std::size_t i = 0; i < m; ++i) {
                if (i == leave || t[i][enter] == 0.0) continue;
                const double f = t[i][enter];
                for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[leave][j];
            }
            basis[leave] = enter;
        }
        throw std::runtime_error("simplex: iteration limit");
    };

    std::vector<double> phase1(cols, 0.0);
    for (std::size_t j = n; j < cols; ++j) phase1[j] = 1.0;
    run(phase1, cols);
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(t[i][j]) > 1e-9) {
                const double p = t[i][j];
                for (auto& v : t[i]) v /= p;
                for (std::size_t k = 0; k < m; ++k) {
                    if (k == i || t[k][j] == 0.0) continue;
                    const double f = t[k][j];
                    for (std::size_t jj = 0; jj <= cols; ++jj) t[k][jj] -= f * t[i][jj];
                }
                basis[i] = j;
                break;
            }
        }
    }
    std::vector<double> phase2(cols, 0.0);
    for (std::size_t j = 0; j < n; ++j) phase2[j] = c[j];
    run(phase2, n);
    double obj = 0.0;
    for (std::size_t i = 0; i < m; ++i) obj += phase2[basis[i]] * t[i][cols];
    return obj;
}

// Squared W2 between two finite-atom probability measures by solving the
// transport LP over all couplings.
inline double w2_squared_lp(const std::vector<Atom>& p, const std::vector<Atom>& q)
{
    const std::size_t n = p.size(), k = q.size();
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(n * k, 0.0);
        for (std::size_t j = 0; j < k; ++j) row[i * k + j] = 1.0;
        a.push_back(row);
        b.push_back(p[i].weight);
    }
    // The last column constraint is implied by the others.
    for (std::size_t j = 0; j + 1 < k; ++j) {
        std::vector<double> row(n * k, 0.0);
        for (std::size_t i = 0; i < n; ++i) row[i * k + j] = 1.0;
        a.push_back(row);
        b.push_back(q[j].weight);
    }
    std::vector<double> c(n * k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const double d = p[i].location.finite_value() - q[j].location.finite_value();
            c[i * k + j] = d * d;
        }
    return simplex_min(a, b, c);
}

// ---------------------------------------------------------------------------
// Random generators
// ---------------------------------------------------------------------------

// Monotone step function with breakpoints and values on a coarse dyadic grid,
// so ties between levels and probes are frequent and all arithmetic is exact.
// Leading -inf and trailing +inf levels appear with small probability.
inline StepFunction random_step(std::mt19937_64& rng, bool allow_sentinels = true)
{
    std::uniform_int_distribution<int> nb(0, 7);
    std::uniform_int_distribution<int> pos(-16, 16);
    std::uniform_int_distribution<int> inc(0, 3);
    std::bernoulli_distribution rare(0.1);
    const int k = nb(rng);
    std::vector<int> raw;
    for (int i = 0; i < k; ++i) raw.push_back(pos(rng));
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
    std::vector<double> bp;
    for (int r : raw) bp.push_back(r * 0.25);

    std::vector<ExtendedReal> vals;
    double level = std::uniform_int_distribution<int>(-4, 4)(rng) * 0.5;
    for (std::size_t i = 0; i <= bp.size(); ++i) {
        vals.emplace_back(level);
        level += inc(rng) * 0.5;
    }
    if (allow_sentinels && rare(rng)) vals.front() = NEG_INF;
    if (allow_sentinels && rare(rng) && vals.size() > 1) vals.back() = POS_INF;
    std::optional<ExtendedReal> top;
    if (allow_sentinels && rare(rng)) top = POS_INF;
    return StepFunction(std::move(bp), std::move(vals), top);
}

// Probe points: every breakpoint, midpoints between breakpoints, points
// beyond both ends and the two sentinels.
inline std::vector<ExtendedReal> probe_points(std::span<const double> bp, bool include_pos_inf = true)
{
    std::vector<ExtendedReal> xs{NEG_INF};
    if (bp.empty()) {
        xs.emplace_back(0.0);
    } else {
        xs.emplace_back(bp.front() - 1.0);
        for (std::size_t i = 0; i < bp.size(); ++i) {
            xs.emplace_back(bp[i]);
            if (i + 1 < bp.size()) xs.emplace_back(0.5 * (bp[i] + bp[i + 1]));
        }
        xs.emplace_back(bp.back() + 1.0);
    }
    if (include_pos_inf) xs.push_back(POS_INF);
    return xs;
}

// Levels to probe: every finite value, midpoints between them, beyond the ends.
inline std::vector<double> probe_levels(const StepFunction& f)
{
    std::vector<double> lv;
    for (const auto& v : f.values())
        if (v.is_finite()) lv.push_back(v.finite_value());
    if (f.at_pos_inf().is_finite()) lv.push_back(f.at_pos_inf().finite_value());
    std::sort(lv.begin(), lv.end());
    lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
    std::vector<double> out;
    if (lv.empty()) return {0.0};
    out.push_back(lv.front() - 1.0);
    for (std::size_t i = 0; i < lv.size(); ++i) {
        out.push_back(lv[i]);
        if (i + 1 < lv.size()) out.push_back(0.5 * (lv[i] + lv[i + 1]));
    }
    out.push_back(lv.back() + 1.0);
    return out;
}

// Strictly increasing surjective piecewise-linear map with dyadic knots and
// power-of-two slopes, so images and preimages of dyadic points are exact.
inline PiecewiseLinearMap random_dyadic_warp(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> nk(2, 5);
    std::uniform_int_distribution<int> step(1, 8);
    std::uniform_int_distribution<int> slope_exp(-2, 2);
    std::uniform_int_distribution<int> start(-8, 8);
    const int k = nk(rng);
    std::vector<double> xs{start(rng) * 0.25}, ys{start(rng) * 0.25};
    for (int i = 1; i < k; ++i) {
        const double dx = step(rng) * 0.25;
        xs.push_back(xs.back() + dx);
        ys.push_back(ys.back() + dx * std::ldexp(1.0, slope_exp(rng)));
    }
    return PiecewiseLinearMap(std::move(xs), std::move(ys));
}

// Strictly increasing surjective piecewise-linear map with general knots.
inline PiecewiseLinearMap random_warp(std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_int_distribution<int> nk(2, 6);
    std::uniform_real_distribution<double> slope(0.5, 2.0);
    const int k = nk(rng);
    std::vector<double> xs, ys;
    std::uniform_real_distribution<double> u(lo, hi);
    for (int i = 0; i < k; ++i) xs.push_back(u(rng));
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    if (xs.size() < 2) xs = {lo, hi};
    ys.push_back(std::uniform_real_distribution<double>(-0.5, 0.5)(rng));
    for (std::size_t i = 1; i < xs.size(); ++i) ys.push_back(ys.back() + (xs[i] - xs[i - 1]) * slope(rng));
    return PiecewiseLinearMap(std::move(xs), std::move(ys));
}

// Finite atoms with positive weights at distinct random locations in [lo, hi].
inline std::vector<Atom> random_atoms(std::mt19937_64& rng, std::size_t n, double lo, double hi, double total = 1.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    std::uniform_real_distribution<double> w(0.1, 1.0);
    std::vector<Atom> atoms;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        atoms.push_back({u(rng), w(rng)});
        s += atoms.back().weight;
    }
    for (auto& a : atoms) a.weight *= total / s;
    return atoms;
}

// Piecewise-constant signed density: a few random constant runs, some zero.
inline GridDensity random_signed_density(std::mt19937_64& rng, std::size_t n, double t0 = 0.0, double t1 = 1.0)
{
    GridDensity d{t0, t1, std::vector<double>(n, 0.0)};
    std::uniform_int_distribution<int> runs(1, 8);
    std::uniform_real_distribution<double> amp(-2.0, 2.0);
    std::uniform_int_distribution<std::size_t> cut(0, n);
    std::vector<std::size_t> cuts{0, n};
    const int r = runs(rng);
    for (int i = 0; i < r; ++i) cuts.push_back(cut(rng));
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double v = std::bernoulli_distribution(0.2)(rng) ? 0.0 : amp(rng);
        for (std::size_t k = cuts[i]; k < cuts[i + 1]; ++k) d.samples[k] = v;
    }
    return d;
}

} // namespace scdt::testing
