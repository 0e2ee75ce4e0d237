// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scdt/errors.hpp"
#include "scdt/genmodel.hpp"
#include "scdt/measures.hpp"
#include "scdt/transform.hpp"

namespace scdt {

enum class FeatureKind { raw_signal, scdt };

inline const char* feature_kind_name(FeatureKind k) { return k == FeatureKind::raw_signal ? "signal" : "scdt"; }

/// One feature vector per row. SCDT rows are (f+ samples, r, f- samples, s).
struct FeatureMatrix {
    Eigen::MatrixXd rows;
    std::vector<int> labels;
    FeatureKind kind = FeatureKind::raw_signal;
};

inline Eigen::VectorXd scdt_feature_vector(const ScdtResult& t)
{
    const auto m = static_cast<Eigen::Index>(t.plus.samples.size());
    Eigen::VectorXd v(2 * m + 2);
    Eigen::Index k = 0;
    for (const auto* part : {&t.plus, &t.minus}) {
        if (static_cast<Eigen::Index>(part->samples.size()) != m) throw RangeError("transform parts use different grids");
        for (const auto& s : part->samples) {
            if (!s.is_finite()) throw RangeError("transform sample at infinity cannot be used as a feature");
            v[k++] = s.finite_value();
        }
        v[k++] = part->mass;
    }
    return v;
}

inline FeatureMatrix featurize(std::span<const GridDensity> signals, std::span<const int> labels, FeatureKind kind,
                               const TransformConfig& cfg)
{
    if (signals.size() != labels.size()) throw RangeError("one label per signal is required");
    FeatureMatrix out;
    out.kind = kind;
    out.labels.assign(labels.begin(), labels.end());
    if (signals.empty()) return out;

    const GridDensity& first = signals.front();
    for (const auto& s : signals) {
        s.validate();
        if (s.t0 != first.t0 || s.t1 != first.t1 || s.size() != first.size())
            throw RangeError("signals must share a common grid");
    }

    const auto n = static_cast<Eigen::Index>(signals.size());
    if (kind == FeatureKind::raw_signal) {
        out.rows.resize(n, static_cast<Eigen::Index>(first.size()));
        for (Eigen::Index i = 0; i < n; ++i)
            for (std::size_t k = 0; k < first.size(); ++k)
                out.rows(i, static_cast<Eigen::Index>(k)) = signals[static_cast<std::size_t>(i)].samples[k];
    } else {
        out.rows.resize(n, static_cast<Eigen::Index>(2 * cfg.size() + 2));
        for (Eigen::Index i = 0; i < n; ++i)
            out.rows.row(i) =
                scdt_feature_vector(scdt_forward(measure_from_density(signals[static_cast<std::size_t>(i)]), cfg))
                    .transpose();
    }
    return out;
}

struct LdaOptions {
    /// Ridge added to the within-class scatter. When `relative` is set it is
    /// multiplied by the mean eigenvalue of the total scatter over the span
    /// of the training data, which makes the fit invariant to feature scale.
    double shrinkage = 1e-6;
    bool relative = true;
};

/// Fisher discriminant: up to C-1 directions, classification by the nearest
/// projected class mean, ties going to the lowest class id.
struct LdaModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd projection; // features x directions
    std::vector<int> classes;   // ascending
    Eigen::MatrixXd class_means_projected; // classes x directions
    double lambda = 0.0;

    Eigen::VectorXd project(const Eigen::VectorXd& x) const { return projection.transpose() * (x - mean); }

    int predict(const Eigen::VectorXd& x) const
    {
        const Eigen::VectorXd z = project(x);
        int best = classes.front();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < classes.size(); ++c) {
            const double d = (class_means_projected.row(static_cast<Eigen::Index>(c)).transpose() - z).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = classes[c];
            }
        }
        return best;
    }

    std::vector<int> predict(const FeatureMatrix& fm) const
    {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(fm.rows.rows()));
        for (Eigen::Index i = 0; i < fm.rows.rows(); ++i) out.push_back(predict(Eigen::VectorXd(fm.rows.row(i).transpose())));
        return out;
    }
};

/// Solves Sb w = rho (Sw + lambda I) w.
///
/// Between- and within-class scatter both live in the span of the centred
/// training rows, and so does every eigenvector with rho > 0, so the problem
/// is solved exactly in that span (at most n-1 dimensions) instead of in the
/// full feature space.
inline LdaModel fit_lda(const FeatureMatrix& train, const LdaOptions& opts = {})
{
    const Eigen::Index n = train.rows.rows();
    const Eigen::Index p = train.rows.cols();
    if (static_cast<std::size_t>(n) != train.labels.size()) throw RangeError("one label per row is required");
    if (n == 0) throw RangeError("LDA needs training data");
    if (!(opts.shrinkage >= 0)) throw RangeError("LDA shrinkage must be non-negative");

    std::map<int, std::vector<Eigen::Index>> members;
    for (Eigen::Index i = 0; i < n; ++i) members[train.labels[static_cast<std::size_t>(i)]].push_back(i);
    if (!train.rows.allFinite()) throw RangeError("features must be finite");

    LdaModel model;
    for (const auto& [c, idx] : members) model.classes.push_back(c);
    const auto n_classes = static_cast<Eigen::Index>(model.classes.size());

    model.mean = train.rows.colwise().mean().transpose();
    const Eigen::MatrixXd centred = train.rows.rowwise() - model.mean.transpose();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(centred, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double tol = sv.size() > 0 ? sv[0] * 1e-10 : 0.0;
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv[rank] > tol) ++rank;

    const Eigen::Index dirs = std::min(n_classes - 1, rank);
    if (dirs == 0) {
        // Single class or all rows identical: every point projects to the origin.
        model.projection = Eigen::MatrixXd::Zero(p, 0);
        model.class_means_projected = Eigen::MatrixXd::Zero(n_classes, 0);
        return model;
    }

    const Eigen::MatrixXd basis = svd.matrixV().leftCols(rank);
    const Eigen::MatrixXd z = centred * basis;

    Eigen::MatrixXd means(n_classes, rank);
    Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(rank, rank);
    Eigen::MatrixXd sb = Eigen::MatrixXd::Zero(rank, rank);
    Eigen::Index c = 0;
    for (const auto& [label, idx] : members) {
        Eigen::VectorXd mc = Eigen::VectorXd::Zero(rank);
        for (auto i : idx) mc += z.row(i).transpose();
        mc /= static_cast<double>(idx.size());
        means.row(c++) = mc.transpose();
        for (auto i : idx) {
            const Eigen::VectorXd d = z.row(i).transpose() - mc;
            sw.noalias() += d * d.transpose();
        }
        sb.noalias() += static_cast<double>(idx.size()) * mc * mc.transpose();
    }

    double lambda = opts.shrinkage;
    if (opts.relative) lambda *= sv.head(rank).squaredNorm() / static_cast<double>(rank);
    model.lambda = lambda;

    Eigen::MatrixXd reg = sw;
    reg.diagonal().array() += lambda;
    // The generalized solver does not report a failed factorization, so check
    // first. Within-class scatter below 1e-12 of the total counts as singular.
    const Eigen::LLT<Eigen::MatrixXd> llt(reg);
    if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().minCoeff() > 1e-6 * sv[0]))
        throw DegenerateScatterError("within-class scatter is singular; increase shrinkage");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(sb, reg);
    if (ges.info() != Eigen::Success || !ges.eigenvectors().allFinite())
        throw DegenerateScatterError("within-class scatter is singular; increase shrinkage");

    // Eigenvalues ascend; keep the top directions, largest first.
    Eigen::MatrixXd w(rank, dirs);
    for (Eigen::Index k = 0; k < dirs; ++k) {
        Eigen::VectorXd v = ges.eigenvectors().col(rank - 1 - k);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v[arg] < 0) v = -v;
        w.col(k) = v;
    }
    model.projection = basis * w;
    model.class_means_projected = means * w;
    return model;
}

struct ConfusionMatrix {
    std::vector<int> classes;
    std::vector<std::vector<int>> counts; // [true][predicted]

    double accuracy() const
    {
        long total = 0, hit = 0;
        for (std::size_t i = 0; i < counts.size(); ++i)
            for (std::size_t j = 0; j < counts[i].size(); ++j) {
                total += counts[i][j];
                if (i == j) hit += counts[i][j];
            }
        return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
    }
};

inline ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted, std::vector<int> classes)
{
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    ConfusionMatrix cm{classes, std::vector<std::vector<int>>(classes.size(), std::vector<int>(classes.size(), 0))};
    auto index = [&](int c) {
        const auto it = std::lower_bound(classes.begin(), classes.end(), c);
        if (it == classes.end() || *it != c) throw RangeError("label outside the class list");
        return static_cast<std::size_t>(it - classes.begin());
    };
    for (std::size_t i = 0; i < truth.size(); ++i) ++cm.counts[index(truth[i])][index(predicted[i])];
    return cm;
}

struct ProjectedPoint {
    FeatureKind space = FeatureKind::raw_signal;
    int label = 0;
    double u = 0.0;
    double v = 0.0;
};

struct ExperimentReport {
    double accuracy_signal_space = 0.0;
    double accuracy_scdt_space = 0.0;
    ConfusionMatrix confusion_signal_space;
    ConfusionMatrix confusion_scdt_space;
    std::vector<ProjectedPoint> projections; // held-out test rows only
    std::uint64_t seed = 0;
    GenConfig gen;
    std::size_t quantiles = 0;
    LdaOptions lda;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
};

/// Generates the dataset, splits it by index parity (even rows train, odd rows
/// test; each pair shares a class, so the split is stratified) and scores LDA on raw samples and on SCDT features.
inline ExperimentReport run_experiment(GenConfig gen, const TransformConfig& cfg, const LdaOptions& lda,
                                       std::uint64_t seed)
{
    gen.seed = seed;
    const auto data = generate_dataset(gen);

    std::vector<GridDensity> train, test;
    std::vector<int> train_labels, test_labels;
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto& signals = (i % 2 == 0) ? train : test;
        auto& labels = (i % 2 == 0) ? train_labels : test_labels;
        signals.push_back(data[i].signal);
        labels.push_back(data[i].label);
    }
    if (test.empty()) throw RangeError("experiment needs at least two signals for a train/test split");

    std::vector<int> classes;
    for (std::size_t c = 0; c < gen.classes.size(); ++c) classes.push_back(static_cast<int>(c));

    ExperimentReport report;
    report.seed = seed;
    report.gen = gen;
    report.quantiles = cfg.size();
    report.lda = lda;
    report.train_size = train.size();
    report.test_size = test.size();

    for (FeatureKind kind : {FeatureKind::raw_signal, FeatureKind::scdt}) {
        const FeatureMatrix tr = featurize(train, train_labels, kind, cfg);
        const FeatureMatrix te = featurize(test, test_labels, kind, cfg);
        const LdaModel model = fit_lda(tr, lda);
        const std::vector<int> predicted = model.predict(te);
        ConfusionMatrix cm = confusion(test_labels, predicted, classes);
        for (Eigen::Index i = 0; i < te.rows.rows(); ++i) {
            const Eigen::VectorXd z = model.project(te.rows.row(i).transpose());
            report.projections.push_back({kind, te.labels[static_cast<std::size_t>(i)], z.size() > 0 ? z[0] : 0.0,
                                          z.size() > 1 ? z[1] : 0.0});
        }
        if (kind == FeatureKind::raw_signal) {
            report.accuracy_signal_space = cm.accuracy();
            report.confusion_signal_space = std::move(cm);
        } else {
            report.accuracy_scdt_space = cm.accuracy();
            report.confusion_scdt_space = std::move(cm);
        }
    }
    return report;
}

} // namespace scdt
