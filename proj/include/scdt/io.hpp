// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scdt/classify.hpp"
#include "scdt/errors.hpp"
#include "scdt/genmodel.hpp"
#include "scdt/measures.hpp"
#include "scdt/transform.hpp"

namespace scdt::io {

using nlohmann::json;

inline std::string format_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Serializes like json::dump(2) but writes every floating-point number with
/// 17 significant digits.
inline void dump17(const json& j, std::string& out, int indent = 0)
{
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad + json(it.key()).dump() + ": ";
            dump17(it.value(), out, indent + 2);
        }
        out += "\n" + close + "}";
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (std::size_t k = 0; k < j.size(); ++k) {
            if (k > 0) out += ",\n";
            out += pad;
            dump17(j[k], out, indent + 2);
        }
        out += "\n" + close + "]";
        return;
    }
    case json::value_t::number_float: {
        const double v = j.get<double>();
        if (!std::isfinite(v)) throw ParseError("JSON cannot hold non-finite numbers");
        out += format_double(v);
        return;
    }
    default: out += j.dump();
    }
}

inline std::string dump17(const json& j)
{
    std::string out;
    dump17(j, out);
    out += '\n';
    return out;
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline bool parse_number(std::string_view s, double& out)
{
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

inline double require_number(std::string_view s, const std::string& what)
{
    double v = 0.0;
    if (!parse_number(s, v)) throw ParseError("expected a finite number for " + what + ", got '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    for (;;) {
        const auto k = s.find(sep);
        out.push_back(s.substr(0, k));
        if (k == std::string_view::npos) break;
        s.remove_prefix(k + 1);
    }
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Signal files: CSV `t,value`, t at the bin centres of a uniform grid.
// ---------------------------------------------------------------------------

inline GridDensity read_signal(std::istream& in)
{
    std::vector<double> ts, vs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view row = detail::trim(line);
        if (row.empty()) continue;
        const auto cols = detail::split(row, ',');
        if (cols.size() != 2) throw ParseError("line " + std::to_string(lineno) + ": expected two columns t,value");
        double t = 0.0, v = 0.0;
        const bool ok = detail::parse_number(cols[0], t) && detail::parse_number(cols[1], v);
        if (!ok) {
            if (ts.empty() && lineno == 1) continue; // header
            throw ParseError("line " + std::to_string(lineno) + ": malformed number");
        }
        ts.push_back(t);
        vs.push_back(v);
    }
    if (ts.size() < 2) throw ParseError("signal file needs at least two samples to fix the grid spacing");
    const double dt = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
    if (!(dt > 0)) throw ParseError("signal times must be strictly increasing");
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const double step = ts[i] - ts[i - 1];
        if (!(std::abs(step - dt) <= 1e-9 * dt)) throw ParseError("signal times are not uniformly spaced");
    }
    GridDensity d{ts.front() - 0.5 * dt, ts.back() + 0.5 * dt, std::move(vs)};
    d.validate();
    return d;
}

inline void write_signal(std::ostream& out, const GridDensity& d)
{
    d.validate();
    out << "t,value\n";
    for (std::size_t i = 0; i < d.size(); ++i) out << format_double(d.center(i)) << ',' << format_double(d.samples[i]) << '\n';
}

inline GridDensity read_signal_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return read_signal(in);
}

inline void write_text_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << content;
    if (!out) throw ParseError("failed writing " + path);
}

inline void write_signal_file(const std::string& path, const GridDensity& d)
{
    std::ostringstream s;
    write_signal(s, d);
    write_text_file(path, s.str());
}

// ---------------------------------------------------------------------------
// Reference specs: `uniform:a,b` or `pwl:x0,y0;x1,y1;...`
// ---------------------------------------------------------------------------

inline ReferenceMeasure parse_reference(std::string_view spec)
{
    try {
        const auto colon = spec.find(':');
        if (colon == std::string_view::npos) throw ParseError("reference spec needs a kind prefix");
        const std::string_view kind = detail::trim(spec.substr(0, colon));
        const std::string_view body = spec.substr(colon + 1);
        if (kind == "uniform") {
            const auto parts = detail::split(body, ',');
            if (parts.size() != 2) throw ParseError("uniform reference takes two numbers a,b");
            return ReferenceMeasure::uniform(detail::require_number(parts[0], "a"), detail::require_number(parts[1], "b"));
        }
        if (kind == "pwl") {
            std::vector<double> xs, ys;
            for (auto knot : detail::split(body, ';')) {
                const auto xy = detail::split(knot, ',');
                if (xy.size() != 2) throw ParseError("pwl knots are x,y pairs separated by ';'");
                xs.push_back(detail::require_number(xy[0], "knot x"));
                ys.push_back(detail::require_number(xy[1], "knot y"));
            }
            return ReferenceMeasure(std::move(xs), std::move(ys));
        }
        throw ParseError("unknown reference kind '" + std::string(kind) + "'");
    } catch (const ParseError& e) {
        throw ReferenceError(std::string("invalid reference spec: ") + e.what());
    }
}

inline std::string reference_spec(const ReferenceMeasure& ref)
{
    std::string out = "pwl:";
    for (std::size_t i = 0; i < ref.xs().size(); ++i) {
        if (i > 0) out += ';';
        out += format_double(ref.xs()[i]) + ',' + format_double(ref.cdf_values()[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Transform files (JSON)
// ---------------------------------------------------------------------------

inline json sample_to_json(const ExtendedReal& x)
{
    if (x.is_pos_inf()) return "inf";
    if (x.is_neg_inf()) return "-inf";
    return x.finite_value();
}

inline ExtendedReal sample_from_json(const json& j)
{
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf") return POS_INF;
        if (s == "-inf") return NEG_INF;
        throw ParseError("transform sample string must be \"inf\" or \"-inf\"");
    }
    if (!j.is_number()) throw ParseError("transform samples must be numbers or \"inf\"/\"-inf\"");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError("non-finite transform sample");
    return v;
}

inline json reference_to_json(const ReferenceMeasure& ref)
{
    return {{"x", std::vector<double>(ref.xs().begin(), ref.xs().end())},
            {"cdf", std::vector<double>(ref.cdf_values().begin(), ref.cdf_values().end())}};
}

inline ReferenceMeasure reference_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("x") || !j.contains("cdf")) throw ParseError("reference must be an object with x and cdf");
    try {
        return ReferenceMeasure(j.at("x").get<std::vector<double>>(), j.at("cdf").get<std::vector<double>>());
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed reference: ") + e.what());
    }
}

inline json transform_to_json(const ScdtResult& t, const TransformConfig& cfg)
{
    auto part = [](const CdtResult& c) {
        json samples = json::array();
        for (const auto& s : c.samples) samples.push_back(sample_to_json(s));
        return json{{"samples", std::move(samples)}, {"mass", c.mass}};
    };
    return {{"version", 1},
            {"quantiles", std::vector<double>(cfg.quantiles().begin(), cfg.quantiles().end())},
            {"plus", part(t.plus)},
            {"minus", part(t.minus)},
            {"reference", reference_to_json(cfg.reference())}};
}

struct TransformFile {
    ScdtResult transform;
    TransformConfig config;
};

/// Parses and validates a transform document. Reference problems surface as
/// ReferenceError, everything else as ParseError.
inline TransformFile transform_from_json(const json& j)
{
    if (!j.is_object()) throw ParseError("transform file must hold a JSON object");
    for (const char* key : {"version", "quantiles", "plus", "minus", "reference"})
        if (!j.contains(key)) throw ParseError(std::string("transform file lacks '") + key + "'");
    if (j.at("version") != 1) throw ParseError("unsupported transform file version");

    const json& q = j.at("quantiles");
    if (!q.is_array() || q.size() < 2) throw ParseError("quantiles must be an array of at least two levels");
    ReferenceMeasure ref = reference_from_json(j.at("reference"));
    TransformConfig cfg(std::move(ref), q.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        if (!q[k].is_number() || std::abs(q[k].get<double>() - cfg.quantiles()[k]) > 1e-12)
            throw ParseError("quantiles must be the midpoint grid (j - 1/2) / M");
    }

    auto part = [&](const char* name) {
        const json& p = j.at(name);
        if (!p.is_object() || !p.contains("samples") || !p.contains("mass") || !p.at("samples").is_array() ||
            !p.at("mass").is_number())
            throw ParseError(std::string("'") + name + "' must hold a samples array and a numeric mass");
        CdtResult c;
        c.mass = p.at("mass").get<double>();
        for (const auto& s : p.at("samples")) c.samples.push_back(sample_from_json(s));
        if (c.samples.size() != cfg.size()) throw ParseError(std::string("'") + name + "' samples do not match the quantile grid");
        try {
            c.validate();
        } catch (const Error& e) {
            throw ParseError(std::string("'") + name + "': " + e.what());
        }
        return c;
    };
    ScdtResult t{part("plus"), part("minus")};
    return {std::move(t), std::move(cfg)};
}

inline TransformFile parse_transform(std::string_view text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("transform file is not valid JSON: ") + e.what());
    }
    return transform_from_json(j);
}

inline std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// ---------------------------------------------------------------------------
// Generator / experiment configuration
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    GenConfig gen;
    std::string reference = "uniform:0,1";
    std::size_t quantiles = kDefaultQuantiles;
    LdaOptions lda;
};

namespace detail {

template <class T>
void read_field(const json& j, const char* key, T& out)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("config field '") + key + "': " + e.what());
    }
}

inline void read_range(const json& j, const char* key, double& lo, double& hi)
{
    std::vector<double> r{lo, hi};
    read_field(j, key, r);
    if (r.size() != 2) throw ParseError(std::string("config field '") + key + "' must be [low, high]");
    lo = r[0];
    hi = r[1];
}

} // namespace detail

/// Missing keys keep their defaults; an invalid resulting configuration is a
/// parse error.
inline ExperimentConfig experiment_config_from_json(const json& j)
{
    if (!j.is_object()) throw ParseError("config must be a JSON object");
    ExperimentConfig c;
    GenConfig& g = c.gen;
    detail::read_field(j, "t0", g.t0);
    detail::read_field(j, "t1", g.t1);
    detail::read_field(j, "grid_size", g.grid_size);
    detail::read_range(j, "a_range", g.a_min, g.a_max);
    detail::read_range(j, "b_range", g.b_min, g.b_max);
    detail::read_field(j, "noise_sigma", g.noise_sigma);
    detail::read_field(j, "count", g.count);
    detail::read_field(j, "seed", g.seed);
    if (j.contains("classes")) {
        std::vector<std::string> names;
        detail::read_field(j, "classes", names);
        g.classes.clear();
        for (const auto& n : names) g.classes.push_back(parse_template(n));
    }
    if (j.contains("template")) {
        const json& s = j.at("template");
        detail::read_field(s, "center", g.shape.center);
        detail::read_field(s, "window_width", g.shape.window_width);
        detail::read_field(s, "period", g.shape.period);
        detail::read_field(s, "amplitude", g.shape.amplitude);
    }
    detail::read_field(j, "reference", c.reference);
    detail::read_field(j, "quantiles", c.quantiles);
    detail::read_field(j, "lda_shrinkage", c.lda.shrinkage);
    detail::read_field(j, "lda_relative", c.lda.relative);
    try {
        g.validate();
    } catch (const RangeError& e) {
        throw ParseError(std::string("invalid generator config: ") + e.what());
    }
    if (c.quantiles < 2) throw ParseError("config needs at least two quantiles");
    if (!(c.lda.shrinkage >= 0)) throw ParseError("lda_shrinkage must be non-negative");
    return c;
}

inline json experiment_config_to_json(const ExperimentConfig& c)
{
    const GenConfig& g = c.gen;
    json classes = json::array();
    for (auto t : g.classes) classes.push_back(std::string(template_name(t)));
    return {{"t0", g.t0},
            {"t1", g.t1},
            {"grid_size", g.grid_size},
            {"a_range", {g.a_min, g.a_max}},
            {"b_range", {g.b_min, g.b_max}},
            {"noise_sigma", g.noise_sigma},
            {"count", g.count},
            {"classes", classes},
            {"seed", g.seed},
            {"template",
             {{"center", g.shape.center},
              {"window_width", g.shape.window_width},
              {"period", g.shape.period},
              {"amplitude", g.shape.amplitude}}},
            {"reference", c.reference},
            {"quantiles", c.quantiles},
            {"lda_shrinkage", c.lda.shrinkage},
            {"lda_relative", c.lda.relative}};
}

inline json confusion_to_json(const ConfusionMatrix& m)
{
    return {{"classes", m.classes}, {"counts", m.counts}};
}

inline json report_to_json(const ExperimentReport& r, const ExperimentConfig& c)
{
    json points = json::array();
    for (const auto& p : r.projections)
        points.push_back({{"space", feature_kind_name(p.space)}, {"class", p.label}, {"u", p.u}, {"v", p.v}});
    ExperimentConfig echo = c;
    echo.gen.seed = r.seed;
    return {{"accuracy_signal_space", r.accuracy_signal_space},
            {"accuracy_scdt_space", r.accuracy_scdt_space},
            {"confusion_signal_space", confusion_to_json(r.confusion_signal_space)},
            {"confusion_scdt_space", confusion_to_json(r.confusion_scdt_space)},
            {"train_size", r.train_size},
            {"test_size", r.test_size},
            {"seed", r.seed},
            {"config", experiment_config_to_json(echo)},
            {"projections", std::move(points)}};
}

inline void write_projections_csv(std::ostream& out, const ExperimentReport& r)
{
    out << "space,class,u,v\n";
    for (const auto& p : r.projections)
        out << feature_kind_name(p.space) << ',' << p.label << ',' << format_double(p.u) << ',' << format_double(p.v) << '\n';
}

} // namespace scdt::io
