// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scdt/classify.hpp"
#include "scdt/errors.hpp"
#include "scdt/io.hpp"
#include "scdt/measures.hpp"
#include "scdt/metrics.hpp"
#include "scdt/transform.hpp"

namespace scdt::cli {

/// Stable process exit codes.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1, // unexpected internal error
    kParseError = 2,
    kInvalidReference = 3,
    kSingularity = 4,
    kMetricPrecondition = 5,
};

namespace detail {

// Raised inside a command to force a specific exit code.
struct Exit {
    int code;
    std::string message;
};

inline std::optional<std::uint64_t> seed_from_env()
{
    const char* s = std::getenv("SCDT_SEED");
    if (s == nullptr || *s == '\0') return std::nullopt;
    std::uint64_t v = 0;
    const std::string_view sv(s);
    const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (ec != std::errc() || ptr != sv.data() + sv.size())
        throw ParseError("SCDT_SEED must be an unsigned integer, got '" + std::string(sv) + "'");
    return v;
}

inline io::ExperimentConfig load_experiment_config(const std::string& path)
{
    io::json j;
    try {
        j = io::json::parse(io::read_text_file(path));
    } catch (const io::json::parse_error& e) {
        throw ParseError("config is not valid JSON: " + std::string(e.what()));
    }
    io::ExperimentConfig c = io::experiment_config_from_json(j);
    if (auto s = seed_from_env()) c.gen.seed = *s;
    return c;
}

inline int cmd_transform(const std::string& input, const std::string& output, const std::string& ref, std::size_t m)
{
    const TransformConfig cfg(io::parse_reference(ref), m);
    const GridDensity d = io::read_signal_file(input);
    const ScdtResult t = scdt_forward(measure_from_density(d), cfg);
    io::write_text_file(output, io::dump17(io::transform_to_json(t, cfg)));
    return kOk;
}

inline int cmd_inverse(const std::string& input, const std::string& output, const std::vector<double>& grid,
                       std::ostream& err)
{
    if (grid.size() != 3 || !(grid[2] >= 1) || grid[2] != std::floor(grid[2]))
        throw ParseError("--grid takes t0,t1,N with a positive integer N");
    const io::TransformFile f = io::parse_transform(io::read_text_file(input));
    InverseDiagnostics diag;
    SignedMeasure m;
    try {
        m = scdt_inverse(f.transform, f.config, &diag);
    } catch (const SingularityError& e) {
        throw Exit{kSingularity, e.what()};
    }
    for (const auto& [x, y] : diag.near_collisions)
        err << "warning: positive atom at " << x << " and negative atom at " << y << " nearly coincide\n";
    GridDensity d;
    try {
        d = rebin(m, grid[0], grid[1], static_cast<std::size_t>(grid[2]));
    } catch (const RangeError& e) {
        throw Exit{kSingularity, std::string("reconstruction does not fit the grid: ") + e.what()};
    }
    io::write_signal_file(output, d);
    return kOk;
}

inline int cmd_distance(const std::string& a, const std::string& b, const std::string& metric, std::size_t m,
                        std::ostream& out)
{
    if (m < 1) throw ParseError("--quantiles must be positive");
    const SignedMeasure sa = measure_from_density(io::read_signal_file(a));
    const SignedMeasure sb = measure_from_density(io::read_signal_file(b));
    double value = 0.0;
    try {
        if (metric == "ds") {
            value = d_s(sa, sb, m).value;
        } else {
            for (const auto* s : {&sa, &sb})
                if (!s->negative().is_zero()) throw MassError(metric + " needs non-negative signals");
            if (metric == "dw2") {
                value = d_w2(sa.positive(), sb.positive(), m).value;
            } else {
                for (const auto* s : {&sa, &sb})
                    if (s->positive().is_zero()) throw MassError("w2 cannot normalize a zero signal");
                const auto& pa = sa.positive();
                const auto& pb = sb.positive();
                value = w2(pa.scaled(1.0 / pa.total_mass()), pb.scaled(1.0 / pb.total_mass()), m);
            }
        }
    } catch (const MassError& e) {
        throw Exit{kMetricPrecondition, e.what()};
    } catch (const RangeError& e) {
        throw Exit{kMetricPrecondition, e.what()};
    }
    out << io::format_double(value) << '\n';
    return kOk;
}

inline int cmd_generate(const std::string& config, const std::string& outdir)
{
    const io::ExperimentConfig c = load_experiment_config(config);
    const auto data = generate_dataset(c.gen);
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) throw ParseError("cannot create " + outdir + ": " + ec.message());
    const std::filesystem::path dir(outdir);
    std::ostringstream index;
    index << "file,class,template,a,b\n";
    const int width = static_cast<int>(std::to_string(data.size() - 1).size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::string num = std::to_string(i);
        num.insert(0, static_cast<std::size_t>(std::max(0, width - static_cast<int>(num.size()))), '0');
        const std::string name = "signal_" + num + ".csv";
        io::write_signal_file((dir / name).string(), data[i].signal);
        index << name << ',' << data[i].label << ','
              << template_name(c.gen.classes[static_cast<std::size_t>(data[i].label)]) << ','
              << io::format_double(data[i].a) << ',' << io::format_double(data[i].b) << '\n';
    }
    io::write_text_file((dir / "labels.csv").string(), index.str());
    return kOk;
}

inline int cmd_classify_demo(const std::string& config, const std::string& report, const std::string& plots,
                             std::ostream& out)
{
    const io::ExperimentConfig c = load_experiment_config(config);
    const TransformConfig cfg(io::parse_reference(c.reference), c.quantiles);
    ExperimentReport r;
    try {
        r = run_experiment(c.gen, cfg, c.lda, c.gen.seed);
    } catch (const DegenerateScatterError& e) {
        throw Exit{kFailure, e.what()};
    }
    io::write_text_file(report, io::dump17(io::report_to_json(r, c)));
    if (!plots.empty()) {
        std::ostringstream s;
        io::write_projections_csv(s, r);
        io::write_text_file(plots, s.str());
    }
    out << "accuracy_signal_space " << io::format_double(r.accuracy_signal_space) << '\n'
        << "accuracy_scdt_space " << io::format_double(r.accuracy_scdt_space) << '\n';
    return kOk;
}

} // namespace detail

/// Entry point shared by the executable and the tests. Results go to `out`,
/// diagnostics to `err`.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Signed cumulative distribution transform toolkit", "scdt"};
    app.require_subcommand(1);

    std::string input, output, ref = "uniform:0,1", a, b, metric = "ds", config, report, plots, outdir;
    std::size_t quantiles = kDefaultQuantiles;
    std::vector<double> grid;

    auto* transform = app.add_subcommand("transform", "forward transform of a signal CSV");
    transform->add_option("--input", input, "signal CSV (t,value)")->required();
    transform->add_option("--output", output, "transform JSON to write")->required();
    transform->add_option("--ref", ref, "reference: uniform:a,b or pwl:x0,y0;x1,y1;...")->capture_default_str();
    transform->add_option("--quantiles", quantiles, "number of quantile samples M")->capture_default_str();

    auto* inverse = app.add_subcommand("inverse", "inverse transform onto a grid");
    inverse->add_option("--input", input, "transform JSON")->required();
    inverse->add_option("--output", output, "signal CSV to write")->required();
    inverse->add_option("--grid", grid, "t0,t1,N")->required()->delimiter(',')->expected(3);

    auto* distance = app.add_subcommand("distance", "transport distance between two signals");
    distance->add_option("--a", a, "first signal CSV")->required();
    distance->add_option("--b", b, "second signal CSV")->required();
    distance->add_option("--metric", metric, "ds, dw2 or w2")
        ->check(CLI::IsMember({"ds", "dw2", "w2"}))
        ->capture_default_str();
    distance->add_option("--quantiles", quantiles, "quantile grid size")->capture_default_str();

    auto* generate = app.add_subcommand("generate", "write the synthetic labelled signals");
    generate->add_option("--config", config, "generator JSON")->required();
    generate->add_option("--outdir", outdir, "output directory")->required();

    auto* demo = app.add_subcommand("classify-demo", "LDA in signal space and transform space");
    demo->add_option("--config", config, "experiment JSON")->required();
    demo->add_option("--report", report, "report JSON to write")->required();
    demo->add_option("--plots", plots, "CSV of 2-D LDA test projections");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kParseError;
    }

    try {
        if (*transform) return detail::cmd_transform(input, output, ref, quantiles);
        if (*inverse) return detail::cmd_inverse(input, output, grid, err);
        if (*distance) return detail::cmd_distance(a, b, metric, quantiles, out);
        if (*generate) return detail::cmd_generate(config, outdir);
        if (*demo) return detail::cmd_classify_demo(config, report, plots, out);
    } catch (const detail::Exit& e) {
        err << "error: " << e.message << '\n';
        return e.code;
    } catch (const ReferenceError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidReference;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kParseError;
    } catch (const SingularityError& e) {
        err << "error: " << e.what() << '\n';
        return kSingularity;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kParseError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kFailure;
    }
    return kParseError;
}

} // namespace scdt::cli
