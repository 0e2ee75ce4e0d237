// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>

#include "scdt/cli.hpp"
#include "support.hpp"

using namespace scdt;
using Catch::Matchers::WithinAbs;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        std::random_device rd;
        path = fs::temp_directory_path() / ("scdt_test_" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "scdt");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

GridDensity bumps(double shift = 0.0)
{
    GridDensity d{0.0, 4.0, std::vector<double>(200)};
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double t = d.center(k) - shift;
        d.samples[k] = std::exp(-10 * (t - 1.5) * (t - 1.5)) - 0.4 * std::exp(-10 * (t - 2.3) * (t - 2.3));
    }
    return d;
}

struct SeedEnv {
    explicit SeedEnv(const char* v) { ::setenv("SCDT_SEED", v, 1); }
    ~SeedEnv() { ::unsetenv("SCDT_SEED"); }
};

} // namespace

TEST_CASE("signal CSV round trip")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto d = scdt::testing::random_signed_density(rng, 64 + trial, -1.3, 2.9);
        std::stringstream s;
        io::write_signal(s, d);
        const auto back = io::read_signal(s);
        REQUIRE(back.size() == d.size());
        REQUIRE_THAT(back.t0, WithinAbs(d.t0, 1e-12));
        REQUIRE_THAT(back.t1, WithinAbs(d.t1, 1e-12));
        for (std::size_t k = 0; k < d.size(); ++k) REQUIRE(back.samples[k] == d.samples[k]);
    }
    std::istringstream headerless("0.5,1\n1.5,2\n");
    CHECK(io::read_signal(headerless).t0 == 0.0);
    std::istringstream one("t,value\n0.5,1\n");
    CHECK_THROWS_AS(io::read_signal(one), ParseError);
    std::istringstream uneven("0,1\n1,1\n3,1\n");
    CHECK_THROWS_AS(io::read_signal(uneven), ParseError);
    std::istringstream junk("0,1\n1,x\n");
    CHECK_THROWS_AS(io::read_signal(junk), ParseError);
    std::istringstream nan("0,1\n1,nan\n");
    CHECK_THROWS_AS(io::read_signal(nan), ParseError);
}

TEST_CASE("reference specs")
{
    CHECK(io::parse_reference("uniform:0,1") == ReferenceMeasure::uniform(0.0, 1.0));
    const auto p = io::parse_reference("pwl:0,0;1,0.5;3,2");
    CHECK(p.total_mass() == 2.0);
    CHECK(io::parse_reference(io::reference_spec(p)) == p);
    for (const char* bad : {"uniform:1,1", "uniform:0", "gauss:0,1", "pwl:0,0.1;1,1", "pwl:0,0;1", "nothing"})
        CHECK_THROWS_AS(io::parse_reference(bad), ReferenceError);
}

TEST_CASE("transform JSON round trip")
{
    const TransformConfig cfg(io::parse_reference("pwl:0,0;0.5,0.2;2,1.5"), 64);
    const auto t = scdt_forward(measure_from_density(bumps()), cfg);
    const auto text = io::dump17(io::transform_to_json(t, cfg));
    const auto back = io::parse_transform(text);
    CHECK(back.transform == t);
    CHECK(back.config.reference() == cfg.reference());
    CHECK(back.config.size() == 64);

    // Sentinels survive.
    ScdtResult s{{std::vector<ExtendedReal>(64, ExtendedReal(0.0)), 1.0}, CdtResult::zero(64)};
    s.plus.samples.back() = POS_INF;
    CHECK(io::parse_transform(io::dump17(io::transform_to_json(s, cfg))).transform == s);

    auto j = io::transform_to_json(t, cfg);
    j["version"] = 2;
    CHECK_THROWS_AS(io::transform_from_json(j), ParseError);
    j = io::transform_to_json(t, cfg);
    j["quantiles"][3] = 0.5;
    CHECK_THROWS_AS(io::transform_from_json(j), ParseError);
    j = io::transform_to_json(t, cfg);
    j["plus"]["samples"].erase(0);
    CHECK_THROWS_AS(io::transform_from_json(j), ParseError);
    CHECK_THROWS_AS(io::parse_transform("{"), ParseError);
    CHECK_THROWS_AS(io::dump17(io::json(std::nan(""))), ParseError);
    CHECK(io::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("experiment config round trip")
{
    io::ExperimentConfig c;
    c.gen.seed = 42;
    c.gen.count = 30;
    c.gen.classes = {ClassTemplate::square, ClassTemplate::gabor};
    c.lda.shrinkage = 1e-4;
    const auto back = io::experiment_config_from_json(io::json::parse(io::dump17(io::experiment_config_to_json(c))));
    CHECK(back.gen.seed == 42);
    CHECK(back.gen.count == 30);
    CHECK(back.gen.classes == c.gen.classes);
    CHECK(back.lda.shrinkage == 1e-4);
    CHECK(io::experiment_config_from_json(io::json::object()).gen.count == 500);
    CHECK_THROWS_AS(io::experiment_config_from_json(io::json{{"classes", io::json::array()}}), ParseError);
    CHECK_THROWS_AS(io::experiment_config_from_json(io::json{{"count", "many"}}), ParseError);
    CHECK_THROWS_AS(io::experiment_config_from_json(io::json{{"a_range", {2.0, 1.0}}}), ParseError);
}

TEST_CASE("cli transform, inverse and distance")
{
    TempDir dir;
    io::write_signal_file(dir / "a.csv", bumps());
    io::write_signal_file(dir / "b.csv", bumps(0.3));

    auto r = run({"transform", "--input", dir / "a.csv", "--output", dir / "a.json"});
    REQUIRE(r.code == 0);
    const auto t = io::parse_transform(io::read_text_file(dir / "a.json"));
    CHECK(t.transform == scdt_forward(measure_from_density(bumps()), TransformConfig()));

    r = run({"inverse", "--input", dir / "a.json", "--output", dir / "a_back.csv", "--grid", "0,4,200"});
    REQUIRE(r.code == 0);
    const auto back = io::read_signal_file(dir / "a_back.csv");
    CHECK(back.size() == 200);
    double l1 = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < 200; ++k) {
        l1 += std::abs(back.samples[k] - bumps().samples[k]);
        norm += std::abs(bumps().samples[k]);
    }
    CHECK(l1 / norm < 0.1);

    r = run({"inverse", "--input", dir / "a.json", "--output", dir / "x.csv", "--grid", "2,3,10"});
    CHECK(r.code == 4);

    r = run({"distance", "--a", dir / "a.csv", "--b", dir / "b.csv"});
    REQUIRE(r.code == 0);
    const auto sa = measure_from_density(bumps());
    const auto sb = measure_from_density(bumps(0.3));
    CHECK(r.out == io::format_double(d_s(sa, sb).value) + "\n");
    CHECK(run({"distance", "--a", dir / "a.csv", "--b", dir / "b.csv", "--metric", "w2"}).code == 5);
    CHECK(run({"distance", "--a", dir / "a.csv", "--b", dir / "b.csv", "--metric", "dw2"}).code == 5);

    GridDensity pos = bumps();
    for (auto& v : pos.samples) v = std::max(v, 0.0);
    GridDensity pos2 = bumps(0.5);
    for (auto& v : pos2.samples) v = std::max(v, 0.0);
    io::write_signal_file(dir / "p.csv", pos);
    io::write_signal_file(dir / "q.csv", pos2);
    io::write_signal_file(dir / "z.csv", GridDensity{0.0, 4.0, std::vector<double>(200, 0.0)});
    r = run({"distance", "--a", dir / "p.csv", "--b", dir / "q.csv", "--metric", "w2"});
    REQUIRE(r.code == 0);
    CHECK_THAT(std::stod(r.out), WithinAbs(0.5, 0.03));
    CHECK(run({"distance", "--a", dir / "p.csv", "--b", dir / "z.csv", "--metric", "w2"}).code == 5);
    CHECK(run({"distance", "--a", dir / "p.csv", "--b", dir / "z.csv", "--metric", "dw2"}).code == 0);

    // Opposite signs at the same location cannot be inverted.
    const ScdtResult clash{{std::vector<ExtendedReal>(1024, ExtendedReal(1.0)), 1.0},
                           {std::vector<ExtendedReal>(1024, ExtendedReal(1.0)), 1.0}};
    io::write_text_file(dir / "clash.json", io::dump17(io::transform_to_json(clash, TransformConfig())));
    CHECK(run({"inverse", "--input", dir / "clash.json", "--output", dir / "x.csv", "--grid", "0,2,4"}).code == 4);
    const ScdtResult near{{std::vector<ExtendedReal>(1024, ExtendedReal(1.0)), 1.0},
                          {std::vector<ExtendedReal>(1024, ExtendedReal(1.0 + 1e-12)), 1.0}};
    io::write_text_file(dir / "near.json", io::dump17(io::transform_to_json(near, TransformConfig())));
    r = run({"inverse", "--input", dir / "near.json", "--output", dir / "x.csv", "--grid", "0,2,4"});
    CHECK(r.code == 0);
    CHECK(r.err.find("warning") != std::string::npos);
}

TEST_CASE("cli exit codes for bad input")
{
    TempDir dir;
    io::write_signal_file(dir / "a.csv", bumps());
    io::write_text_file(dir / "bad.csv", "t,value\n0,1\n");
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"transform", "--input", dir / "a.csv"}).code == 2);
    CHECK(run({"transform", "--input", dir / "bad.csv", "--output", dir / "o.json"}).code == 2);
    CHECK(run({"transform", "--input", dir / "missing.csv", "--output", dir / "o.json"}).code == 2);
    CHECK(run({"transform", "--input", dir / "a.csv", "--output", dir / "o.json", "--ref", "uniform:1,0"}).code == 3);
    CHECK(run({"transform", "--input", dir / "a.csv", "--output", dir / "o.json", "--ref", "pwl:0,0;1,0.5;2,0.4"}).code == 3);
    io::write_text_file(dir / "t.json", "{\"version\": 1}");
    CHECK(run({"inverse", "--input", dir / "t.json", "--output", dir / "o.csv", "--grid", "0,1,4"}).code == 2);
    CHECK(run({"inverse", "--input", dir / "t.json", "--output", dir / "o.csv", "--grid", "0,1,2.5"}).code == 2);
    io::write_text_file(dir / "c.json", "{\"classes\": []}");
    CHECK(run({"generate", "--config", dir / "c.json", "--outdir", dir / "out"}).code == 2);
    io::write_text_file(dir / "c2.json", "not json");
    CHECK(run({"classify-demo", "--config", dir / "c2.json", "--report", dir / "r.json"}).code == 2);
}

TEST_CASE("cli generate and classify-demo")
{
    TempDir dir;
    io::ExperimentConfig c;
    c.gen.count = 30;
    c.gen.seed = 5;
    c.quantiles = 64;
    io::write_text_file(dir / "cfg.json", io::dump17(io::experiment_config_to_json(c)));

    REQUIRE(run({"generate", "--config", dir / "cfg.json", "--outdir", dir / "data"}).code == 0);
    const auto labels = io::read_text_file(dir / "data/labels.csv");
    CHECK(labels.rfind("file,class,template,a,b\nsignal_00.csv,0,gabor,", 0) == 0);
    c.gen.seed = 5;
    const auto expect = generate_dataset(c.gen);
    CHECK(io::read_signal_file(dir / "data/signal_29.csv").samples.size() == expect[29].signal.size());

    auto r1 = run({"classify-demo", "--config", dir / "cfg.json", "--report", dir / "r1.json", "--plots", dir / "p.csv"});
    auto r2 = run({"classify-demo", "--config", dir / "cfg.json", "--report", dir / "r2.json"});
    REQUIRE(r1.code == 0);
    REQUIRE(r2.code == 0);
    CHECK(r1.out == r2.out);
    CHECK(r1.out.find("accuracy_scdt_space") != std::string::npos);
    CHECK(io::read_text_file(dir / "r1.json") == io::read_text_file(dir / "r2.json"));
    const auto report = io::json::parse(io::read_text_file(dir / "r1.json"));
    CHECK(report["seed"] == 5);
    CHECK(report["test_size"] == 15);
    CHECK(io::read_text_file(dir / "p.csv").rfind("space,class,u,v\n", 0) == 0);

    {
        const SeedEnv env("77");
        REQUIRE(run({"classify-demo", "--config", dir / "cfg.json", "--report", dir / "r3.json"}).code == 0);
        CHECK(io::json::parse(io::read_text_file(dir / "r3.json"))["seed"] == 77);
        REQUIRE(run({"generate", "--config", dir / "cfg.json", "--outdir", dir / "data77"}).code == 0);
        CHECK(io::read_text_file(dir / "data77/labels.csv") != labels);
    }
    {
        const SeedEnv env("abc");
        CHECK(run({"classify-demo", "--config", dir / "cfg.json", "--report", dir / "r4.json"}).code == 2);
    }

    // One class with zero noise and no shrinkage: within-class scatter vanishes.
    io::ExperimentConfig flat = c;
    flat.gen.classes = {ClassTemplate::square, ClassTemplate::gabor};
    flat.gen.noise_sigma = 0.0;
    flat.gen.a_min = flat.gen.a_max = 1.0;
    flat.gen.b_min = flat.gen.b_max = 0.0;
    flat.lda = {0.0, false};
    io::write_text_file(dir / "flat.json", io::dump17(io::experiment_config_to_json(flat)));
    CHECK(run({"classify-demo", "--config", dir / "flat.json", "--report", dir / "r5.json"}).code == 1);
}

TEST_CASE("the installed executable reports exit codes")
{
    TempDir dir;
    io::write_signal_file(dir / "a.csv", bumps());
    const std::string bin = SCDT_BINARY;
    auto status = [](const std::string& cmd) {
        const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    CHECK(status(bin + " transform --input " + (dir / "a.csv") + " --output " + (dir / "a.json")) == 0);
    CHECK(status(bin + " transform --input " + (dir / "a.csv") + " --output " + (dir / "a.json") + " --ref uniform:3,1") == 3);
    CHECK(status(bin + " distance --a " + (dir / "a.csv") + " --b " + (dir / "a.csv") + " --metric w2") == 5);
}
