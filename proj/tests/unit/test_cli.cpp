#include <doctest.h>

#include "config.hpp"
#include "experiments.hpp"
#include "svg.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace csl::app;
namespace fs = std::filesystem;

namespace
{
    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    int run_cli(const std::string &args)
    {
        const int rc = std::system((std::string(CSL_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    }
} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("strict config merging")
    {
        const auto merged = merge_config(json::parse(R"({"model": {"alpha": 0.3}, "seed": 9})"));
        CHECK(merged["model"]["alpha"] == 0.3);
        CHECK(merged["model"]["c"] == 1.0);
        CHECK(merged["seed"] == 9);
        try
        {
            merge_config(json::parse(R"({"model": {"alpha_": 0.5}})"));
            FAIL("accepted an unknown key");
        }
        catch (const ConfigError &e)
        {
            CHECK(std::string(e.what()).find("model.alpha_") != std::string::npos);
        }
        CHECK_THROWS_AS(merge_config(json::parse(R"({"modle": {}})")), ConfigError);
        CHECK_THROWS_AS(merge_config(json::parse(R"({"model": {"alpha": "half"}})")), ConfigError);
        CHECK_THROWS_AS(merge_config(json::parse(R"({"crossing": {"n": 1.5}})")), ConfigError);
        CHECK_THROWS_AS(merge_config(json::parse(R"({"seed": -1})")), ConfigError);
        CHECK_THROWS_AS(merge_config(json::parse(R"({"model": 3})")), ConfigError);
        CHECK_NOTHROW(merge_config(json::parse(R"({"doob": {"h": 3}})")));
    }

    TEST_CASE("environment overrides")
    {
        std::map<std::string, std::string> env{{"CSL_MODEL_ALPHA", "0.7"}, {"CSL_SEED", "44"},
                                               {"CSL_OUTPUT_DIR", "elsewhere"}, {"CSL_BOUNDARY_KIND", "monolog"}};
        auto cfg = default_config();
        apply_env_overrides(cfg, [&](const char *name) -> const char * {
            const auto it = env.find(name);
            return it == env.end() ? nullptr : it->second.c_str();
        });
        CHECK(cfg["model"]["alpha"] == 0.7);
        CHECK(cfg["seed"] == 44);
        CHECK(cfg["output_dir"] == "elsewhere");
        CHECK(cfg["boundary"]["kind"] == "monolog");
    }

    TEST_CASE("scenario construction")
    {
        auto cfg = merge_config(json::parse(R"({"boundary": {"kind": "monolog", "gamma": 0.5}, "simulation": {"epsilon": 0.01}})"));
        const auto sc = build_scenario(cfg);
        CHECK(sc.cutoff() == 0.01);
        CHECK(sc.boundary.f(100.0) == doctest::Approx(10.0 / std::log(std::exp(1.0) + 100.0)));
        CHECK_THROWS_AS(build_model(merge_config(json::parse(R"({"model": {"alpha": 1.2}})"))), ConfigError);
        CHECK_THROWS_AS(build_model(merge_config(json::parse(R"({"model": {"kind": "gamma"}})"))), ConfigError);
        CHECK_THROWS_AS(build_model(merge_config(json::parse(R"({"model": {"kind": "custom"}})"))), ConfigError);

        {
            std::ofstream t("tail_unit.csv");
            t << "x,tail\n0.01,5.6\n1,0.56\n100,0.056\n";
        }
        const auto m = build_model(merge_config(json::parse(R"({"model": {"kind": "custom", "tail_file": "tail_unit.csv"}})")));
        CHECK(m.tail(1.0) == doctest::Approx(0.56));
        CHECK(m.tail(10.0) == doctest::Approx(0.56 / std::sqrt(10.0)).epsilon(1e-9));
    }

    TEST_CASE("growth functions")
    {
        CHECK(parse_growth("log^2")(std::exp(3.0)) == doctest::Approx(9.0));
        CHECK(parse_growth("exp(log^2)")(std::exp(1.0)) == doctest::Approx(std::exp(1.0)));
        CHECK(parse_growth("h^0.5")(16.0) == doctest::Approx(4.0));
        CHECK(parse_growth("3")(100.0) == 3.0);
        CHECK_THROWS_AS(parse_growth("sqrt"), ConfigError);
        CHECK_THROWS_AS(parse_growth("log^x"), ConfigError);
    }

    TEST_CASE("svg output")
    {
        const auto s = render_svg({"t<1", "x", "y", true, true}, {{"a", {1.0, 10.0, -1.0, 100.0}, {1.0, 0.1, 5.0, 0.0}}});
        CHECK(s.rfind("<svg", 0) == 0);
        CHECK(s.find("t&lt;1") != std::string::npos);
        CHECK(s.find("(log)") != std::string::npos);
        const auto start = s.find("points=\"");
        REQUIRE(start != std::string::npos);
        const auto end = s.find('"', start + 8);
        const std::string pts = s.substr(start + 8, end - start - 8);
        CHECK(std::count(pts.begin(), pts.end(), ',') == 2);
    }

    TEST_CASE("classify and selftest through the library")
    {
        RunContext ctx;
        ctx.config = default_config();
        ctx.out_dir = "cli_unit_classify";
        const auto r = run_experiment("classify", ctx);
        CHECK(r.status == kExitOk);
        const auto report = slurp(ctx.out_dir / "report.json");
        CHECK(report.find("\"verdict\":\"Transient\"") != std::string::npos);
        CHECK(report.find("\"schema_version\":1") != std::string::npos);
        const auto j = json::parse(report);
        CHECK(j["I"].get<double>() == doctest::Approx(1.1283791670955126).epsilon(1e-6));
        for (const auto &f : j["files"])
            CHECK(fs::exists(ctx.out_dir / f.get<std::string>()));

        for (const auto &c : selftest_cases())
        {
            INFO(c.module << ": " << c.name << " " << c.detail);
            CHECK(c.pass);
        }
        CHECK_THROWS_AS(run_experiment("nonsense", ctx), ConfigError);
    }

    TEST_CASE("binary exit codes")
    {
        {
            std::ofstream bad("bad_unit.json");
            bad << R"({"model": {"alpha_": 0.5}})";
        }
        CHECK(run_cli("classify --config bad_unit.json --out cli_unit_bad") == kExitConfigError);
        CHECK(run_cli("selftest --out cli_unit_selftest") == kExitOk);
        CHECK(run_cli("crossing --config missing_unit.json") == kExitConfigError);
        CHECK(run_cli("--seed 5") == kExitConfigError);
        {
            std::ofstream cfg("bad_growth_unit.json");
            cfg << R"({"envelope": {"w": ["4"], "n_accept": 0}})";
        }
        CHECK(run_cli("envelope --config bad_growth_unit.json --out cli_unit_env") == kExitConfigError);
    }

    TEST_CASE("CSV bytes do not depend on the worker count")
    {
        const auto base = merge_config(json::parse(R"({"simulation": {"epsilon": 0.01}, "crossing": {"n": 20000, "t_grid": [5, 10]}})"));
        std::string first;
        for (unsigned w : {1u, 3u})
        {
            RunContext ctx{base, 17, w, "cli_unit_workers_" + std::to_string(w)};
            run_experiment("crossing", ctx);
            const auto bytes = slurp(ctx.out_dir / "crossing.csv");
            if (first.empty())
                first = bytes;
            CHECK(bytes == first);
        }
    }
}
