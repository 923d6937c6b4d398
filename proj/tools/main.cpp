#include "experiments.hpp"

#include "csl/parallel.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>

int main(int argc, char **argv)
{
    using namespace csl::app;

    CLI::App app{"Local-time constrained subordinators: criteria, simulation and reports"};
    app.require_subcommand(0, 1);
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::string> out_dir;
    bool print_defaults = false;
    app.add_option("--config", config_path, "JSON scenario file");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--workers", workers, "worker threads (0 = all cores)");
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--print-defaults", print_defaults, "print the default config and exit");
    for (const auto &name : experiment_names())
        app.add_subcommand(name, "run the " + name + " experiment")->fallthrough();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    if (print_defaults)
    {
        std::cout << default_config().dump(2) << '\n';
        return kExitOk;
    }
    if (app.get_subcommands().empty())
    {
        std::cerr << "error: a subcommand is required\n" << app.help();
        return kExitConfigError;
    }
    const std::string experiment = app.get_subcommands().front()->get_name();

    RunContext ctx;
    try
    {
        if (config_path.empty())
        {
            if (const char *env = std::getenv("CSL_CONFIG"))
                config_path = env;
        }
        ctx.config = load_config(config_path);
        apply_env_overrides(ctx.config, [](const char *name) { return std::getenv(name); });
        if (seed)
            ctx.config["seed"] = *seed;
        if (workers)
            ctx.config["workers"] = *workers;
        if (out_dir)
            ctx.config["output_dir"] = *out_dir;
        ctx.seed = ctx.config.at("seed").get<std::uint64_t>();
        const auto w = ctx.config.at("workers").get<unsigned>();
        ctx.workers = w == 0 ? csl::default_workers() : w;
        ctx.out_dir = ctx.config.at("output_dir").get<std::string>();
    }
    catch (const std::exception &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }

    try
    {
        const auto res = run_experiment(experiment, ctx);
        std::cout << experiment << " (seed " << ctx.seed << ", " << ctx.workers << " workers) -> "
                  << ctx.out_dir.string() << '\n';
        for (const auto &line : res.summary)
            std::cout << "  " << line << '\n';
        std::cout << "  files: report.json";
        for (const auto &f : res.files)
            std::cout << ' ' << f;
        std::cout << "\n  status: " << (res.status == kExitOk ? "ok" : "verdict failure") << '\n';
        return res.status;
    }
    catch (const std::exception &e)
    {
        std::cerr << experiment << " failed: " << e.what() << '\n';
        return kExitConfigError;
    }
}
