#pragma once

#include "config.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace csl::app
{
    inline constexpr int kSchemaVersion = 1;

    enum ExitStatus
    {
        kExitOk = 0,
        kExitVerdictFailure = 1,
        kExitConfigError = 2
    };

    struct RunContext
    {
        json config;               ///< merged config
        std::uint64_t seed = 1;
        unsigned workers = 1;
        std::filesystem::path out_dir;
    };

    struct RunResult
    {
        int status = kExitOk;
        json report;                   ///< written to report.json
        std::vector<std::string> files; ///< relative to out_dir
        std::vector<std::string> summary;
    };

    const std::vector<std::string> &experiment_names();

    /// Runs one experiment, writes its CSV and SVG files and report.json into out_dir.
    RunResult run_experiment(const std::string &name, const RunContext &ctx);

    struct SelfTestCase
    {
        std::string module;
        std::string name;
        bool pass = false;
        std::string detail;
    };

    /// The closed-form and contract examples of every module.
    std::vector<SelfTestCase> selftest_cases();
} // namespace csl::app
