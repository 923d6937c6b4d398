#pragma once

#include "csl/boundary.hpp"
#include "csl/crossing.hpp"
#include "csl/model.hpp"

#include <json.hpp>

#include <functional>
#include <stdexcept>
#include <string>

namespace csl::app
{
    using nlohmann::json;

    /// Bad config file, key, or value. Maps to exit status 2.
    struct ConfigError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    /// Every accepted key with its default value.
    const json &default_config();

    /// Defaults overlaid with `user`. Keys absent from the defaults and values of the wrong
    /// JSON type are errors naming the dotted key path.
    json merge_config(const json &user);

    /// Parses and merges a config file; an empty path gives the defaults.
    json load_config(const std::string &path);

    /// CSL_SEED, CSL_WORKERS, CSL_OUTPUT_DIR and CSL_<SECTION>_<KEY> (upper case) replace config
    /// values. A value that parses as JSON is taken as such, otherwise as a string.
    void apply_env_overrides(json &config, const std::function<const char *(const char *)> &lookup);

    SubordinatorModel build_model(const json &config);
    BoundaryPair build_boundary(const json &config);
    CrossingScenario build_scenario(const json &config);

    /// Growth function from a name: "log^p" = (log h)^p, "exp(log^p)" = exp((log h)^p), "h^p".
    std::function<double(double)> parse_growth(const std::string &spec);
} // namespace csl::app
