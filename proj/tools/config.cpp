#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace csl::app
{
    const json &default_config()
    {
        static const json defaults = json::parse(R"cfg({
            "seed": 1,
            "workers": 0,
            "output_dir": "csl_out",
            "model": {"kind": "stable", "alpha": 0.5, "c": 1.0, "drift": 0.0, "tail_file": ""},
            "boundary": {"kind": "monomial", "gamma": 0.25, "log_power": 1.0, "f0": 0.5, "table_file": ""},
            "simulation": {"epsilon": 0.0, "jumps_per_unit_time": 1000.0, "truncation": 0.0},
            "classify": {"beta": 0.0},
            "crossing": {"n": 1000000, "t_grid": [10, 20, 40, 80], "points_per_decade": 200},
            "doob": {"h": 2.0, "T": 50.0, "bins": 10, "n": 100000, "n_marginal": 1000000, "n_accept": 2000,
                     "max_attempts": 100000000, "z_limit": 3.0, "min_fraction": 0.9},
            "qh": {"h": 2.0, "y": 64.0, "T_schedule": [25, 50, 100], "n": 1000000},
            "explosion": {"n": 1000000, "plateau_tol": 0.01, "t_max": 4096.0, "points_per_doubling": 32,
                          "h_values": [1, 2, 5], "T_schedule": [50, 100], "n_accept": 0},
            "envelope": {"w": ["log^2", "exp(log^2)"], "h_grid": [10, 100, 1000, 10000, 100000, 1000000, 10000000, 100000000],
                         "tol": 0.05, "tail_points": 3, "h_values": [5, 10, 20], "T": 2000.0, "n_accept": 1000,
                         "max_attempts": 1000000000},
            "bounds": {"H": 0.1, "t": [0.5, 1, 2], "A": [1.5, 3, 6], "B": [5, 10, 20], "n": 100000,
                       "law_x": 1.0, "law_t": 4.0, "law_n": 100000, "significance": 0.01,
                       "lemma_y": 16.0, "lemma_h": 1.0, "lemma_A": 4.0, "lemma_n": 100000,
                       "lemma_T_max": [1000, 10000, 100000, 1000000]}
        })cfg");
        return defaults;
    }

    namespace
    {
        bool same_kind(const json &a, const json &b)
        {
            if (a.is_number() && b.is_number())
                return !(a.is_number_integer() && b.is_number_float());
            return a.type() == b.type();
        }

        void overlay(json &target, const json &user, const std::string &prefix)
        {
            if (!user.is_object())
                throw ConfigError("config section '" + (prefix.empty() ? std::string("<root>") : prefix) +
                                  "' must be an object");
            for (const auto &[key, value] : user.items())
            {
                const std::string path = prefix.empty() ? key : prefix + "." + key;
                if (!target.contains(key))
                    throw ConfigError("unknown config key '" + path + "'");
                json &slot = target[key];
                if (slot.is_object())
                {
                    overlay(slot, value, path);
                    continue;
                }
                if (!same_kind(slot, value))
                {
                    const std::string want = slot.is_number_integer() ? "an integer" : std::string(slot.type_name());
                    throw ConfigError("config key '" + path + "' expects " + want + ", got " +
                                      std::string(value.type_name()));
                }
                if (slot.is_array())
                {
                    for (const auto &v : value)
                    {
                        if (!slot.empty() && !same_kind(slot.front(), v) && !(slot.front().is_number() && v.is_number()))
                            throw ConfigError("config key '" + path + "' has an element of the wrong type");
                    }
                }
                if (slot.is_number_unsigned() && value.is_number_integer() && value.get<std::int64_t>() < 0)
                    throw ConfigError("config key '" + path + "' must be nonnegative");
                slot = value;
            }
        }

        std::string upper(std::string s)
        {
            std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
            return s;
        }

        json parse_env_value(const char *text)
        {
            json v = json::parse(text, nullptr, false);
            return v.is_discarded() ? json(std::string(text)) : v;
        }

        std::pair<std::vector<double>, std::vector<double>> read_table(const std::string &file)
        {
            std::ifstream in(file);
            if (!in)
                throw ConfigError("cannot open table file " + file);
            std::vector<double> a;
            std::vector<double> b;
            std::string line;
            while (std::getline(in, line))
            {
                std::replace(line.begin(), line.end(), ',', ' ');
                std::istringstream ss(line);
                double x = 0.0;
                double y = 0.0;
                if (ss >> x >> y)
                {
                    a.push_back(x);
                    b.push_back(y);
                }
            }
            if (a.size() < 2)
                throw ConfigError("table file " + file + " needs at least two numeric rows");
            return {a, b};
        }
    } // namespace

    json merge_config(const json &user)
    {
        json out = default_config();
        overlay(out, user, "");
        return out;
    }

    json load_config(const std::string &path)
    {
        if (path.empty())
            return default_config();
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open config " + path);
        json user;
        try
        {
            user = json::parse(in, nullptr, true, true);
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError("config " + path + ": " + e.what());
        }
        return merge_config(user);
    }

    void apply_env_overrides(json &config, const std::function<const char *(const char *)> &lookup)
    {
        json user = json::object();
        for (const auto &[key, value] : default_config().items())
        {
            if (value.is_object())
            {
                for (const auto &[sub, unused] : value.items())
                {
                    const std::string name = "CSL_" + upper(key) + "_" + upper(sub);
                    if (const char *v = lookup(name.c_str()))
                        user[key][sub] = parse_env_value(v);
                }
            }
            else if (const char *v = lookup(("CSL_" + upper(key)).c_str()))
            {
                user[key] = value.is_string() ? json(std::string(v)) : parse_env_value(v);
            }
        }
        overlay(config, user, "");
    }

    SubordinatorModel build_model(const json &config)
    {
        const auto &m = config.at("model");
        const std::string kind = m.at("kind");
        const double drift = m.at("drift");
        if (!(drift >= 0.0))
            throw ConfigError("model.drift must be >= 0");
        if (kind == "stable")
        {
            const double alpha = m.at("alpha");
            const double c = m.at("c");
            if (!(alpha > 0.0 && alpha < 1.0) || !(c > 0.0))
                throw ConfigError("model.alpha must lie in (0,1) and model.c must be positive");
            return SubordinatorModel::stable(alpha, c, drift);
        }
        if (kind == "custom")
        {
            const std::string file = m.at("tail_file");
            if (file.empty())
                throw ConfigError("model.kind = custom needs model.tail_file");
            auto [x, tail] = read_table(file);
            return SubordinatorModel::tabulated(drift, std::move(x), std::move(tail));
        }
        throw ConfigError("model.kind must be stable or custom, got '" + kind + "'");
    }

    BoundaryPair build_boundary(const json &config)
    {
        const auto &b = config.at("boundary");
        const std::string kind = b.at("kind");
        const double f0 = b.at("f0");
        if (kind == "monomial")
            return BoundaryPair::monomial(b.at("gamma").get<double>(), f0);
        if (kind == "monolog")
            return BoundaryPair::monolog(b.at("gamma").get<double>(), b.at("log_power").get<double>(), f0);
        if (kind == "custom-table")
        {
            const std::string file = b.at("table_file");
            if (file.empty())
                throw ConfigError("boundary.kind = custom-table needs boundary.table_file");
            auto [t, f] = read_table(file);
            return BoundaryPair::tabulated(std::move(t), std::move(f));
        }
        throw ConfigError("boundary.kind must be monomial, monolog or custom-table, got '" + kind + "'");
    }

    CrossingScenario build_scenario(const json &config)
    {
        CrossingScenario sc{build_model(config), build_boundary(config), std::nullopt, {}};
        const auto &s = config.at("simulation");
        const double eps = s.at("epsilon");
        if (eps > 0.0)
            sc.sim.cutoff = eps;
        sc.sim.jumps_per_unit_time = s.at("jumps_per_unit_time");
        if (!(sc.sim.jumps_per_unit_time > 0.0))
            throw ConfigError("simulation.jumps_per_unit_time must be positive");
        const double a = s.at("truncation");
        if (a > 0.0)
            sc.sim.truncation = a;
        return sc;
    }

    std::function<double(double)> parse_growth(const std::string &spec)
    {
        auto power_after = [&](std::size_t pos, std::size_t end) {
            const std::string num = spec.substr(pos, end - pos);
            std::size_t used = 0;
            double p = 0.0;
            try
            {
                p = std::stod(num, &used);
            }
            catch (const std::exception &)
            {
                used = 0;
            }
            if (used != num.size() || !(p > 0.0))
                throw ConfigError("growth function '" + spec + "': bad exponent");
            return p;
        };
        if (spec.rfind("exp(log^", 0) == 0 && spec.back() == ')')
        {
            const double p = power_after(8, spec.size() - 1);
            return [p](double h) { return std::exp(std::pow(std::log(h), p)); };
        }
        if (spec.rfind("log^", 0) == 0)
        {
            const double p = power_after(4, spec.size());
            return [p](double h) { return std::pow(std::log(h), p); };
        }
        if (spec.rfind("h^", 0) == 0)
        {
            const double p = power_after(2, spec.size());
            return [p](double h) { return std::pow(h, p); };
        }
        if (spec.find_first_not_of("0123456789.eE+-") == std::string::npos)
        {
            const double c = std::stod(spec);
            return [c](double) { return c; };
        }
        throw ConfigError("growth function '" + spec + "' not recognised (log^p, exp(log^p), h^p or a constant)");
    }
} // namespace csl::app
