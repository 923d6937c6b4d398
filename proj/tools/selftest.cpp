#include "experiments.hpp"

#include "csl/bounds.hpp"
#include "csl/conditioning.hpp"
#include "csl/envelope.hpp"
#include "csl/stable.hpp"
#include "csl/transience.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace csl::app
{
    namespace
    {
        struct Suite
        {
            std::vector<SelfTestCase> cases;

            void add(const std::string &module, const std::string &name, const std::function<std::string()> &body)
            {
                SelfTestCase c{module, name, false, ""};
                try
                {
                    c.detail = body();
                    c.pass = c.detail.empty();
                }
                catch (const std::exception &e)
                {
                    c.detail = std::string("unexpected exception: ") + e.what();
                }
                cases.push_back(c);
            }

            template <class E>
            void add_throws(const std::string &module, const std::string &name, const std::function<void()> &body)
            {
                add(module, name, [&]() -> std::string {
                    try
                    {
                        body();
                    }
                    catch (const E &)
                    {
                        return "";
                    }
                    return "no exception";
                });
            }
        };

        std::string expect(bool ok, const std::string &what) { return ok ? "" : what; }

        std::string near(double got, double want, double tol)
        {
            return std::abs(got - want) <= tol ? "" : "got " + format_double(got) + ", want " + format_double(want);
        }
    } // namespace

    std::vector<SelfTestCase> selftest_cases()
    {
        Suite s;
        const auto stable = SubordinatorModel::stable(0.5, 1.0);
        const auto quarter = BoundaryPair::monomial(0.25);
        CrossingScenario sc{stable, quarter, std::nullopt, {}};
        sc.sim.cutoff = 1e-2;

        s.add("levy_core", "tail nonincreasing on a grid", [&] {
            double prev = stable.tail(1e-6);
            for (double x = 1e-6; x < 1e6; x *= 1.7)
            {
                const double v = stable.tail(x);
                if (v > prev)
                    return std::string("increase at x = ") + format_double(x);
                prev = v;
            }
            return std::string();
        });
        s.add("levy_core", "Laplace exponent at 0", [&] { return near(laplace_exponent(stable, 0.0), 0.0, 0.0); });
        s.add_throws<std::domain_error>("levy_core", "bounded f rejected", [&] {
            const auto bounded = BoundaryPair::from_functions([](double t) { return 1.0 - 0.5 * std::exp(-t); },
                                                              [](double x) { return -std::log(2.0 * (1.0 - x)); });
            classify_transience(stable, bounded);
        });
        s.add("levy_core", "zero shift gives g", [&] {
            for (double t : {1.0, 10.0, 1e3})
            {
                if (shifted_boundary(quarter, 0.0, 0.0, t) != quarter.g(t))
                    return std::string("mismatch at t = ") + format_double(t);
            }
            return std::string();
        });
        s.add("levy_core", "g zero below f(0)", [&] { return near(shifted_boundary(quarter, 3.0, 0.1, 0.2), -3.0, 0.0); });
        s.add("levy_core", "t0 = f(Ay) for large y", [&] {
            return near(t0(quarter, 1e4, 4.0), quarter.f(4e4), 0.0);
        });
        s.add_throws<std::domain_error>("levy_core", "A = 3 rejected", [&] { t0(quarter, 2.0, 3.0); });

        s.add("path_sim", "truncated path respects the size cap", [&] {
            const auto p = sample_path(stable, 20.0, 1e-2, 0.5, RngStream{7, 0});
            const double cap = p.drift_slope * 20.0 + static_cast<double>(p.jumps.size()) * 0.5;
            return expect(path_value(p, 20.0) <= cap && std::all_of(p.jumps.begin(), p.jumps.end(),
                                                                     [](const Jump &j) { return j.size <= 0.5; }),
                          "cap exceeded");
        });
        s.add("path_sim", "same (seed, index) gives the same path", [&] {
            const auto a = sample_path(stable, 10.0, 1e-2, std::nullopt, RngStream{11, 3});
            const auto b = sample_path(stable, 10.0, 1e-2, std::nullopt, RngStream{11, 3});
            bool same = a.jumps.size() == b.jumps.size();
            for (std::size_t i = 0; same && i < a.jumps.size(); ++i)
                same = a.jumps[i].time == b.jumps[i].time && a.jumps[i].size == b.jumps[i].size;
            return expect(same, "paths differ");
        });
        s.add("path_sim", "X_t -> 0 as t -> 0", [&] {
            std::vector<double> v;
            Rng rng(5);
            for (int i = 0; i < 1001; ++i)
                v.push_back(sample_stable_value(0.5, 1.0, 1e-6, rng));
            std::nth_element(v.begin(), v.begin() + 500, v.end());
            return expect(v[500] <= 1e-6, "median " + format_double(v[500]));
        });
        s.add("path_sim", "path_value examples", [&] {
            SamplePath p;
            p.horizon = 5.0;
            p.jumps = {{1.0, 5.0}};
            SamplePath q;
            q.horizon = 5.0;
            q.drift_slope = 2.0;
            std::string err = near(path_value(p, 0.0), 0.0, 0.0);
            err += near(path_value(p, 1.0), 5.0, 0.0);
            err += near(path_value(p, 0.999), 0.0, 0.0);
            err += near(path_value(q, 3.0), 6.0, 0.0);
            return err;
        });
        s.add("path_sim", "no jump above x gives none", [&] {
            SamplePath p;
            p.horizon = 5.0;
            p.cutoff = 0.01;
            p.jumps = {{1.0, 0.5}, {2.0, 0.7}};
            return expect(!first_big_jump(p, 1.0).has_value(), "found a jump");
        });

        s.add("crossing", "no violation while g = 0", [&] {
            const Barrier barrier(quarter);
            for (std::uint64_t i = 0; i < 50; ++i)
            {
                const auto p = sample_path(stable, 0.4, 1e-2, std::nullopt, RngStream{13, i});
                if (violation_time(p, barrier, 0.4) != kNoViolation)
                    return std::string("violation on path ") + std::to_string(i);
            }
            return std::string();
        });
        const auto sigmas = sample_sigmas(sc.with_horizon(20.0), 2000, 17, 1);
        s.add("crossing", "P(O_u) = 1 below f(0)", [&] { return near(sigmas.survival(0.4).value, 1.0, 0.0); });
        s.add("crossing", "Phi(t) <= t and nondecreasing", [&] {
            double prev = 0.0;
            for (double t = 0.05; t <= 20.0; t *= 1.3)
            {
                const double v = sigmas.phi(t).value;
                if (v > t * (1.0 + 1e-12) || v < prev)
                    return std::string("fails at t = ") + format_double(t);
                prev = v;
            }
            return std::string();
        });
        s.add_throws<std::domain_error>("crossing", "diagnostic grid below f(0) rejected", [&] {
            asymptotic_diagnostics(sc.with_horizon(20.0), sigmas, {0.3, 5.0});
        });

        s.add("conditioning", "acceptance 1 when T < f(0)", [&] {
            return near(conditioned_outcomes(sc, 0.4, 100, 1000, 19, 1).acceptance_rate.value, 1.0, 0.0);
        });
        s.add("conditioning", "accepted paths never violate before T", [&] {
            const auto draws = sample_conditioned(sc, 5.0, 30, 1000000, 23, 1);
            const Barrier barrier(quarter);
            for (const auto &p : draws.paths)
            {
                if (violation_time(p, barrier, 5.0) != kNoViolation)
                    return std::string("accepted path violates");
            }
            return expect(draws.paths.size() == 30, "too few accepted paths");
        });
        s.add_throws<std::domain_error>("conditioning", "h = 0 rejected", [&] {
            doob_identity_check(sc, 0.0, 10.0, {}, 1, 1);
        });

        s.add_throws<std::domain_error>("envelope", "constant w rejected", [&] {
            envelope_criterion(sc, [](double) { return 3.0; }, {10.0, 100.0, 1000.0});
        });
        s.add("envelope", "level below g(h) gives fraction 1", [&] {
            const auto e = envelope_empirical(sc, GrowthFn([](double) { return 0.5; }), {2.0, 4.0}, 5.0, 30, 1000000, 29, 1);
            return expect(e.q.size() == 2 && e.q[0].value == 1.0 && e.q[1].value == 1.0, "fraction below 1");
        });

        s.add("bounds", "H -> 1 gives bound -> 1", [&] {
            return near(chernoff_bound(stable, 1.0, 2.0, 10.0, 1.0 - 1e-12).bound, 1.0, 1e-9);
        });
        s.add("bounds", "vacuous lemma 1fyh passes", [&] {
            return expect(lemma_1fyh_check(sc, 16.0, 3.0, 4.0, 100, 31, 1).verdict == Verdict::Pass, "not a pass");
        });

        s.add("cli", "unknown key rejected by name", [&] {
            try
            {
                merge_config(json::parse(R"({"model": {"alpha_": 0.5}})"));
            }
            catch (const ConfigError &e)
            {
                return expect(std::string(e.what()).find("alpha_") != std::string::npos, "message lacks the key");
            }
            return std::string("accepted");
        });
        return s.cases;
    }
} // namespace csl::app
