#include <doctest.h>

#include "csl/envelope.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

using namespace csl;

namespace
{
    CrossingScenario scenario(const BoundaryPair &b)
    {
        CrossingScenario sc{SubordinatorModel::stable(0.5, 1.0), b, std::nullopt, {}};
        sc.sim.cutoff = 1e-2;
        return sc;
    }

    const std::vector<double> kGrid{10, 100, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8};

    double log_sq(double h) { return std::pow(std::log(h), 2.0); }
    double exp_log_sq(double h) { return std::exp(std::pow(std::log(h), 2.0)); }

    MonteCarloEstimate est(double v, double se) { return {v, se, 100, 0}; }
} // namespace

TEST_SUITE("envelope")
{
    TEST_CASE("closed form for a monomial boundary")
    {
        // f = t^(1/4), alpha = 1/2: J = (1 - w^(-1/4)) / (h sqrt(pi))
        const auto sc = scenario(BoundaryPair::monomial(0.25));
        for (double h : {2.0, 10.0, 300.0})
        {
            for (double w : {1.5, 16.0, 1e4})
            {
                const double want = (1.0 - std::pow(w, -0.25)) / (h * std::sqrt(std::numbers::pi));
                CHECK(envelope_integral(sc.model, sc.boundary, h, w) == doctest::Approx(want).epsilon(1e-7));
            }
        }
        CHECK(envelope_integral(sc.model, sc.boundary, 10.0, 1.0) == 0.0);
    }

    TEST_CASE("criterion on the recurrent reference scenario")
    {
        const auto sc = scenario(BoundaryPair::monolog(0.5, 1.0));
        const auto in = envelope_criterion(sc, log_sq, kGrid);
        CHECK(in.verdict == EnvelopeVerdict::InEnvelope);
        CHECK(in.points.back().J < 0.05);
        CHECK(in.points.front().J == doctest::Approx(0.038).epsilon(0.05));
        CHECK(in.warnings.empty());

        const auto out = envelope_criterion(sc, exp_log_sq, kGrid);
        CHECK(out.verdict == EnvelopeVerdict::NotInEnvelope);
        for (std::size_t i = 1; i < out.points.size(); ++i)
            CHECK(out.points[i].J > out.points[i - 1].J);

        write_envelope_csv(in, "envelope_unit.csv");
        std::ifstream f("envelope_unit.csv");
        std::string header;
        std::getline(f, header);
        CHECK(header == "h,J,verdict_component");
    }

    TEST_CASE("additivity of J in the upper limit")
    {
        const auto sc = scenario(BoundaryPair::monolog(0.5, 1.0));
        for (double h : {10.0, 1e3, 1e6})
        {
            const auto [diff, direct] = envelope_additivity(sc.model, sc.boundary, h, log_sq(h));
            CHECK(diff == doctest::Approx(direct).epsilon(1e-7));
        }
    }

    TEST_CASE("growth preconditions")
    {
        const auto sc = scenario(BoundaryPair::monolog(0.5, 1.0));
        CHECK_THROWS_AS(envelope_criterion(sc, [](double) { return 4.0; }, kGrid), std::domain_error);
        CHECK_THROWS_AS(envelope_criterion(sc, [](double h) { return 2.0 + std::sin(h); }, kGrid), std::domain_error);
        CHECK_THROWS_AS(envelope_criterion(sc, [](double h) { return 10.0 + 1e-9 * h; }, kGrid), std::domain_error);
        CHECK_THROWS_AS(envelope_criterion(sc, log_sq, {10.0, 100.0}), std::domain_error);
    }

    TEST_CASE("transient scenarios are flagged")
    {
        const auto sc = scenario(BoundaryPair::monomial(0.25));
        const auto r = envelope_criterion(sc, log_sq, kGrid);
        CHECK_FALSE(r.warnings.empty());
    }

    TEST_CASE("empirical fractions")
    {
        const auto sc = scenario(BoundaryPair::monolog(0.5, 1.0));
        const auto below = envelope_empirical(sc, GrowthFn([](double) { return 0.5; }), {2.0, 4.0}, 6.0, 40, 10000000, 3, 1);
        REQUIRE(below.q.size() == 2);
        CHECK(below.q[0].value == 1.0);
        CHECK(below.q[1].value == 1.0);

        const auto both = envelope_empirical(sc, std::vector<GrowthFn>{log_sq, exp_log_sq}, {5.0, 10.0}, 30.0, 100,
                                             100000000, 4, 1);
        REQUIRE(both.size() == 2);
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(both[1].q[j].value <= both[0].q[j].value);
        const auto single = envelope_empirical(sc, GrowthFn(log_sq), {5.0, 10.0}, 30.0, 100, 100000000, 4, 1);
        CHECK(single.q[1].value == both[0].q[1].value);
        CHECK_THROWS_AS(envelope_empirical(sc, GrowthFn(log_sq), {5.0, 40.0}, 30.0, 10, 1000, 4, 1), std::domain_error);
    }

    TEST_CASE("trend judgement")
    {
        EnvelopeEmpirical e;
        e.h = {5, 10, 20};
        e.q = {est(0.99, 0.003), est(0.985, 0.004), est(0.99, 0.003)};
        CHECK(envelope_trend(e, EnvelopeVerdict::InEnvelope).consistent);
        e.q = {est(0.99, 0.003), est(0.9, 0.01), est(0.99, 0.003)};
        CHECK_FALSE(envelope_trend(e, EnvelopeVerdict::InEnvelope).consistent);
        e.q = {est(0.97, 0.005), est(0.93, 0.008), est(0.9, 0.009)};
        CHECK(envelope_trend(e, EnvelopeVerdict::NotInEnvelope).consistent);
        e.q = {est(0.5, 0.05), est(0.8, 0.04), est(0.99, 0.01)};
        CHECK_FALSE(envelope_trend(e, EnvelopeVerdict::NotInEnvelope).consistent);
        CHECK_FALSE(envelope_trend(e, EnvelopeVerdict::Indeterminate).consistent);
    }
}
