#include <doctest.h>

#include "csl/bounds.hpp"
#include "csl/ks.hpp"
#include "csl/quadrature.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

using namespace csl;

TEST_SUITE("bounds")
{
    TEST_CASE("Chernoff bound closed form")
    {
        const auto m = SubordinatorModel::stable(0.5, 1.0);
        const auto b = chernoff_bound(m, 1.0, 2.0, 10.0, 0.1);
        const double lambda = std::log(10.0) / 10.0;
        const double m2 = 2.0 * std::sqrt(2.0) / std::sqrt(std::numbers::pi);
        CHECK(b.lambda == doctest::Approx(lambda));
        CHECK(b.m_A == doctest::Approx(m2));
        CHECK(b.bound == doctest::Approx(std::exp(lambda * std::exp(2.0 * lambda) * m2) * 0.1).epsilon(1e-12));
        CHECK(b.bound == doctest::Approx(0.179).epsilon(0.01));
        // with the constant set to c_hat the displayed shape is the proof bound itself
        CHECK(b.keyeqn_form == doctest::Approx(b.bound).epsilon(1e-12));
        CHECK(b.c_hat == doctest::Approx(2.0));
        CHECK(b.drift_factor == 1.0);

        CHECK(chernoff_bound(m, 1.0, 2.0, 10.0, 1.0 - 1e-12).bound == doctest::Approx(1.0).epsilon(1e-9));
        const auto drifted = chernoff_bound(SubordinatorModel::stable(0.5, 1.0, 0.5), 1.0, 2.0, 10.0, 0.1);
        CHECK(drifted.bound == doctest::Approx(b.bound * std::exp(lambda * 0.5)));
    }

    TEST_CASE("Chernoff bound preconditions")
    {
        const auto m = SubordinatorModel::stable(0.5, 1.0);
        CHECK_THROWS_AS(chernoff_bound(m, 1.0, 1.0, 10.0, 0.1), std::domain_error);
        CHECK_THROWS_AS(chernoff_bound(m, 1.0, 2.0, 0.0, 0.1), std::domain_error);
        CHECK_THROWS_AS(chernoff_bound(m, 1.0, 2.0, 10.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(chernoff_bound(m, 0.0, 2.0, 10.0, 0.5), std::domain_error);
        const auto heavy = SubordinatorModel::custom(0.0, [](double x) { return 1.0 / x; });
        CHECK_THROWS_AS(chernoff_bound(heavy, 1.0, 2.0, 10.0, 0.5), NumericError);
    }

    TEST_CASE("Chernoff bound monotonicity")
    {
        const auto m = SubordinatorModel::stable(0.7, 1.3);
        for (double t : {0.3, 1.0, 4.0})
            for (double A : {1.2, 2.0, 5.0})
                for (double B : {1.0, 5.0, 30.0})
                {
                    const double b = chernoff_bound(m, t, A, B, 0.2).bound;
                    CHECK(chernoff_bound(m, t, A, 1.1 * B, 0.2).bound <= b);
                    CHECK(chernoff_bound(m, t, 1.1 * A, B, 0.2).bound >= b);
                    CHECK(chernoff_bound(m, 1.1 * t, A, B, 0.2).bound >= b);
                }
    }

    TEST_CASE("empirical domination on a small grid")
    {
        const auto m = SubordinatorModel::stable(0.5, 1.0);
        const auto cells = chernoff_domination_grid(m, {1.0, 2.0}, {3.0, 6.0}, {5.0, 10.0}, 0.1, 20000, 1e-2, 1, 2);
        REQUIRE(cells.size() == 8);
        for (const auto &c : cells)
            CHECK_FALSE(c.violation);
        // a truncated path never exceeds drift t + (count) A, so B above that is never reached
        CHECK(truncated_exceedance(m, 0.01, 1.5, 100.0, 1000, 1e-2, 2, 1).value == 0.0);
    }

    TEST_CASE("Kolmogorov distribution and KS statistics")
    {
        CHECK(kolmogorov_q(1.36) == doctest::Approx(0.0494).epsilon(0.01));
        CHECK(kolmogorov_q(1.63) == doctest::Approx(0.0098).epsilon(0.02));
        CHECK(kolmogorov_q(0.0) == 1.0);
        std::vector<double> grid;
        for (int i = 0; i < 1000; ++i)
            grid.push_back((i + 0.5) / 1000.0);
        const auto r = ks_one_sample(grid, [](double x) { return x; });
        CHECK(r.statistic == doctest::Approx(0.0005));
        CHECK(r.p_value == doctest::Approx(1.0));
        CHECK(ks_two_sample(grid, grid).statistic == 0.0);
        std::vector<double> shifted;
        for (double x : grid)
            shifted.push_back(x + 0.2);
        CHECK(ks_two_sample(grid, shifted).statistic == doctest::Approx(0.2).epsilon(0.01));
        CHECK(ks_two_sample(grid, shifted).p_value < 1e-10);
    }

    TEST_CASE("distribution laws")
    {
        const auto m = SubordinatorModel::stable(0.5, 1.0);
        LawTestParams p;
        p.n = 100000;
        const auto rows = distribution_law_tests(m, p, 11, 2);
        REQUIRE(rows.size() == 5);
        for (const auto &r : rows)
        {
            INFO(r.check << " p = " << r.p_value);
            CHECK(r.verdict == Verdict::Pass);
        }
        CHECK(rows[4].params.at("reference").get<double>() == doctest::Approx(std::erfc(0.5)).epsilon(1e-9));
        CHECK_THROWS_AS(distribution_law_tests(SubordinatorModel::custom(0.0, [](double x) { return 1.0 / std::sqrt(x); }), p, 1, 1),
                        std::domain_error);
    }

    TEST_CASE("lemma 1.1 on f = t^2")
    {
        const auto sq = BoundaryPair::monomial(2.0);
        const auto r = lemma_1_1_check(sq, 2.0, 1.0, 4.0);
        CHECK(r.verdict == Verdict::Pass);
        CHECK(r.params.at("t0").get<double>() == doctest::Approx(64.0));
        CHECK(r.statistic == doctest::Approx(std::sqrt(65.0) - 2.0 - 6.0).epsilon(1e-9));
        CHECK_THROWS_AS(lemma_1_1_check(sq, 2.0, 1.0, 3.0), std::domain_error);
        CHECK_THROWS_AS(lemma_1_1_check(sq, 0.5, 1.0, 4.0), std::domain_error);
    }

    TEST_CASE("lemma 1fyh and lemma 4")
    {
        CrossingScenario sc{SubordinatorModel::stable(0.5, 1.0), BoundaryPair::monomial(0.25), std::nullopt, {}};
        sc.sim.cutoff = 1e-2;
        const auto r = lemma_1fyh_check(sc, 16.0, 1.0, 4.0, 20000, 3, 1);
        CHECK(r.verdict == Verdict::Pass);
        CHECK(r.statistic > 0.0);
        const auto vac = lemma_1fyh_check(sc, 16.0, 3.0, 4.0, 20000, 3, 1);
        CHECK(vac.verdict == Verdict::Pass);
        CHECK(vac.note.find("vacuous") != std::string::npos);

        const auto l4 = lemma4_ratio(sc.model, sc.boundary, 16.0, 1.0, 4.0, {1e3, 1e4, 1e5, 1e6});
        CHECK(l4.verdict == Verdict::Pass);
        CHECK(std::isfinite(l4.statistic));
        CHECK_THROWS_AS(lemma4_ratio(sc.model, sc.boundary, 16.0, 1.0, 4.0, {1e3}), std::domain_error);

        write_checks_csv({r, l4}, "checks_unit.csv");
        std::ifstream in("checks_unit.csv");
        std::string header;
        std::string row;
        std::getline(in, header);
        std::getline(in, row);
        CHECK(header == "check,param_json,statistic,p_value,verdict");
        CHECK(row.rfind("lemma_1fyh,\"{\"\"A\"\":4.0,", 0) == 0);
    }
}
