#include <doctest.h>

#include "csl/ks.hpp"
#include "csl/parallel.hpp"
#include "csl/path.hpp"
#include "csl/rng.hpp"
#include "csl/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace csl;

TEST_SUITE("path_sim")
{
    TEST_CASE("rng streams")
    {
        Rng a = RngStream{42, 7}.make();
        Rng b = RngStream{42, 7}.make();
        Rng c = RngStream{42, 8}.make();
        bool differs = false;
        for (int i = 0; i < 100; ++i)
        {
            const double u = a.uniform();
            CHECK(u == b.uniform());
            CHECK(u > 0.0);
            CHECK(u < 1.0);
            differs = differs || u != c.uniform();
        }
        CHECK(differs);
        CHECK(derive_seed(1, "doob") != derive_seed(1, "qh"));
        CHECK(derive_seed(1, "doob") == derive_seed(1, "doob"));

        double sum = 0.0;
        for (int i = 0; i < 100000; ++i)
            sum += a.exponential();
        CHECK(sum / 1e5 == doctest::Approx(1.0).epsilon(0.02));
    }

    TEST_CASE("parallel_map does not depend on the worker count")
    {
        auto fn = [](std::size_t i) {
            Rng r = RngStream{3, i}.make();
            return r.uniform();
        };
        const auto one = parallel_map<double>(1001, 1, fn);
        const auto many = parallel_map<double>(1001, 7, fn);
        CHECK(one == many);
        CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                            if (i == 5)
                                throw std::runtime_error("boom");
                        }),
                        std::runtime_error);
    }

    TEST_CASE("mean jump count matches Pibar(eps) T")
    {
        const auto m = SubordinatorModel::stable(0.5, 1.0);
        const double eps = 1e-4;
        const double rate = m.tail(eps);
        CHECK(rate == doctest::Approx(100.0 / std::sqrt(std::numbers::pi)));
        const std::size_t n = 20000;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            total += static_cast<double>(sample_path(m, 1.0, eps, std::nullopt, RngStream{5, i}).jumps.size());
        const double se = std::sqrt(rate / static_cast<double>(n));
        CHECK(std::abs(total / static_cast<double>(n) - 56.4189) < 4.0 * se);
    }

    TEST_CASE("truncated paths and the size cap")
    {
        const auto m = SubordinatorModel::stable(0.5, 1.0);
        for (std::uint64_t i = 0; i < 200; ++i)
        {
            const auto p = sample_path(m, 30.0, 1e-2, 0.7, RngStream{9, i});
            for (const auto &j : p.jumps)
            {
                REQUIRE(j.size > 1e-2);
                REQUIRE(j.size <= 0.7);
            }
            CHECK(path_value(p, 30.0) <= p.drift_slope * 30.0 + 0.7 * static_cast<double>(p.jumps.size()) + 1e-9);
        }
        const JumpLaw law(m, 1e-2, 0.7);
        CHECK(law.rate() == doctest::Approx(m.tail(1e-2) - m.tail(0.7)));
        CHECK(law.drift_slope() == doctest::Approx(m.small_jump_mean(1e-2)));
    }

    TEST_CASE("identical stream gives identical path")
    {
        const auto m = SubordinatorModel::stable(0.5, 1.0);
        const auto a = sample_path(m, 50.0, 1e-3, std::nullopt, RngStream{77, 12});
        const auto b = sample_path(m, 50.0, 1e-3, std::nullopt, RngStream{77, 12});
        REQUIRE(a.jumps.size() == b.jumps.size());
        for (std::size_t i = 0; i < a.jumps.size(); ++i)
        {
            CHECK(a.jumps[i].time == b.jumps[i].time);
            CHECK(a.jumps[i].size == b.jumps[i].size);
        }
    }

    TEST_CASE("path_value")
    {
        SamplePath p;
        p.horizon = 5.0;
        p.jumps = {{1.0, 5.0}};
        CHECK(path_value(p, 0.0) == 0.0);
        CHECK(path_value(p, 1.0) == 5.0);
        CHECK(path_value(p, 0.999) == 0.0);
        SamplePath q;
        q.horizon = 5.0;
        q.drift_slope = 2.0;
        CHECK(path_value(q, 3.0) == 6.0);
        CHECK_THROWS_AS(path_value(q, 5.5), std::domain_error);
        CHECK_THROWS_AS(path_value(q, -0.1), std::domain_error);

        const auto m = SubordinatorModel::stable(0.5, 1.0);
        const auto r = sample_path(m, 10.0, 1e-2, std::nullopt, RngStream{1, 1});
        double prev = 0.0;
        for (double t = 0.0; t <= 10.0; t += 0.01)
        {
            const double v = path_value(r, t);
            REQUIRE(v >= prev);
            prev = v;
        }
    }

    TEST_CASE("first_big_jump")
    {
        SamplePath p;
        p.horizon = 5.0;
        p.cutoff = 0.01;
        p.jumps = {{1.0, 0.5}, {2.0, 3.0}, {3.0, 4.0}};
        CHECK_FALSE(first_big_jump(p, 10.0).has_value());
        const auto j = first_big_jump(p, 1.0);
        REQUIRE(j.has_value());
        CHECK(j->time == 2.0);
        CHECK(j->size == 3.0);
        CHECK_THROWS_AS(first_big_jump(p, 0.005), std::domain_error);
    }

    TEST_CASE("path CSV")
    {
        SamplePath p;
        p.horizon = 5.0;
        p.drift_slope = 1.0;
        p.jumps = {{1.0, 0.5}, {2.5, 0.25}};
        std::ostringstream out;
        write_path_csv(p, out);
        CHECK(out.str() == "t,jump_size,cum_value\n1,0.5,1.5\n2.5,0.25,3.25\n");
        CHECK(format_double(0.1) == "0.10000000000000001");
    }

    TEST_CASE("Kanter sampler against the Levy distribution")
    {
        Rng rng(2024);
        const std::size_t n = 100000;
        std::size_t below = 0;
        for (std::size_t i = 0; i < n; ++i)
            below += sample_stable_value(0.5, 1.0, 1.0, rng) <= 1.0 ? 1 : 0;
        const double p = std::erfc(0.5);
        CHECK(p == doctest::Approx(0.4795).epsilon(1e-4));
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
        CHECK(std::abs(static_cast<double>(below) / static_cast<double>(n) - p) < 3.0 * se);
    }

    TEST_CASE("transition CDF and density by quadrature")
    {
        const StableParams p{0.5, 1.0};
        for (double x : {0.05, 0.3, 1.0, 4.0, 50.0})
        {
            // Levy law: F(x) = erfc(1/(2 sqrt x)), density x^{-3/2} e^{-1/(4x)} / (2 sqrt pi)
            CHECK(stable_transition_cdf(p, 1.0, x) == doctest::Approx(std::erfc(0.5 / std::sqrt(x))).epsilon(1e-8));
            const double dens = std::pow(x, -1.5) * std::exp(-0.25 / x) / (2.0 * std::sqrt(std::numbers::pi));
            CHECK(stable_transition_density(p, 1.0, x) == doctest::Approx(dens).epsilon(1e-7));
        }
        // scaling: X_t has the law of t^{1/alpha} X_1
        CHECK(stable_transition_cdf(p, 3.0, 2.0) == doctest::Approx(stable_transition_cdf(p, 1.0, 2.0 / 9.0)).epsilon(1e-9));
        CHECK(stable_transition_cdf({0.3, 1.0}, 1.0, 1e-30) == doctest::Approx(0.0).epsilon(1e-12));
    }

    TEST_CASE("scaling and small-time limit of the exact sampler")
    {
        Rng r1(1);
        Rng r2(2);
        std::vector<double> a;
        std::vector<double> b;
        for (int i = 0; i < 100000; ++i)
        {
            a.push_back(sample_stable_value(0.5, 1.0, 1.0, r1));
            b.push_back(sample_stable_value(0.5, 1.0, 4.0, r2) / 16.0);
        }
        CHECK(ks_two_sample(a, b).p_value > 0.01);

        std::vector<double> small;
        for (int i = 0; i < 1001; ++i)
            small.push_back(sample_stable_value(0.5, 1.0, 1e-5, r1));
        std::nth_element(small.begin(), small.begin() + 500, small.end());
        CHECK(small[500] <= 1e-6);
    }

    TEST_CASE("compound-Poisson approximation approaches the exact law as eps shrinks")
    {
        const auto m = SubordinatorModel::stable(0.5, 1.0);
        const std::size_t n = 20000;
        std::vector<double> exact;
        Rng rng(99);
        for (std::size_t i = 0; i < n; ++i)
            exact.push_back(sample_stable_value(0.5, 1.0, 1.0, rng));
        auto distance = [&](double eps) {
            std::vector<double> approx;
            for (std::size_t i = 0; i < n; ++i)
                approx.push_back(path_value(sample_path(m, 1.0, eps, std::nullopt, RngStream{123, i}), 1.0));
            return ks_two_sample(exact, approx).statistic;
        };
        const double coarse = distance(0.3);
        const double fine = distance(1e-3);
        CHECK(fine < coarse);
        CHECK(fine < 0.03);
    }
}
