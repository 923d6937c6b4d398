#include <doctest.h>

#include "csl/crossing.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

using namespace csl;

namespace
{
    CrossingScenario reference(double horizon)
    {
        CrossingScenario sc{SubordinatorModel::stable(0.5, 1.0), BoundaryPair::monomial(0.25), std::nullopt, {}};
        sc.sim.cutoff = 1e-2;
        sc.sim.horizon = horizon;
        return sc;
    }

    struct GridVerdict
    {
        bool early = false;          ///< a grid violation strictly before sigma
        double first = kNoViolation; ///< first grid time with X < level
    };

    // Independent checker: walks a uniform grid and compares X with the boundary curve itself.
    GridVerdict grid_check(const SamplePath &p, const Barrier &b, double horizon, double step, double sigma)
    {
        GridVerdict out;
        std::size_t k = 0;
        double jumps = 0.0;
        const auto n = static_cast<std::size_t>(std::llround(horizon / step));
        for (std::size_t i = 0; i <= n; ++i)
        {
            const double s = static_cast<double>(i) * step;
            while (k < p.jumps.size() && p.jumps[k].time <= s)
                jumps += p.jumps[k++].size;
            const double x = p.drift_slope * s + jumps;
            if (x < b.level(s))
            {
                out.first = s;
                out.early = s < sigma - 1e-9;
                return out;
            }
        }
        return out;
    }
} // namespace

TEST_SUITE("crossing")
{
    TEST_CASE("hand example: sigma = f(0)")
    {
        const auto lin = BoundaryPair::monomial(1.0);
        SamplePath p;
        p.horizon = 5.0;
        p.jumps = {{2.0, 10.0}};
        CHECK(violation_time(p, Barrier(lin), 5.0) == doctest::Approx(0.5).epsilon(1e-9));
        p.jumps = {{0.3, 10.0}};
        CHECK(violation_time(p, Barrier(lin), 5.0) == kNoViolation);
        p.horizon = 20.0;
        CHECK(violation_time(p, Barrier(lin), 20.0) == doctest::Approx(10.0).epsilon(1e-9));
    }

    TEST_CASE("drift catching a boundary")
    {
        // X_s = s + 0.2 against g(s) = s^2: violation at (1 + sqrt(1.8)) / 2
        SamplePath p;
        p.horizon = 5.0;
        p.drift_slope = 1.0;
        p.jumps = {{0.01, 0.2}};
        CHECK(violation_time(p, Barrier(BoundaryPair::monomial(0.5)), 5.0) ==
              doctest::Approx((1.0 + std::sqrt(1.8)) / 2.0).epsilon(1e-9));
    }

    TEST_CASE("no violation while g = 0")
    {
        const auto sc = reference(0.45);
        for (std::uint64_t i = 0; i < 200; ++i)
        {
            const auto p = sample_path(sc.model, 0.45, 1e-2, std::nullopt, RngStream{8, i});
            REQUIRE(violation_time(p, sc.barrier(), 0.45) == kNoViolation);
        }
    }

    TEST_CASE("interval logic agrees with a dense grid")
    {
        const auto sc = reference(2.0);
        const double step = 1e-4;
        for (const auto shift : {std::optional<Shift>{}, std::optional<Shift>{Shift{3.0, 1.0}}})
        {
            const Barrier b(sc.boundary, shift);
            int finite = 0;
            for (std::uint64_t i = 0; i < 1000; ++i)
            {
                const auto p = sample_path(sc.model, 2.0, 1e-2, std::nullopt, RngStream{21, i});
                const double sigma = violation_time(p, b, 2.0);
                const auto g = grid_check(p, b, 2.0, step, sigma);
                REQUIRE_FALSE(g.early);
                if (sigma == kNoViolation)
                {
                    CHECK(g.first == kNoViolation);
                    continue;
                }
                ++finite;
                // the first grid point at or after sigma is violated unless a jump lands in between
                const double next = std::ceil(sigma / step - 1e-9) * step;
                bool rescued = false;
                for (const auto &j : p.jumps)
                    rescued = rescued || (j.time > sigma && j.time <= next + 1e-12);
                if (!rescued && next <= 2.0)
                    CHECK(g.first == doctest::Approx(next).epsilon(1e-9));
            }
            CHECK(finite > 100);
        }
    }

    TEST_CASE("sigma sample estimators")
    {
        const auto sc = reference(30.0);
        const auto s = sample_sigmas(sc, 20000, 4, 2);
        CHECK(s.survival(0.4).value == 1.0);
        CHECK(s.survival(0.4).std_error == 0.0);
        double prev_p = 1.0;
        double prev_phi = 0.0;
        for (double u = 0.25; u <= 30.0; u *= 1.2)
        {
            const auto p = s.survival(u);
            const auto phi = s.phi(u);
            CHECK(p.value <= prev_p);
            CHECK(phi.value >= prev_phi);
            CHECK(phi.value <= u);
            prev_p = p.value;
            prev_phi = phi.value;
        }
        // Phi(t) = int_0^t P(O_u) du: trapezoid over a fine grid of the survival curve
        double trap = 0.0;
        const double du = 1e-3;
        for (double u = 0.0; u < 10.0 - 1e-12; u += du)
            trap += 0.5 * du * (s.survival(u).value + s.survival(u + du).value);
        CHECK(s.phi(10.0).value == doctest::Approx(trap).epsilon(1e-3));

        const auto points = estimate_crossing(sc, {1.0, 5.0}, 20000, 4, 1);
        CHECK(points[0].p_o.value == s.survival(1.0).value);
        CHECK(points[1].phi.value == s.phi(5.0).value);
    }

    TEST_CASE("shift monotonicity in y")
    {
        const auto sc = reference(20.0);
        const auto lo = sample_sigmas(sc.with_shift(Shift{20.0, 2.0}), 20000, 6, 1);
        const auto hi = sample_sigmas(sc.with_shift(Shift{60.0, 2.0}), 20000, 6, 1);
        for (double u : {1.0, 5.0, 10.0, 18.0})
        {
            const auto a = lo.survival(u);
            const auto b = hi.survival(u);
            CHECK(a.value <= b.value + 3.0 * std::hypot(a.std_error, b.std_error));
        }
    }

    TEST_CASE("asymptotic diagnostics")
    {
        const auto sc = reference(80.0);
        const auto s = sample_sigmas(sc, 200000, 10, 1);
        const auto d = asymptotic_diagnostics(sc, s, {10.0, 20.0, 40.0});
        REQUIRE(d.rows.size() == 3);
        CHECK(d.warnings.empty());
        for (const auto &r : d.rows)
        {
            CHECK(r.tail_g == doctest::Approx(sc.model.tail(sc.boundary.g(r.t))));
            CHECK(r.ratio == doctest::Approx(r.p_o.value / (r.tail_g * r.phi.value)));
            CHECK(r.phi_recon / r.phi.value == doctest::Approx(1.0).epsilon(0.1));
        }
        CHECK(d.rows[0].ratio == doctest::Approx(1.0).epsilon(0.15));
        CHECK_THROWS_AS(asymptotic_diagnostics(sc, s, {0.3, 10.0}), std::domain_error);
        CHECK_THROWS_AS(asymptotic_diagnostics(sc, s, {10.0, 200.0}), std::domain_error);

        const std::string file = "crossing_unit.csv";
        write_crossing_csv(d, file);
        std::ifstream in(file);
        std::string header;
        std::getline(in, header);
        CHECK(header == "t,p_o,p_o_se,phi,phi_se,tail_g,rho,ratio,phi_recon");
    }

    TEST_CASE("results do not depend on the worker count")
    {
        const auto sc = reference(10.0);
        const auto a = sample_sigmas(sc, 5000, 12, 1);
        const auto b = sample_sigmas(sc, 5000, 12, 5);
        CHECK(a.sorted() == b.sorted());
    }
}
