#include "csl/envelope.hpp"

#include "csl/quadrature.hpp"
#include "csl/regularity.hpp"
#include "csl/transience.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace csl
{
    std::string to_string(EnvelopeVerdict v)
    {
        switch (v)
        {
        case EnvelopeVerdict::InEnvelope:
            return "InEnvelope";
        case EnvelopeVerdict::NotInEnvelope:
            return "NotInEnvelope";
        case EnvelopeVerdict::Indeterminate:
            return "Indeterminate";
        }
        return "Indeterminate";
    }

    namespace
    {
        constexpr double kInf = std::numeric_limits<double>::infinity();

        double tail_of_g_integral(const SubordinatorModel &model, const BoundaryPair &boundary, double a, double b)
        {
            if (!(b > a))
                return 0.0;
            if (!std::isfinite(b))
                return kInf;
            return integrate_log([&](double s) { return model.tail(boundary.g(s)); }, a, b);
        }

        double upper_limit(const BoundaryPair &boundary, double h, double w_h)
        {
            const double x = w_h * boundary.g(h);
            return std::isfinite(x) ? boundary.f(x) : kInf;
        }
    } // namespace

    double envelope_integral(const SubordinatorModel &model, const BoundaryPair &boundary, double h, double w_h)
    {
        if (!(h > boundary.f0()))
            throw std::domain_error("envelope_integral: h must exceed f(0)");
        return tail_of_g_integral(model, boundary, h, upper_limit(boundary, h, w_h));
    }

    std::pair<double, double> envelope_additivity(const SubordinatorModel &model, const BoundaryPair &boundary,
                                                  double h, double w_h)
    {
        const double j1 = envelope_integral(model, boundary, h, w_h);
        const double j2 = envelope_integral(model, boundary, h, 2.0 * w_h);
        const double lo = std::max(h, upper_limit(boundary, h, w_h));
        const double hi = upper_limit(boundary, h, 2.0 * w_h);
        return {j2 - j1, tail_of_g_integral(model, boundary, lo, hi)};
    }

    EnvelopeResult envelope_criterion(const CrossingScenario &scenario, const GrowthFn &w,
                                      const std::vector<double> &h_grid, const EnvelopeOptions &options)
    {
        if (h_grid.size() < static_cast<std::size_t>(options.tail_points) || options.tail_points < 2)
            throw std::domain_error("envelope_criterion: grid shorter than the judged tail");
        if (!std::is_sorted(h_grid.begin(), h_grid.end()))
            throw std::domain_error("envelope_criterion: h grid must be increasing");
        for (std::size_t i = 1; i < h_grid.size(); ++i)
        {
            if (!(w(h_grid[i]) > w(h_grid[i - 1])))
                throw std::domain_error("envelope_criterion: w must increase to infinity (not increasing on the grid)");
        }
        if (!(w(h_grid.back()) >= 2.0 * w(h_grid.front())))
            throw std::domain_error("envelope_criterion: w must increase to infinity (grows too little on the grid)");

        EnvelopeResult out;
        const auto &model = scenario.model;
        const auto &boundary = scenario.boundary;
        try
        {
            if (classify_transience(model, boundary).verdict != Transience::Recurrent)
                out.warnings.push_back("scenario is not classified Recurrent; the criterion assumes I(f) = inf");
        }
        catch (const std::exception &e)
        {
            out.warnings.push_back(std::string("transience classification failed: ") + e.what());
        }
        try
        {
            RegularityOptions ro;
            ro.beta = admissible_beta(model);
            if (validate_regularity(model, boundary, RegularityCase::CaseI, ro).overall() != Verdict::Pass)
                out.warnings.push_back("case (i) not validated; criterion applied as evidence only");
        }
        catch (const std::exception &e)
        {
            out.warnings.push_back(std::string("regularity check failed: ") + e.what());
        }

        for (double h : h_grid)
        {
            EnvelopePoint p;
            p.h = h;
            p.upper = upper_limit(boundary, h, w(h));
            p.J = envelope_integral(model, boundary, h, w(h));
            if (!std::isfinite(p.J))
                p.component = "infinite";
            else if (out.points.empty())
                p.component = "first";
            else if (p.J < out.points.back().J)
                p.component = "decreasing";
            else if (p.J > out.points.back().J)
                p.component = "increasing";
            else
                p.component = "flat";
            out.points.push_back(p);
        }

        const std::size_t k = static_cast<std::size_t>(options.tail_points);
        const std::size_t from = out.points.size() - k;
        bool decreasing = true;
        bool nondecreasing = true;
        bool infinite = false;
        for (std::size_t i = from; i < out.points.size(); ++i)
        {
            infinite = infinite || !std::isfinite(out.points[i].J);
            if (i > from)
            {
                if (!(out.points[i].J < out.points[i - 1].J))
                    decreasing = false;
                if (!(out.points[i].J >= out.points[i - 1].J))
                    nondecreasing = false;
            }
        }
        const double last = out.points.back().J;
        if (infinite)
        {
            out.verdict = EnvelopeVerdict::NotInEnvelope;
            out.reason = "J(h) is infinite on the judged tail";
        }
        else if (decreasing && last < options.tol)
        {
            out.verdict = EnvelopeVerdict::InEnvelope;
            out.reason = "J strictly decreasing over the final points, final J below tolerance";
        }
        else if (nondecreasing)
        {
            out.verdict = EnvelopeVerdict::NotInEnvelope;
            out.reason = "J nondecreasing over the final points";
        }
        else
        {
            out.verdict = EnvelopeVerdict::Indeterminate;
            out.reason = decreasing ? "J decreasing but final J above tolerance" : "J not monotone on the final points";
        }
        return out;
    }

    void write_envelope_csv(const EnvelopeResult &result, const std::string &file)
    {
        std::ofstream out(file, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot open " + file);
        out << "h,J,verdict_component\n";
        for (const auto &p : result.points)
            out << format_double(p.h) << ',' << format_double(p.J) << ',' << p.component << '\n';
    }

    std::vector<EnvelopeEmpirical> envelope_empirical(const CrossingScenario &scenario, const std::vector<GrowthFn> &ws,
                                                      const std::vector<double> &h_values, double T,
                                                      std::size_t n_accept, std::size_t max_attempts,
                                                      std::uint64_t seed, unsigned workers)
    {
        if (!std::is_sorted(h_values.begin(), h_values.end()) || h_values.empty())
            throw std::domain_error("envelope_empirical: h values must be increasing");
        if (!(h_values.back() < T) || !(h_values.front() > 0.0))
            throw std::domain_error("envelope_empirical: need 0 < h < T");
        PathProbe probe;
        probe.checkpoints = h_values;
        const auto draws = conditioned_outcomes(scenario, T, n_accept, max_attempts, seed, workers, probe);
        std::vector<EnvelopeEmpirical> results;
        for (const auto &w : ws)
        {
            EnvelopeEmpirical out;
            out.h = h_values;
            out.accepted = draws.accepted.size();
            out.attempts = draws.attempts;
            out.partial = draws.partial;
            if (!draws.accepted.empty())
            {
                for (std::size_t j = 0; j < h_values.size(); ++j)
                {
                    const double level = w(h_values[j]) * scenario.boundary.g(h_values[j]);
                    std::size_t k = 0;
                    for (const auto &o : draws.accepted)
                    {
                        if (o.checkpoint_values[j] >= level)
                            ++k;
                    }
                    out.q.push_back(proportion_estimate(k, draws.accepted.size(), hash_combine(seed, n_accept)));
                }
            }
            results.push_back(std::move(out));
        }
        return results;
    }

    EnvelopeEmpirical envelope_empirical(const CrossingScenario &scenario, const GrowthFn &w,
                                         const std::vector<double> &h_values, double T, std::size_t n_accept,
                                         std::size_t max_attempts, std::uint64_t seed, unsigned workers)
    {
        return envelope_empirical(scenario, std::vector<GrowthFn>{w}, h_values, T, n_accept, max_attempts, seed,
                                  workers)
            .front();
    }

    void write_envelope_empirical_csv(const EnvelopeEmpirical &result, const std::string &file)
    {
        std::ofstream out(file, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot open " + file);
        out << "h,q_hat,se\n";
        for (std::size_t i = 0; i < result.q.size(); ++i)
        {
            out << format_double(result.h[i]) << ',' << format_double(result.q[i].value) << ','
                << format_double(result.q[i].std_error) << '\n';
        }
    }

    EnvelopeTrend envelope_trend(const EnvelopeEmpirical &result, EnvelopeVerdict verdict, double z)
    {
        EnvelopeTrend out;
        const auto &q = result.q;
        if (q.size() < 2)
        {
            out.description = "fewer than two estimates";
            return out;
        }
        auto combined = [&](std::size_t i, std::size_t j) {
            return std::hypot(q[i].std_error, q[j].std_error);
        };
        if (verdict == EnvelopeVerdict::InEnvelope)
        {
            out.consistent = true;
            for (std::size_t i = 1; i < q.size(); ++i)
            {
                if (q[i].value < q[i - 1].value - z * combined(i - 1, i))
                    out.consistent = false;
            }
            out.description = out.consistent ? "nondecreasing in h within CI" : "drops in h beyond CI";
        }
        else if (verdict == EnvelopeVerdict::NotInEnvelope)
        {
            const auto &last = q.back();
            const bool away = last.value + z * last.std_error < 1.0;
            const bool not_rising = last.value <= q.front().value + z * combined(0, q.size() - 1);
            out.consistent = away && not_rising;
            out.description = std::string(away ? "bounded away from 1" : "not bounded away from 1") +
                              (not_rising ? ", not rising" : ", rising");
        }
        else
        {
            out.description = "criterion indeterminate";
        }
        return out;
    }
} // namespace csl
