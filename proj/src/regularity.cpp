#include "csl/regularity.hpp"

#include "csl/stable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace csl
{
    std::string to_string(RegularityCase c)
    {
        switch (c)
        {
        case RegularityCase::CaseI:
            return "CaseI";
        case RegularityCase::CaseIA:
            return "CaseIA";
        case RegularityCase::CaseII:
            return "CaseII";
        }
        return "CaseI";
    }

    std::string to_string(Verdict v)
    {
        switch (v)
        {
        case Verdict::Pass:
            return "pass";
        case Verdict::Fail:
            return "fail";
        case Verdict::Indeterminate:
            return "indeterminate";
        }
        return "indeterminate";
    }

    Verdict RegularityReport::overall() const
    {
        bool all_pass = true;
        for (const auto &c : checks)
        {
            if (c.verdict == Verdict::Fail)
                return Verdict::Fail;
            if (c.verdict != Verdict::Pass)
                all_pass = false;
        }
        return all_pass ? Verdict::Pass : Verdict::Indeterminate;
    }

    const ConditionCheck *RegularityReport::find(const std::string &name) const
    {
        for (const auto &c : checks)
        {
            if (c.name == name)
                return &c;
        }
        return nullptr;
    }

    namespace
    {
        std::vector<double> geometric_grid(double lo, double hi)
        {
            std::vector<double> out;
            for (double t = lo; t <= hi; t *= 2.0)
                out.push_back(t);
            return out;
        }

        double loglog_slope(const std::vector<std::pair<double, double>> &ev, std::size_t from)
        {
            const auto &a = ev[from];
            const auto &b = ev.back();
            if (!(a.second > 0.0) || !(b.second > 0.0))
                return std::numeric_limits<double>::quiet_NaN();
            return std::log(b.second / a.second) / std::log(b.first / a.first);
        }

        /// "Decreases to 0" judged on the last half of the grid: strictly monotone down
        /// is a pass, monotone up a fail, anything else indeterminate.
        ConditionCheck decreasing_to_zero(std::string name, std::vector<std::pair<double, double>> ev)
        {
            ConditionCheck c;
            c.name = std::move(name);
            if (ev.size() < 4)
            {
                c.detail = "grid too short";
                c.evidence = std::move(ev);
                return c;
            }
            const std::size_t from = ev.size() / 2;
            bool down = true;
            bool up = true;
            bool finite = true;
            for (std::size_t i = from + 1; i < ev.size(); ++i)
            {
                finite = finite && std::isfinite(ev[i].second);
                if (!(ev[i].second < ev[i - 1].second))
                    down = false;
                if (!(ev[i].second >= ev[i - 1].second))
                    up = false;
            }
            c.statistic = loglog_slope(ev, from);
            if (!finite)
                c.verdict = Verdict::Indeterminate;
            else if (down)
                c.verdict = Verdict::Pass;
            else if (up)
                c.verdict = Verdict::Fail;
            else
                c.verdict = Verdict::Indeterminate;
            std::ostringstream os;
            os << "last-half trend " << (down ? "decreasing" : up ? "nondecreasing" : "mixed") << ", log-log slope "
               << c.statistic << ", final value " << ev.back().second;
            c.detail = os.str();
            c.evidence = std::move(ev);
            return c;
        }

        ConditionCheck indeterminate(std::string name, std::string why)
        {
            ConditionCheck c;
            c.name = std::move(name);
            c.verdict = Verdict::Indeterminate;
            c.detail = std::move(why);
            return c;
        }

        double estimate_alpha(const SubordinatorModel &model, double x)
        {
            return -std::log2(model.tail(2.0 * x) / model.tail(x));
        }

        ConditionCheck check_regular_tail(const SubordinatorModel &model, const std::vector<double> &grid,
                                          double *alpha_out)
        {
            std::vector<std::pair<double, double>> ev;
            for (double x : grid)
                ev.emplace_back(x, estimate_alpha(model, x));
            const std::size_t from = ev.size() / 2;
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (std::size_t i = from; i < ev.size(); ++i)
            {
                lo = std::min(lo, ev[i].second);
                hi = std::max(hi, ev[i].second);
            }
            ConditionCheck c;
            c.name = "tail_regularly_varying";
            c.statistic = ev.back().second;
            *alpha_out = ev.back().second;
            if (!(std::isfinite(lo) && std::isfinite(hi)))
                c.verdict = Verdict::Indeterminate;
            else if (hi - lo < 0.05 && c.statistic > 0.0 && c.statistic < 1.0)
                c.verdict = Verdict::Pass;
            else if (hi - lo < 0.05)
                c.verdict = Verdict::Fail;
            else
                c.verdict = Verdict::Indeterminate;
            std::ostringstream os;
            os << "local index -log2(Pibar(2x)/Pibar(x)) ranges over [" << lo << ", " << hi
               << "] on the last half of the grid; index must be in (0,1)";
            c.detail = os.str();
            c.evidence = std::move(ev);
            return c;
        }

        ConditionCheck check_slowly_varying_part(const SubordinatorModel &model, const std::vector<double> &grid,
                                                 double alpha, double B, double N)
        {
            std::vector<std::pair<double, double>> ev;
            bool nondecreasing = true;
            double prev = -std::numeric_limits<double>::infinity();
            for (double x : grid)
            {
                if (x <= B)
                    continue;
                const double v = std::pow(x, N + alpha) * model.tail(x);
                ev.emplace_back(x, v);
                if (v < prev * (1.0 - 1e-9))
                    nondecreasing = false;
                prev = v;
            }
            ConditionCheck c;
            c.name = "power_times_slowly_varying_nondecreasing";
            c.verdict = nondecreasing ? Verdict::Pass : Verdict::Fail;
            c.statistic = ev.empty() ? 0.0 : loglog_slope(ev, 0);
            c.detail = "x^N L(x) with L(x) = Pibar(x) x^alpha on (B, inf)";
            c.evidence = std::move(ev);
            return c;
        }

        ConditionCheck check_o_regular(std::string name, const std::function<double(double)> &h,
                                       const std::vector<double> &grid)
        {
            std::vector<std::pair<double, double>> ev;
            double lo = std::numeric_limits<double>::infinity();
            double hi = 0.0;
            for (double t : grid)
            {
                const double r = h(2.0 * t) / h(t);
                ev.emplace_back(t, r);
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
            ConditionCheck c;
            c.name = std::move(name);
            c.statistic = hi;
            const bool ok = std::isfinite(hi) && lo > 0.0 && hi < 1e6;
            c.verdict = ok ? Verdict::Pass : Verdict::Fail;
            std::ostringstream os;
            os << "h(2t)/h(t) stays within [" << lo << ", " << hi << "]";
            c.detail = os.str();
            c.evidence = std::move(ev);
            return c;
        }
    } // namespace

    double admissible_beta(const SubordinatorModel &model)
    {
        const double a = estimate_alpha(model, 1e6);
        if (!(a > 0.0 && a < 1.0))
            throw std::domain_error("admissible_beta: tail index outside (0, 1)");
        return 0.5 * ((1.0 + 2.0 * a) / (2.0 * a + a * a) + 1.0 / a);
    }

    RegularityReport validate_regularity(const SubordinatorModel &model, const BoundaryPair &boundary,
                                         RegularityCase case_id, const RegularityOptions &options)
    {
        RegularityReport report;
        report.case_id = case_id;
        const auto grid = geometric_grid(options.t_start, options.t_end);

        if (case_id == RegularityCase::CaseI || case_id == RegularityCase::CaseIA)
        {
            double alpha = 0.0;
            report.checks.push_back(check_regular_tail(model, grid, &alpha));
            report.alpha_estimate = alpha;
            report.checks.push_back(check_slowly_varying_part(model, grid, alpha, options.B, options.N));

            if (boundary.has_fprime())
            {
                std::vector<std::pair<double, double>> ev;
                for (double t : grid)
                    ev.emplace_back(t, t * *boundary.fprime(t) * model.tail(t));
                report.checks.push_back(decreasing_to_zero("t_fprime_tail_decreasing", std::move(ev)));
            }
            else
            {
                report.checks.push_back(indeterminate("t_fprime_tail_decreasing", "no derivative f' supplied"));
            }

            {
                std::vector<std::pair<double, double>> ev;
                // t + shift must stay resolvable in double precision.
                for (double t : grid)
                {
                    if (t <= 1e8 * options.shift)
                        ev.emplace_back(t, std::abs(boundary.g(t + options.shift) / boundary.g(t) - 1.0));
                }
                auto c = decreasing_to_zero("g_shift_ratio_to_one", std::move(ev));
                c.detail = "|g(t+eps)/g(t) - 1|: " + c.detail;
                report.checks.push_back(std::move(c));
            }

            {
                const double beta_min = (1.0 + 2.0 * alpha) / (2.0 * alpha + alpha * alpha);
                std::vector<std::pair<double, double>> ev;
                for (double t : grid)
                {
                    const double arg = boundary.g(t) / std::pow(std::log(t), options.beta);
                    ev.emplace_back(t, arg > 0.0 ? t * model.tail(arg) : std::numeric_limits<double>::infinity());
                }
                auto c = decreasing_to_zero("log_scaled_boundary_condition", std::move(ev));
                std::ostringstream os;
                os << "beta=" << options.beta << " (needs beta > " << beta_min << "); " << c.detail;
                c.detail = os.str();
                if (!(options.beta > beta_min))
                    c.verdict = Verdict::Fail;
                report.checks.push_back(std::move(c));
            }
        }

        if (case_id == RegularityCase::CaseIA)
        {
            report.checks.push_back(
                check_o_regular("f_o_regularly_varying", [&](double t) { return boundary.f(t); }, grid));
            if (boundary.has_fprime())
            {
                report.checks.push_back(check_o_regular(
                    "fprime_o_regularly_varying", [&](double t) { return *boundary.fprime(t); }, grid));
            }
            else
            {
                report.checks.push_back(indeterminate("fprime_o_regularly_varying", "no derivative f' supplied"));
            }

            std::optional<TransitionDensity> density = options.transition_density;
            if (!density && model.stable_params())
            {
                const auto sp = *model.stable_params();
                density = [sp](double t, double x) { return stable_transition_density(sp, t, x); };
            }
            if (!density || !model.has_density())
            {
                report.checks.push_back(
                    indeterminate("transition_density_dominated", "needs transition and jump densities"));
            }
            else
            {
                ConditionCheck c;
                c.name = "transition_density_dominated";
                double worst = 0.0;
                for (int k = -2; k <= 6; ++k)
                {
                    const double t = std::pow(10.0, k);
                    const double base = boundary.g(t) + options.x0;
                    double row = 0.0;
                    for (double mult : {1.0, 2.0, 10.0, 100.0, 1e4})
                    {
                        const double x = base * mult;
                        const double r = (*density)(t, x) / (t * model.density(x));
                        row = std::max(row, r);
                    }
                    c.evidence.emplace_back(t, row);
                    worst = std::max(worst, row);
                }
                c.statistic = worst;
                c.verdict = worst <= options.domination_constant ? Verdict::Pass : Verdict::Fail;
                std::ostringstream os;
                os << "max f_t(x)/(t u(x)) over sampled (t, x >= g(t)+x0) = " << worst << " vs A="
                   << options.domination_constant;
                c.detail = os.str();
                report.checks.push_back(std::move(c));
            }
        }

        if (case_id == RegularityCase::CaseII)
        {
            {
                ConditionCheck c;
                c.name = "tail_crv";
                const double t = grid.back();
                double prev = std::numeric_limits<double>::infinity();
                bool shrinking = true;
                for (double delta : {0.1, 0.01, 0.001, 0.0001})
                {
                    const double dev = std::abs(model.tail((1.0 + delta) * t) / model.tail(t) - 1.0);
                    c.evidence.emplace_back(delta, dev);
                    if (!(dev < prev) && dev > 1e-12)
                        shrinking = false;
                    prev = dev;
                }
                c.statistic = prev;
                c.verdict = shrinking && prev < 1e-2 ? Verdict::Pass : Verdict::Fail;
                c.detail = "|Pibar(lambda t)/Pibar(t) - 1| as lambda -> 1 at the largest grid t";
                report.checks.push_back(std::move(c));
            }
            {
                ConditionCheck c;
                c.name = "tail_lower_index_above_minus_one";
                double lower = std::numeric_limits<double>::infinity();
                for (std::size_t i = grid.size() / 2; i < grid.size(); ++i)
                {
                    for (double lambda : {1.5, 2.0, 4.0, 10.0})
                    {
                        const double idx = std::log(model.tail(lambda * grid[i]) / model.tail(grid[i])) /
                                           std::log(lambda);
                        lower = std::min(lower, idx);
                    }
                    c.evidence.emplace_back(grid[i], lower);
                }
                c.statistic = lower;
                c.verdict = lower > -1.0 ? Verdict::Pass : Verdict::Fail;
                c.detail = "smallest log(Pibar(lambda x)/Pibar(x))/log(lambda) on the last half of the grid";
                report.checks.push_back(std::move(c));
            }
            {
                std::vector<std::pair<double, double>> ev;
                for (double t : grid)
                    ev.emplace_back(t, std::pow(t, 1.0 + options.case2_epsilon) * model.tail(std::max(1e-300, boundary.g(t))));
                report.checks.push_back(decreasing_to_zero("power_boundary_condition", std::move(ev)));
            }
        }
        return report;
    }
} // namespace csl
