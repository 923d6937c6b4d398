#include "csl/conditioning.hpp"

#include "csl/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace csl
{
    namespace
    {
        constexpr std::size_t kBatch = 16384;

        MonteCarloEstimate negative_binomial_rate(std::size_t k, std::size_t attempts, bool partial,
                                                  std::uint64_t fingerprint)
        {
            if (attempts == 0)
                throw std::domain_error("conditioned sampling: no attempts");
            if (partial || k < 2)
                return proportion_estimate(k, attempts, fingerprint);
            MonteCarloEstimate e;
            e.n = attempts;
            e.seed_fingerprint = fingerprint;
            e.value = static_cast<double>(k - 1) / static_cast<double>(attempts - 1);
            e.std_error = e.value * std::sqrt(std::max(0.0, 1.0 - e.value) / static_cast<double>(k));
            return e;
        }

        /// Standard error with zero counts floored at p = (k + 0.5)/(n + 1).
        double floored_se(std::size_t k, std::size_t n)
        {
            const double p = (static_cast<double>(k) + 0.5) / (static_cast<double>(n) + 1.0);
            return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
        }

        void require_unshifted(const CrossingScenario &scenario, const char *what)
        {
            if (scenario.shift)
                throw std::domain_error(std::string(what) + ": scenario must be unshifted");
        }
    } // namespace

    ConditionedDraws conditioned_outcomes(const CrossingScenario &scenario, double T, std::size_t n_accept,
                                          std::size_t max_attempts, std::uint64_t seed, unsigned workers,
                                          const PathProbe &probe)
    {
        require_unshifted(scenario, "sample_conditioned");
        if (!(T > 0.0))
            throw std::domain_error("sample_conditioned: T must be positive");
        if (n_accept == 0 || max_attempts == 0)
            throw std::domain_error("sample_conditioned: n_accept and max_attempts must be positive");
        const JumpLaw law = scenario.jump_law();
        const Barrier barrier = scenario.barrier();

        ConditionedDraws out;
        std::size_t attempts = 0;
        while (out.accepted.size() < n_accept && attempts < max_attempts)
        {
            const std::size_t m = std::min(kBatch, max_attempts - attempts);
            auto batch = parallel_map<PathOutcome>(m, workers, [&](std::size_t i) {
                Rng rng = RngStream{seed, attempts + i}.make();
                return simulate_violation(law, barrier, T, rng, &probe);
            });
            std::size_t used = m;
            for (std::size_t i = 0; i < m; ++i)
            {
                if (batch[i].sigma == kNoViolation)
                {
                    out.accepted.push_back(std::move(batch[i]));
                    if (out.accepted.size() == n_accept)
                    {
                        used = i + 1;
                        break;
                    }
                }
            }
            attempts += used;
        }
        out.attempts = attempts;
        out.partial = out.accepted.size() < n_accept;
        out.acceptance_rate = negative_binomial_rate(out.accepted.size(), attempts, out.partial, hash_combine(seed, n_accept));
        return out;
    }

    ConditionedSample sample_conditioned(const CrossingScenario &scenario, double T, std::size_t n_accept,
                                         std::size_t max_attempts, std::uint64_t seed, unsigned workers)
    {
        require_unshifted(scenario, "sample_conditioned");
        if (!(T > 0.0))
            throw std::domain_error("sample_conditioned: T must be positive");
        if (n_accept == 0 || max_attempts == 0)
            throw std::domain_error("sample_conditioned: n_accept and max_attempts must be positive");
        const JumpLaw law = scenario.jump_law();
        const Barrier barrier = scenario.barrier();

        ConditionedSample out;
        std::size_t attempts = 0;
        while (out.paths.size() < n_accept && attempts < max_attempts)
        {
            const std::size_t m = std::min(kBatch, max_attempts - attempts);
            auto batch = parallel_map<std::optional<SamplePath>>(m, workers, [&](std::size_t i) {
                Rng rng = RngStream{seed, attempts + i}.make();
                SamplePath p = sample_path(law, T, rng);
                if (violation_time(p, barrier, T) != kNoViolation)
                    return std::optional<SamplePath>();
                return std::optional<SamplePath>(std::move(p));
            });
            std::size_t used = m;
            for (std::size_t i = 0; i < m; ++i)
            {
                if (batch[i])
                {
                    out.paths.push_back(std::move(*batch[i]));
                    if (out.paths.size() == n_accept)
                    {
                        used = i + 1;
                        break;
                    }
                }
            }
            attempts += used;
        }
        out.attempts = attempts;
        out.partial = out.paths.size() < n_accept;
        out.acceptance_rate = negative_binomial_rate(out.paths.size(), attempts, out.partial, hash_combine(seed, n_accept));
        return out;
    }

    std::vector<double> log_edges(double lo, double hi, std::size_t bins)
    {
        if (!(lo > 0.0 && hi > lo) || bins == 0)
            throw std::domain_error("log_edges: need 0 < lo < hi and bins > 0");
        std::vector<double> e(bins + 1);
        for (std::size_t i = 0; i <= bins; ++i)
            e[i] = i == bins ? hi : lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(bins));
        return e;
    }

    DoobResult doob_identity_check(const CrossingScenario &scenario, double h, double T, const DoobOptions &options,
                                   std::uint64_t seed, unsigned workers)
    {
        require_unshifted(scenario, "doob_identity_check");
        if (!(h > 0.0 && h < T))
            throw std::domain_error("doob_identity_check: need 0 < h < T");
        const double g_h = scenario.boundary.g(h);
        if (!(g_h > 0.0))
            throw std::domain_error("doob_identity_check: g(h) must be positive (h > f(0))");
        const double y_max = options.y_max ? *options.y_max : scenario.boundary.g(T);
        if (!(y_max > g_h))
            throw std::domain_error("doob_identity_check: y_max must exceed g(h)");
        if (options.n < 2 || options.n_marginal < 2)
            throw std::domain_error("doob_identity_check: n must be at least 2");

        const auto edges = log_edges(g_h, y_max, options.bins);
        const std::size_t nb = options.bins + 1; // last bin is [y_max, inf)
        auto bin_of = [&](double x) -> std::size_t {
            if (x >= y_max)
                return nb - 1;
            const auto it = std::upper_bound(edges.begin(), edges.end(), x);
            return it == edges.begin() ? nb : static_cast<std::size_t>(it - edges.begin()) - 1;
        };

        DoobResult out;
        const std::size_t n = options.n;
        const std::size_t n_marg = options.n_marginal;

        // Left side: conditioned draws.
        PathProbe probe;
        probe.checkpoints = {h};
        const auto cond = conditioned_outcomes(scenario, T, options.n_accept, options.max_attempts,
                                               derive_seed(seed, "doob.conditioned"), workers, probe);
        out.acceptance = cond.acceptance_rate;
        out.partial = cond.partial;
        std::vector<std::size_t> lhs_count(nb, 0);
        for (const auto &o : cond.accepted)
        {
            const std::size_t b = bin_of(o.checkpoint_values[0]);
            if (b < nb)
                ++lhs_count[b];
        }
        const std::size_t n_acc = cond.accepted.size();

        // P(X_h in bin; O_h).
        const JumpLaw law = scenario.jump_law();
        const Barrier barrier = scenario.barrier();
        const std::uint64_t s_marg = derive_seed(seed, "doob.marginal");
        const auto xh = parallel_map<double>(n_marg, workers, [&](std::size_t i) {
            Rng rng = RngStream{s_marg, i}.make();
            const auto o = simulate_violation(law, barrier, h, rng, &probe);
            return o.sigma == kNoViolation ? o.checkpoint_values[0] : -1.0;
        });
        std::vector<std::size_t> path_count(nb, 0);
        for (double x : xh)
        {
            if (x >= 0.0)
            {
                const std::size_t b = bin_of(x);
                if (b < nb)
                    ++path_count[b];
            }
        }

        // P(O_T).
        const auto total = sample_sigmas(scenario.with_horizon(T), n_marg, derive_seed(seed, "doob.total"), workers);
        out.p_T = total.survival(T);
        out.acceptance_z = (out.acceptance.value - out.p_T.value) /
                           std::hypot(out.acceptance.std_error, out.p_T.std_error);

        // P(O_{T-h}^{g_y^h}) on edges and centres, common random numbers across y.
        const std::uint64_t s_shift = derive_seed(seed, "doob.shifted");
        auto shifted = [&](double y) {
            const auto sc = scenario.with_shift(Shift{y, h}).with_horizon(T - h);
            return sample_sigmas(sc, n, s_shift, workers).survival(T - h);
        };
        std::vector<MonteCarloEstimate> at_edge;
        for (double e : edges)
            at_edge.push_back(shifted(e));

        const double C = out.p_T.value;
        const double C_rel = C > 0.0 ? out.p_T.std_error / C : 0.0;
        std::size_t occupied = 0;
        std::size_t within = 0;
        for (std::size_t b = 0; b < nb; ++b)
        {
            DoobBin bin;
            const bool overflow = b == nb - 1;
            bin.lo = overflow ? y_max : edges[b];
            bin.hi = overflow ? std::numeric_limits<double>::infinity() : edges[b + 1];
            bin.center = overflow ? y_max : std::sqrt(bin.lo * bin.hi);
            const MonteCarloEstimate A = overflow ? at_edge.back() : shifted(bin.center);
            const MonteCarloEstimate B = proportion_estimate(path_count[b], n_marg);
            bin.lhs_count = lhs_count[b];
            bin.path_count = path_count[b];
            bin.occupied = bin.lhs_count > 0 || bin.path_count > 0;

            bin.lhs = n_acc > 0 ? static_cast<double>(lhs_count[b]) / static_cast<double>(n_acc) : 0.0;
            bin.lhs_se = n_acc > 0 ? floored_se(lhs_count[b], n_acc) : 0.0;
            if (lhs_count[b] > 0 && n_acc > 1)
                bin.lhs_se = std::sqrt(bin.lhs * (1.0 - bin.lhs) / static_cast<double>(n_acc - 1));

            if (C > 0.0)
            {
                bin.rhs = A.value * B.value / C;
                const double A_rel = A.value > 0.0 ? A.std_error / A.value : 0.0;
                const double B_rel = path_count[b] > 0 ? B.std_error / B.value : 0.0;
                bin.rhs_se = bin.rhs * std::sqrt(A_rel * A_rel + B_rel * B_rel + C_rel * C_rel);
                if (path_count[b] == 0)
                    bin.rhs_se = A.value * floored_se(0, n_marg) / C;
                if (!overflow)
                {
                    const double lo_v = at_edge[b].value * B.value / C;
                    const double hi_v = at_edge[b + 1].value * B.value / C;
                    bin.edge_sensitivity = std::max(std::abs(lo_v - bin.rhs), std::abs(hi_v - bin.rhs));
                }
            }
            const double se = std::hypot(bin.lhs_se, bin.rhs_se);
            bin.z = se > 0.0 ? (bin.lhs - bin.rhs) / se : 0.0;
            if (bin.occupied)
            {
                ++occupied;
                if (std::abs(bin.z) < options.z_limit)
                    ++within;
            }
            out.lhs_mass += bin.lhs;
            out.bins.push_back(bin);
        }
        out.fraction_within = occupied > 0 ? static_cast<double>(within) / static_cast<double>(occupied) : 0.0;
        return out;
    }

    void write_doob_csv(const DoobResult &result, const std::string &file)
    {
        std::ofstream out(file, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot open " + file);
        out << "bin_lo,bin_hi,lhs,lhs_se,rhs,rhs_se,z\n";
        for (const auto &b : result.bins)
        {
            out << format_double(b.lo) << ',' << format_double(b.hi) << ',' << format_double(b.lhs) << ','
                << format_double(b.lhs_se) << ',' << format_double(b.rhs) << ',' << format_double(b.rhs_se) << ','
                << format_double(b.z) << '\n';
        }
    }

    QhResult qh_estimate(const CrossingScenario &scenario, double h, double y, const std::vector<double> &T_schedule,
                         std::size_t n, std::uint64_t seed, unsigned workers)
    {
        require_unshifted(scenario, "qh_estimate");
        if (T_schedule.empty())
            throw std::domain_error("qh_estimate: empty T schedule");
        if (!std::is_sorted(T_schedule.begin(), T_schedule.end()) || !(T_schedule.front() > h))
            throw std::domain_error("qh_estimate: T schedule must be increasing and exceed h");
        if (!(h > 0.0))
            throw std::domain_error("qh_estimate: h must be positive");
        if (!(y > scenario.boundary.g(h)))
            throw std::domain_error("qh_estimate: need y > g(h)");
        const double T_max = T_schedule.back();
        const auto num = sample_sigmas(scenario.with_shift(Shift{y, h}).with_horizon(T_max - h), n,
                                       derive_seed(seed, "qh.shifted"), workers);
        const auto den = sample_sigmas(scenario.with_horizon(T_max), n, derive_seed(seed, "qh.unshifted"), workers);
        QhResult out;
        for (double T : T_schedule)
        {
            QhPoint p;
            p.T = T;
            p.numerator = num.survival(T - h);
            p.denominator = den.survival(T);
            if (p.denominator.value > 0.0)
            {
                p.ratio = p.numerator.value / p.denominator.value;
                const double a = p.numerator.value > 0.0 ? p.numerator.std_error / p.numerator.value : 0.0;
                const double b = p.denominator.std_error / p.denominator.value;
                p.ratio_se = p.ratio * std::hypot(a, b);
            }
            else
            {
                p.ratio = std::numeric_limits<double>::infinity();
                p.ratio_se = std::numeric_limits<double>::infinity();
            }
            if (!out.points.empty())
            {
                const auto &q = out.points.back();
                p.stable_step = std::isfinite(p.ratio) && std::isfinite(q.ratio) && p.numerator.value > 0.0 &&
                                std::abs(p.ratio - q.ratio) <= 3.0 * std::hypot(p.ratio_se, q.ratio_se);
            }
            out.points.push_back(p);
        }
        out.cauchy_trend = out.points.size() > 1 && out.points.back().stable_step;
        return out;
    }

    std::string to_string(PlateauVerdict v) { return v == PlateauVerdict::Converged ? "Converged" : "Divergent"; }

    double ExplosionLaw::survival(double h) const
    {
        if (verdict != PlateauVerdict::Converged)
            throw std::logic_error("explosion law: Phi diverges, no explosion time");
        if (h <= 0.0)
            return 1.0;
        if (h >= s.back())
            return 1.0 - cdf.back();
        const auto i = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), h) - s.begin());
        const double w = (h - s[i - 1]) / (s[i] - s[i - 1]);
        return 1.0 - (cdf[i - 1] + w * (cdf[i] - cdf[i - 1]));
    }

    double ExplosionLaw::sample(Rng &rng) const
    {
        if (verdict != PlateauVerdict::Converged)
            throw std::logic_error("explosion law: Phi diverges, no explosion time");
        const double u = rng.uniform();
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end())
            return s.back();
        const auto i = static_cast<std::size_t>(it - cdf.begin());
        if (i == 0)
            return s.front();
        const double span = cdf[i] - cdf[i - 1];
        const double w = span > 0.0 ? (u - cdf[i - 1]) / span : 0.0;
        return s[i - 1] + w * (s[i] - s[i - 1]);
    }

    ExplosionLaw phi_infinity_and_explosion(const CrossingScenario &scenario, const ExplosionOptions &options,
                                            std::uint64_t seed, unsigned workers)
    {
        require_unshifted(scenario, "phi_infinity_and_explosion");
        if (!(options.t_max >= 4.0) || !(options.plateau_tol > 0.0))
            throw std::domain_error("phi_infinity_and_explosion: need t_max >= 4 and plateau_tol > 0");
        const auto sample = sample_sigmas(scenario.with_horizon(options.t_max), options.n,
                                          derive_seed(seed, "explosion.sigma"), workers);
        ExplosionLaw law;
        int run = 0;
        double prev_inc = 0.0;
        const double n = static_cast<double>(sample.n());
        for (double t = 1.0; 2.0 * t <= options.t_max; t *= 2.0)
        {
            if (sample.survival(t).value * n < static_cast<double>(options.min_survivors))
                break;
            const double a = sample.phi(t).value;
            const double b = sample.phi(2.0 * t).value;
            const double inc = (b - a) / a;
            law.doublings.emplace_back(t, inc);
            run = inc < options.plateau_tol ? run + 1 : 0;
            const double r = prev_inc > 0.0 ? inc / prev_inc : 1.0;
            const bool geometric = r < 1.0 && inc * r / (1.0 - r) < options.plateau_tol;
            if (run >= 2 && geometric && law.verdict == PlateauVerdict::Divergent)
            {
                law.verdict = PlateauVerdict::Converged;
                law.plateau_t = 2.0 * t;
            }
            prev_inc = inc;
        }
        law.s.push_back(0.0);
        const int per = std::max(2, options.points_per_doubling);
        for (double base = 1.0 / 64.0; base < options.t_max; base *= 2.0)
        {
            for (int k = 0; k < per; ++k)
            {
                const double s = base * std::pow(2.0, static_cast<double>(k) / per);
                if (s < options.t_max)
                    law.s.push_back(s);
            }
        }
        law.s.push_back(options.t_max);
        for (double s : law.s)
            law.phi.push_back(sample.phi(s).value);
        if (law.verdict == PlateauVerdict::Converged)
        {
            law.phi_infinity = law.phi.back();
            for (double p : law.phi)
                law.cdf.push_back(std::min(1.0, p / law.phi_infinity));
        }
        try
        {
            law.criterion = classify_transience(scenario.model, scenario.boundary).verdict;
        }
        catch (const std::exception &)
        {
            law.criterion = Transience::Indeterminate;
        }
        law.consistent = (law.verdict == PlateauVerdict::Converged && law.criterion == Transience::Transient) ||
                         (law.verdict == PlateauVerdict::Divergent && law.criterion == Transience::Recurrent);
        return law;
    }

    void write_explosion_csv(const ExplosionLaw &law, const std::string &file)
    {
        std::ofstream out(file, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot open " + file);
        out << "s,phi,F_frakC\n";
        for (std::size_t i = 0; i < law.s.size(); ++i)
        {
            out << format_double(law.s[i]) << ',' << format_double(law.phi[i]) << ','
                << (law.cdf.empty() ? std::string("nan") : format_double(law.cdf[i])) << '\n';
        }
    }

    std::vector<ExplosionCheckRow> explosion_consistency(const CrossingScenario &scenario, const ExplosionLaw &law,
                                                         const std::vector<double> &h_values,
                                                         const std::vector<double> &T_schedule, std::size_t n_accept,
                                                         std::uint64_t seed, unsigned workers)
    {
        std::vector<ExplosionCheckRow> out;
        for (double T : T_schedule)
        {
            PathProbe probe;
            probe.big_jump_threshold = scenario.boundary.g(T);
            const auto draws = conditioned_outcomes(scenario, T, n_accept, 1000000000ULL,
                                                    hash_combine(derive_seed(seed, "explosion.check"),
                                                                 static_cast<std::uint64_t>(T * 1024.0)),
                                                    workers, probe);
            for (double h : h_values)
            {
                if (!(h < T))
                    continue;
                std::size_t late = 0;
                for (const auto &o : draws.accepted)
                {
                    if (!o.big_jump || o.big_jump->time > h)
                        ++late;
                }
                ExplosionCheckRow row;
                row.T = T;
                row.h = h;
                row.late_jump = proportion_estimate(late, draws.accepted.size());
                row.model = law.verdict == PlateauVerdict::Converged ? law.survival(h)
                                                                     : std::numeric_limits<double>::quiet_NaN();
                out.push_back(row);
            }
        }
        return out;
    }
} // namespace csl
