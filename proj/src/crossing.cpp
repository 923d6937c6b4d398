#include "csl/crossing.hpp"

#include "csl/parallel.hpp"
#include "csl/quadrature.hpp"
#include "csl/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace csl
{
    namespace
    {
        constexpr double kTimeTol = 1e-10;
        constexpr int kMaxIterations = 1000000;

        /// First violation on [a, b) for X(s) = x + d (s - a); kNoViolation if none.
        /// The iteration s <- D(X(s)) only passes through violation-free time, since
        /// s < D(X(s_prev)) <= D(X(s)) on each step.
        double first_violation_in(const Barrier &barrier, double a, double b, double x, double d)
        {
            if (d == 0.0)
            {
                const double s = std::max(a, barrier.deadline(x));
                return s < b ? s : kNoViolation;
            }
            double s = a;
            for (int it = 0; it < kMaxIterations; ++it)
            {
                const double D = barrier.deadline(x + d * (s - a));
                if (D < s)
                    return s;
                if (D >= b)
                    return kNoViolation;
                if (D - s > kTimeTol)
                {
                    s = D;
                    continue;
                }
                // Fixed point of D o X: either the path crosses here or only touches.
                const double probe = s + kTimeTol;
                if (probe >= b)
                    return kNoViolation;
                if (probe > barrier.deadline(x + d * (probe - a)))
                    return s;
                s = probe;
            }
            throw NumericError("violation_time: deadline iteration did not settle");
        }
    } // namespace

    Barrier::Barrier(const BoundaryPair &boundary, std::optional<Shift> shift) : boundary_(&boundary)
    {
        if (shift)
        {
            if (!(shift->h >= 0.0))
                throw std::domain_error("Barrier: shift h must be nonnegative");
            y_ = shift->y;
            h_ = shift->h;
        }
    }

    double Barrier::deadline(double x) const
    {
        const double z = x + y_;
        if (z < 0.0)
            return -std::numeric_limits<double>::infinity();
        return boundary_->f(z) - h_;
    }

    double CrossingScenario::cutoff() const
    {
        return sim.cutoff ? *sim.cutoff : default_cutoff(model, sim.jumps_per_unit_time);
    }

    JumpLaw CrossingScenario::jump_law() const { return JumpLaw(model, cutoff(), sim.truncation); }

    CrossingScenario CrossingScenario::with_shift(std::optional<Shift> s) const
    {
        CrossingScenario out = *this;
        out.shift = s;
        return out;
    }

    CrossingScenario CrossingScenario::with_horizon(double horizon) const
    {
        CrossingScenario out = *this;
        out.sim.horizon = horizon;
        return out;
    }

    MonteCarloEstimate proportion_estimate(std::size_t k, std::size_t n, std::uint64_t fingerprint)
    {
        if (n == 0)
            throw std::domain_error("estimate: n must be positive");
        MonteCarloEstimate e;
        e.n = n;
        e.seed_fingerprint = fingerprint;
        e.value = static_cast<double>(k) / static_cast<double>(n);
        if (n > 1)
            e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(n - 1));
        return e;
    }

    double violation_time(const SamplePath &path, const Barrier &barrier, double horizon)
    {
        if (!(path.horizon >= horizon))
            throw std::domain_error("violation_time: path horizon shorter than the scenario horizon");
        const double d = path.drift_slope;
        double a = 0.0;
        double x = 0.0;
        for (const auto &j : path.jumps)
        {
            if (j.time > horizon)
                break;
            const double s = first_violation_in(barrier, a, j.time, x, d);
            if (s != kNoViolation)
                return s;
            x += d * (j.time - a) + j.size;
            a = j.time;
        }
        const double s = first_violation_in(barrier, a, horizon, x, d);
        return s;
    }

    PathOutcome simulate_violation(const JumpLaw &law, const Barrier &barrier, double horizon, Rng &rng,
                                   const PathProbe *probe)
    {
        PathOutcome out;
        const double d = law.drift_slope();
        const std::vector<double> no_checkpoints;
        const auto &cps = probe ? probe->checkpoints : no_checkpoints;
        const double big = probe ? probe->big_jump_threshold : kNoViolation;
        out.checkpoint_values.assign(cps.size(), std::numeric_limits<double>::quiet_NaN());
        std::size_t next_cp = 0;

        JumpStream stream(law, rng);
        double a = 0.0;
        double x = 0.0;
        while (true)
        {
            const Jump j = stream.next();
            const double b = std::min(j.time, horizon);
            const double s = first_violation_in(barrier, a, b, x, d);
            const double stop = std::min(s, b);
            // X is continuous on [a, b): checkpoints before the violation see x + d (c - a).
            while (next_cp < cps.size() && cps[next_cp] < stop)
            {
                out.checkpoint_values[next_cp] = x + d * (cps[next_cp] - a);
                ++next_cp;
            }
            if (s != kNoViolation)
            {
                out.sigma = s;
                return out;
            }
            if (j.time > horizon)
            {
                while (next_cp < cps.size() && cps[next_cp] <= horizon)
                {
                    out.checkpoint_values[next_cp] = x + d * (cps[next_cp] - a);
                    ++next_cp;
                }
                return out;
            }
            x += d * (j.time - a) + j.size;
            a = j.time;
            ++out.jumps;
            if (!out.big_jump && j.size > big)
                out.big_jump = j;
            if (next_cp == cps.size() && (out.big_jump || big == kNoViolation) && barrier.deadline(x) >= horizon)
                return out;
        }
    }

    SigmaSample::SigmaSample(std::vector<double> sigma, double horizon, std::uint64_t fingerprint)
        : sigma_(std::move(sigma)), horizon_(horizon), fingerprint_(fingerprint)
    {
        if (sigma_.empty())
            throw std::domain_error("SigmaSample: n must be positive");
        std::sort(sigma_.begin(), sigma_.end());
        prefix_.resize(sigma_.size() + 1, 0.0);
        prefix_sq_.resize(sigma_.size() + 1, 0.0);
        for (std::size_t i = 0; i < sigma_.size(); ++i)
        {
            const double s = std::min(sigma_[i], horizon_);
            prefix_[i + 1] = prefix_[i] + s;
            prefix_sq_[i + 1] = prefix_sq_[i] + s * s;
        }
    }

    MonteCarloEstimate SigmaSample::survival(double u) const
    {
        if (!(u >= 0.0 && u <= horizon_))
            throw std::domain_error("survival: u outside [0, horizon]");
        const auto k = static_cast<std::size_t>(sigma_.end() - std::upper_bound(sigma_.begin(), sigma_.end(), u));
        return proportion_estimate(k, sigma_.size(), fingerprint_);
    }

    MonteCarloEstimate SigmaSample::phi(double t) const
    {
        if (!(t >= 0.0 && t <= horizon_))
            throw std::domain_error("phi: t outside [0, horizon]");
        const std::size_t n = sigma_.size();
        const auto k = static_cast<std::size_t>(std::upper_bound(sigma_.begin(), sigma_.end(), t) - sigma_.begin());
        const double rest = static_cast<double>(n - k);
        const double sum = prefix_[k] + rest * t;
        const double sum_sq = prefix_sq_[k] + rest * t * t;
        MonteCarloEstimate e;
        e.n = n;
        e.seed_fingerprint = fingerprint_;
        e.value = sum / static_cast<double>(n);
        if (n > 1)
        {
            const double var = std::max(0.0, (sum_sq - sum * e.value) / static_cast<double>(n - 1));
            e.std_error = std::sqrt(var / static_cast<double>(n));
        }
        return e;
    }

    SigmaSample sample_sigmas(const CrossingScenario &scenario, std::size_t n, std::uint64_t seed, unsigned workers)
    {
        if (n == 0)
            throw std::domain_error("estimate_crossing: n must be positive");
        const JumpLaw law = scenario.jump_law();
        const Barrier barrier = scenario.barrier();
        const double horizon = scenario.sim.horizon;
        auto sigma = parallel_map<double>(n, workers, [&](std::size_t i) {
            Rng rng = RngStream{seed, i}.make();
            return simulate_violation(law, barrier, horizon, rng).sigma;
        });
        return SigmaSample(std::move(sigma), horizon, hash_combine(seed, n));
    }

    std::vector<CrossingPoint> estimate_crossing(const CrossingScenario &scenario, const std::vector<double> &u_grid,
                                                 std::size_t n, std::uint64_t seed, unsigned workers)
    {
        for (double u : u_grid)
        {
            if (!(u >= 0.0 && u <= scenario.sim.horizon))
                throw std::domain_error("estimate_crossing: u_grid must lie within the horizon");
        }
        const SigmaSample sample = sample_sigmas(scenario, n, seed, workers);
        std::vector<CrossingPoint> out;
        for (double u : u_grid)
            out.push_back({u, sample.survival(u), sample.phi(u)});
        return out;
    }

    Diagnostics asymptotic_diagnostics(const CrossingScenario &scenario, const SigmaSample &sample,
                                       const std::vector<double> &t_grid, const DiagnosticsOptions &options)
    {
        Diagnostics out;
        const Barrier barrier = scenario.barrier();
        const double start = scenario.shift ? 0.0 : scenario.boundary.f0();
        for (double t : t_grid)
        {
            if (!(t > start) || t > sample.horizon())
                throw std::domain_error("asymptotic_diagnostics: grid must lie in (f(0), horizon]");
        }
        if (!(options.t_ref > 0.0 && options.t_ref <= sample.horizon()))
            throw std::domain_error("asymptotic_diagnostics: t_ref outside (0, horizon]");

        if (!scenario.shift)
        {
            const auto r1 = validate_regularity(scenario.model, scenario.boundary, RegularityCase::CaseI);
            if (r1.overall() != Verdict::Pass)
            {
                const auto r2 = validate_regularity(scenario.model, scenario.boundary, RegularityCase::CaseII);
                if (r2.overall() != Verdict::Pass)
                    out.warnings.push_back("neither case (i) nor case (ii) validated; Lemma-1 trend is not expected");
            }
        }

        // log P/Phi integrated on a dense log grid between t_ref and each t.
        auto log_growth = [&](double lo, double hi) {
            if (lo == hi)
                return 0.0;
            const double sign = hi > lo ? 1.0 : -1.0;
            const double a = std::min(lo, hi);
            const double b = std::max(lo, hi);
            const int m = std::max(2, static_cast<int>(std::ceil(options.points_per_decade * std::log10(b / a))));
            double acc = 0.0;
            double prev_s = a;
            double prev_v = sample.survival(a).value / sample.phi(a).value;
            for (int i = 1; i <= m; ++i)
            {
                const double s = i == m ? b : a * std::pow(b / a, static_cast<double>(i) / m);
                const double v = sample.survival(s).value / sample.phi(s).value;
                acc += 0.5 * (v + prev_v) * (s - prev_s);
                prev_s = s;
                prev_v = v;
            }
            return sign * acc;
        };

        const double phi_ref = sample.phi(options.t_ref).value;
        for (double t : t_grid)
        {
            DiagnosticRow row;
            row.t = t;
            row.p_o = sample.survival(t);
            row.phi = sample.phi(t);
            const double gt = barrier.level(t);
            row.tail_g = gt > 0.0 ? scenario.model.tail(gt) : std::numeric_limits<double>::infinity();
            const double hazard = row.p_o.value / row.phi.value;
            row.rho = hazard - row.tail_g;
            row.small_count = static_cast<double>(sample.n()) * row.p_o.value < static_cast<double>(options.small_count);
            if (row.p_o.value > 0.0 && std::isfinite(row.tail_g))
            {
                row.ratio = hazard / row.tail_g;
                const double rel = std::hypot(row.p_o.std_error / row.p_o.value, row.phi.std_error / row.phi.value);
                row.ratio_se = row.ratio * rel;
            }
            row.phi_recon = phi_ref * std::exp(log_growth(options.t_ref, t));
            out.rows.push_back(row);
        }
        return out;
    }

    void write_crossing_csv(const Diagnostics &diag, const std::string &file)
    {
        std::ofstream out(file, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot open " + file);
        out << "t,p_o,p_o_se,phi,phi_se,tail_g,rho,ratio,phi_recon\n";
        for (const auto &r : diag.rows)
        {
            out << format_double(r.t) << ',' << format_double(r.p_o.value) << ',' << format_double(r.p_o.std_error)
                << ',' << format_double(r.phi.value) << ',' << format_double(r.phi.std_error) << ','
                << format_double(r.tail_g) << ',' << format_double(r.rho) << ',' << format_double(r.ratio) << ','
                << format_double(r.phi_recon) << '\n';
        }
    }
} // namespace csl
