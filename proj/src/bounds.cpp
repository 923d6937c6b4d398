#include "csl/bounds.hpp"

#include "csl/ks.hpp"
#include "csl/parallel.hpp"
#include "csl/quadrature.hpp"
#include "csl/stable.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace csl
{
    ChernoffBound chernoff_bound(const SubordinatorModel &model, double t, double A, double B, double H)
    {
        if (!(A > 1.0) || !(B > 0.0) || !(H > 0.0 && H < 1.0) || !(t > 0.0))
            throw std::domain_error("chernoff_bound: need A > 1, B > 0, H in (0,1), t > 0");
        ChernoffBound out;
        out.m_A = model.tail_integral(A);
        if (!std::isfinite(out.m_A))
            throw NumericError("chernoff_bound: m(A) is not finite");
        out.lambda = std::log(1.0 / H) / B;
        out.drift_factor = std::exp(out.lambda * model.drift() * t);
        out.bound = std::exp(t * out.lambda * std::exp(out.lambda * A) * out.m_A) * out.drift_factor * H;
        const double tail_A = model.tail(A);
        out.c_hat = out.m_A / (A * tail_A);
        out.keyeqn_form =
            std::exp(out.c_hat * t * std::log(1.0 / H) * std::pow(H, -A / B) * tail_A * A / B) * H;
        return out;
    }

    MonteCarloEstimate truncated_exceedance(const SubordinatorModel &model, double t, double A, double B,
                                            std::size_t n, double cutoff, std::uint64_t seed, unsigned workers)
    {
        if (n == 0)
            throw std::domain_error("truncated_exceedance: n must be positive");
        const JumpLaw law(model, cutoff, A);
        const double d = law.drift_slope();
        const auto hits = parallel_map<char>(n, workers, [&](std::size_t i) -> char {
            Rng rng = RngStream{seed, i}.make();
            JumpStream stream(law, rng);
            double sum = d * t;
            while (sum <= B)
            {
                const Jump j = stream.next();
                if (j.time > t)
                    break;
                sum += j.size;
            }
            return sum > B ? 1 : 0;
        });
        const auto k = static_cast<std::size_t>(std::count(hits.begin(), hits.end(), 1));
        return proportion_estimate(k, n, hash_combine(seed, n));
    }

    std::vector<ChernoffCell> chernoff_domination_grid(const SubordinatorModel &model, const std::vector<double> &ts,
                                                       const std::vector<double> &As, const std::vector<double> &Bs,
                                                       double H, std::size_t n, double cutoff, std::uint64_t seed,
                                                       unsigned workers)
    {
        std::vector<ChernoffCell> out;
        std::uint64_t cell = 0;
        for (double t : ts)
        {
            for (double A : As)
            {
                for (double B : Bs)
                {
                    ChernoffCell c;
                    c.t = t;
                    c.A = A;
                    c.B = B;
                    c.bound = chernoff_bound(model, t, A, B, H);
                    c.empirical = truncated_exceedance(model, t, A, B, n, cutoff, hash_combine(seed, cell++), workers);
                    c.violation = c.empirical.value - 3.0 * c.empirical.std_error > c.bound.bound;
                    out.push_back(c);
                }
            }
        }
        return out;
    }

    namespace
    {
        CheckRow ks_row(std::string check, nlohmann::json params, const KsResult &r, double significance)
        {
            CheckRow row;
            row.check = std::move(check);
            row.params = std::move(params);
            row.statistic = r.statistic;
            row.p_value = r.p_value;
            row.verdict = r.p_value > significance ? Verdict::Pass : Verdict::Fail;
            return row;
        }
    } // namespace

    std::vector<CheckRow> distribution_law_tests(const SubordinatorModel &model, const LawTestParams &params,
                                                 std::uint64_t seed, unsigned workers)
    {
        const auto &sp = model.stable_params();
        if (!sp)
            throw std::domain_error("distribution_law_tests: needs a stable model");
        if (!(params.x > params.cutoff))
            throw std::domain_error("distribution_law_tests: threshold must exceed the cutoff");
        const double alpha = sp->alpha;
        const double c = sp->scale;
        const std::size_t n = params.n;
        std::vector<CheckRow> rows;

        // (a), (b): first jump above x in the compound-Poisson stream.
        const JumpLaw law(model, params.cutoff);
        const std::uint64_t s_big = derive_seed(seed, "laws.big_jump");
        const auto big = parallel_map<Jump>(n, workers, [&](std::size_t i) {
            Rng rng = RngStream{s_big, i}.make();
            JumpStream stream(law, rng);
            while (true)
            {
                const Jump j = stream.next();
                if (j.size > params.x)
                    return j;
            }
        });
        std::vector<double> times;
        std::vector<double> ratios;
        for (const auto &j : big)
        {
            times.push_back(j.time);
            ratios.push_back(j.size / params.x);
        }
        const double rate = model.tail(params.x);
        rows.push_back(ks_row("first_big_jump_time_exponential",
                              {{"alpha", alpha}, {"x", params.x}, {"rate", rate}, {"n", n}},
                              ks_one_sample(times, [rate](double s) { return -std::expm1(-rate * s); }),
                              params.significance));
        rows.push_back(ks_row("big_jump_size_pareto", {{"alpha", alpha}, {"x", params.x}, {"n", n}},
                              ks_one_sample(ratios, [alpha](double r) { return r <= 1.0 ? 0.0 : 1.0 - std::pow(r, -alpha); }),
                              params.significance));

        // (c): scaling of the exact sampler.
        const std::uint64_t s1 = derive_seed(seed, "laws.x1");
        const std::uint64_t st = derive_seed(seed, "laws.xt");
        const auto x1 = parallel_map<double>(n, workers, [&](std::size_t i) {
            Rng rng = RngStream{s1, i}.make();
            return sample_stable_value(alpha, c, 1.0, rng);
        });
        const double scale_t = std::pow(params.t, 1.0 / alpha);
        const auto xt = parallel_map<double>(n, workers, [&](std::size_t i) {
            Rng rng = RngStream{st, i}.make();
            return sample_stable_value(alpha, c, params.t, rng) / scale_t;
        });
        rows.push_back(ks_row("stable_scaling_two_sample", {{"alpha", alpha}, {"t", params.t}, {"n", n}},
                              ks_two_sample(x1, xt), params.significance));

        // Exact sampler against the quadrature CDF.
        const StableParams p1{alpha, c};
        rows.push_back(ks_row("stable_sampler_vs_cdf", {{"alpha", alpha}, {"c", c}, {"n", n}},
                              ks_one_sample(x1, [&](double x) { return stable_transition_cdf(p1, 1.0, x); }),
                              params.significance));

        // Spot value P(X_1 <= 1).
        {
            const auto k = static_cast<std::size_t>(std::count_if(x1.begin(), x1.end(), [](double v) { return v <= 1.0; }));
            const auto est = proportion_estimate(k, n);
            const double ref = stable_transition_cdf(p1, 1.0, 1.0);
            const double z = (est.value - ref) / std::sqrt(ref * (1.0 - ref) / static_cast<double>(n));
            CheckRow row;
            row.check = "stable_cdf_spot_value";
            row.params = {{"alpha", alpha}, {"x", 1.0}, {"reference", ref}, {"estimate", est.value}, {"n", n}};
            row.statistic = z;
            row.p_value = std::erfc(std::abs(z) / std::sqrt(2.0));
            row.verdict = std::abs(z) < 3.0 ? Verdict::Pass : Verdict::Fail;
            rows.push_back(row);
        }
        return rows;
    }

    namespace
    {
        void check_lemma_params(const BoundaryPair &boundary, double y, double h, double A, double B)
        {
            if (!(A > 3.0 && A > B - 1.0))
                throw std::domain_error("lemma check: need A > 3 v (B - 1)");
            if (!(h > 0.0))
                throw std::domain_error("lemma check: need h > 0");
            if (!(y > boundary.g(h)))
                throw std::domain_error("lemma check: need y > g(h)");
        }
    } // namespace

    CheckRow lemma_1_1_check(const BoundaryPair &boundary, double y, double h, double A, double B)
    {
        check_lemma_params(boundary, y, h, A, B);
        const double start = t0(boundary, y, A, B);
        CheckRow row;
        row.check = "lemma_1_1";
        row.params = {{"y", y}, {"h", h}, {"A", A}, {"B", B}, {"t0", start}};
        double margin = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 160; ++k)
        {
            const double t = start * std::pow(2.0, 0.25 * k);
            const double lhs = shifted_boundary(boundary, y, h, t);
            const double rhs = (1.0 - 1.0 / A) * boundary.g(t);
            margin = std::min(margin, lhs - rhs);
        }
        row.statistic = margin;
        row.verdict = margin >= 0.0 ? Verdict::Pass : Verdict::Fail;
        row.note = "smallest g_y^h(t) - (1 - 1/A) g(t) over t0 * 2^(k/4), k = 0..160";
        return row;
    }

    CheckRow lemma_1fyh_check(const CrossingScenario &scenario, double y, double h, double A, std::size_t n,
                              std::uint64_t seed, unsigned workers, double B)
    {
        const double target = scenario.boundary.f(y) - h;
        const double t_start = scenario.boundary.f(A * y);
        if (!(A > 3.0 && A > B - 1.0) || !(h > 0.0))
            throw std::domain_error("lemma check: need A > 3 v (B - 1) and h > 0");
        CheckRow row;
        row.check = "lemma_1fyh";
        row.params = {{"y", y}, {"h", h}, {"A", A}, {"target", target}, {"n", n}};
        if (!(target > 0.0))
        {
            row.verdict = Verdict::Pass;
            row.note = "f(y) - h <= 0: vacuous";
            return row;
        }
        check_lemma_params(scenario.boundary, y, h, A, B);
        const auto sc = scenario.with_shift(Shift{y, h}).with_horizon(4.0 * t_start);
        const auto sample = sample_sigmas(sc, n, seed, workers);
        double margin = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (double t : {t_start, 2.0 * t_start, 4.0 * t_start})
        {
            const auto phi = sample.phi(t);
            margin = std::min(margin, phi.value - target);
            ok = ok && phi.value + 3.0 * phi.std_error >= target;
        }
        row.statistic = margin;
        row.verdict = ok ? Verdict::Pass : Verdict::Fail;
        row.note = "smallest Phi_y^h(t) - (f(y) - h) over t in {1,2,4} f(Ay)";
        return row;
    }

    CheckRow lemma4_ratio(const SubordinatorModel &model, const BoundaryPair &boundary, double y, double h, double A,
                          const std::vector<double> &T_max, double B)
    {
        check_lemma_params(boundary, y, h, A, B);
        if (!boundary.has_fprime())
            throw std::domain_error("lemma4_ratio: boundary needs f'");
        if (T_max.size() < 2 || !std::is_sorted(T_max.begin(), T_max.end()))
            throw std::domain_error("lemma4_ratio: need an increasing list of at least two T_max");
        const double start = t0(boundary, y, A, B);
        const double scale = y * *boundary.fprime(y) * model.tail(y);
        auto integrand = [&](double s) {
            const double shifted = boundary.g(s + h) - y;
            return model.tail(shifted) - model.tail(boundary.g(s));
        };
        CheckRow row;
        row.check = "lemma4_ratio";
        std::vector<double> ratios;
        double prev_T = start;
        double acc = 0.0;
        for (double T : T_max)
        {
            if (T > prev_T)
                acc += integrate_log(integrand, prev_T, T);
            prev_T = std::max(prev_T, T);
            ratios.push_back(acc / scale);
        }
        row.params = {{"y", y}, {"h", h}, {"A", A}, {"t0", start}, {"T_max", T_max}, {"ratios", ratios}};
        row.statistic = ratios.back();
        const double a = ratios[ratios.size() - 2];
        const double b = ratios.back();
        if (!std::all_of(ratios.begin(), ratios.end(), [](double r) { return std::isfinite(r); }))
            row.verdict = Verdict::Fail;
        else if (std::abs(b - a) <= 0.01 * std::abs(b))
            row.verdict = Verdict::Pass;
        else
            row.verdict = Verdict::Indeterminate;
        row.note = "ratio to y f'(y) Pibar(y); the lemma's constant is implicit";
        return row;
    }

    void write_checks_csv(const std::vector<CheckRow> &rows, const std::string &file)
    {
        std::ofstream out(file, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot open " + file);
        out << "check,param_json,statistic,p_value,verdict\n";
        for (const auto &r : rows)
        {
            std::string pj = r.params.dump();
            std::string quoted = "\"";
            for (char ch : pj)
            {
                if (ch == '"')
                    quoted += '"';
                quoted += ch;
            }
            quoted += '"';
            out << r.check << ',' << quoted << ',' << format_double(r.statistic) << ','
                << (std::isnan(r.p_value) ? std::string() : format_double(r.p_value)) << ',' << to_string(r.verdict)
                << '\n';
        }
    }
} // namespace csl
