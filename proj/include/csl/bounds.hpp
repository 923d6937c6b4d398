#pragma once

#include "csl/crossing.hpp"
#include "csl/regularity.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace csl
{
    struct ChernoffBound
    {
        double bound = 0.0;        ///< exp(t lambda e^{lambda A} m(A) + lambda d t) H
        double lambda = 0.0;       ///< log(1/H)/B
        double m_A = 0.0;          ///< int_0^A Pibar
        double c_hat = 0.0;        ///< m(A)/(A Pibar(A))
        double keyeqn_form = 0.0;  ///< exp(C t log(1/H) H^{-A/B} Pibar(A) A/B) H at C = c_hat
        double drift_factor = 1.0; ///< e^{lambda d t}
    };

    /// Markov-inequality bound on P(X_t^(0,A) > B). Requires A > 1, B > 0, H in (0,1), t > 0.
    ChernoffBound chernoff_bound(const SubordinatorModel &model, double t, double A, double B, double H);

    /// P(X_t^(0,A) > B) by simulation of the truncated process with jumps in (cutoff, A].
    MonteCarloEstimate truncated_exceedance(const SubordinatorModel &model, double t, double A, double B,
                                            std::size_t n, double cutoff, std::uint64_t seed, unsigned workers);

    struct ChernoffCell
    {
        double t = 0.0;
        double A = 0.0;
        double B = 0.0;
        ChernoffBound bound;
        MonteCarloEstimate empirical;
        bool violation = false; ///< empirical - 3 SE above the bound
    };

    std::vector<ChernoffCell> chernoff_domination_grid(const SubordinatorModel &model, const std::vector<double> &ts,
                                                       const std::vector<double> &As, const std::vector<double> &Bs,
                                                       double H, std::size_t n, double cutoff, std::uint64_t seed,
                                                       unsigned workers);

    /// One row of the bounds report.
    struct CheckRow
    {
        std::string check;
        nlohmann::json params;
        double statistic = 0.0;
        double p_value = std::numeric_limits<double>::quiet_NaN();
        Verdict verdict = Verdict::Indeterminate;
        std::string note;
    };

    struct LawTestParams
    {
        double x = 1.0;          ///< big-jump threshold
        double t = 4.0;          ///< scaling time
        std::size_t n = 100000;
        double cutoff = 1e-2;    ///< small-jump cutoff for the compound-Poisson draws
        double significance = 0.01;
    };

    /// KS tests for a stable model: first-big-jump time ~ Exp(Pibar(x)), relative size ~ Pareto(alpha),
    /// X_t / t^{1/alpha} ~ X_1 (two-sample), exact sampler vs the quadrature CDF, and a z-test of
    /// P(X_1 <= 1) against that CDF.
    std::vector<CheckRow> distribution_law_tests(const SubordinatorModel &model, const LawTestParams &params,
                                                 std::uint64_t seed, unsigned workers);

    /// g_y^h(t) >= (1 - 1/A) g(t) on a geometric grid of t > t0(y); statistic is the smallest margin.
    CheckRow lemma_1_1_check(const BoundaryPair &boundary, double y, double h, double A, double B = 1.0);

    /// Phi_y^h(t) + 3 SE >= f(y) - h at t in {f(Ay), 2 f(Ay), 4 f(Ay)}; statistic is the smallest margin.
    /// f(y) <= h passes without simulation; otherwise y > g(h) is required.
    CheckRow lemma_1fyh_check(const CrossingScenario &scenario, double y, double h, double A, std::size_t n,
                              std::uint64_t seed, unsigned workers, double B = 1.0);

    /// int_{t0}^{T_max} (Pibar(g(s+h) - y) - Pibar(g(s))) ds / (y f'(y) Pibar(y)) for each T_max;
    /// pass when finite and the last two values agree within 1%.
    CheckRow lemma4_ratio(const SubordinatorModel &model, const BoundaryPair &boundary, double y, double h,
                          double A, const std::vector<double> &T_max, double B = 1.0);

    void write_checks_csv(const std::vector<CheckRow> &rows, const std::string &file);
} // namespace csl
