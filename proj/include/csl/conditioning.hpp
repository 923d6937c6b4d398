#pragma once

#include "csl/crossing.hpp"
#include "csl/transience.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace csl
{
    /// Outcomes of the first n_accept paths (in replicate order) that survive to T.
    struct ConditionedDraws
    {
        std::vector<PathOutcome> accepted;
        std::size_t attempts = 0;
        MonteCarloEstimate acceptance_rate; ///< estimate of P(O_T)
        bool partial = false;               ///< max_attempts ran out first
    };

    /// Rejection sampling of P( . | O_T). Replicate i uses RngStream{seed, i}; the result does
    /// not depend on `workers`. The acceptance rate is (k-1)/(N-1) after the k-th success at
    /// attempt N (unbiased for P(O_T)), or k/N when the budget runs out.
    ConditionedDraws conditioned_outcomes(const CrossingScenario &scenario, double T, std::size_t n_accept,
                                          std::size_t max_attempts, std::uint64_t seed, unsigned workers,
                                          const PathProbe &probe = {});

    struct ConditionedSample
    {
        std::vector<SamplePath> paths;
        std::size_t attempts = 0;
        MonteCarloEstimate acceptance_rate;
        bool partial = false;
    };

    /// Full accepted paths on [0, T]. Replicate i is the same path conditioned_outcomes sees.
    ConditionedSample sample_conditioned(const CrossingScenario &scenario, double T, std::size_t n_accept,
                                         std::size_t max_attempts, std::uint64_t seed, unsigned workers);

    struct DoobBin
    {
        double lo = 0.0;
        double hi = 0.0;
        double center = 0.0;
        double lhs = 0.0;
        double lhs_se = 0.0;
        double rhs = 0.0;
        double rhs_se = 0.0;
        double z = 0.0;
        double edge_sensitivity = 0.0; ///< max |rhs(edge) - rhs(center)|
        std::size_t lhs_count = 0;
        std::size_t path_count = 0;    ///< unconditioned paths with X_h in the bin on O_h
        bool occupied = false;
    };

    struct DoobOptions
    {
        std::size_t n = 100000;          ///< paths per shifted estimate P(O_{T-h}^{g_y^h})
        std::size_t n_marginal = 1000000; ///< paths for P(X_h in bin; O_h) and for P(O_T)
        std::size_t n_accept = 2000;     ///< conditioned paths for the left side
        std::size_t max_attempts = 100000000;
        std::size_t bins = 10;
        std::optional<double> y_max;     ///< default g(T); an overflow bin [y_max, inf) is added
        double z_limit = 3.0;
    };

    struct DoobResult
    {
        std::vector<DoobBin> bins;
        MonteCarloEstimate p_T;           ///< P(O_T), unconditioned estimator
        MonteCarloEstimate acceptance;    ///< P(O_T) from the rejection sampler
        double acceptance_z = 0.0;
        double fraction_within = 0.0;     ///< share of occupied bins with |z| < z_limit
        double lhs_mass = 0.0;            ///< sum of lhs over bins
        bool partial = false;
    };

    /// Compares P(X_h in bin | O_T) with P(O_{T-h}^{g_y^h}) P(X_h in bin; O_h) / P(O_T), y at the
    /// geometric bin centre. Each factor comes from its own seed stream.
    DoobResult doob_identity_check(const CrossingScenario &scenario, double h, double T, const DoobOptions &options,
                                   std::uint64_t seed, unsigned workers);

    /// Log-spaced edges from lo to hi.
    std::vector<double> log_edges(double lo, double hi, std::size_t bins);

    void write_doob_csv(const DoobResult &result, const std::string &file);

    struct QhPoint
    {
        double T = 0.0;
        MonteCarloEstimate numerator;   ///< P(O_{T-h}^{g_y^h})
        MonteCarloEstimate denominator; ///< P(O_T)
        double ratio = 0.0;             ///< +inf when the denominator is 0
        double ratio_se = 0.0;
        bool stable_step = false;       ///< |ratio - previous ratio| within 3 combined SE, numerator positive
    };

    struct QhResult
    {
        std::vector<QhPoint> points;
        bool cauchy_trend = false;      ///< the last step is stable
    };

    /// Requires y > g(h).
    QhResult qh_estimate(const CrossingScenario &scenario, double h, double y, const std::vector<double> &T_schedule,
                         std::size_t n, std::uint64_t seed, unsigned workers);

    enum class PlateauVerdict
    {
        Converged,
        Divergent
    };

    std::string to_string(PlateauVerdict v);

    struct ExplosionLaw
    {
        PlateauVerdict verdict = PlateauVerdict::Divergent;
        double phi_infinity = 0.0;       ///< plateau value when Converged
        double plateau_t = 0.0;
        std::vector<double> s;           ///< dense grid
        std::vector<double> phi;         ///< Phi(s)
        std::vector<double> cdf;         ///< Phi(s)/Phi_inf (empty when Divergent)
        std::vector<std::pair<double, double>> doublings; ///< (t, relative increment over [t, 2t])
        Transience criterion = Transience::Indeterminate;
        bool consistent = false;         ///< Converged <=> Transient, Divergent <=> Recurrent

        /// 1 - F(h) = P(explosion time > h).
        double survival(double h) const;

        /// Inverse-CDF draw by linear interpolation of the tabulated F.
        double sample(Rng &rng) const;
    };

    struct ExplosionOptions
    {
        std::size_t n = 1000000;
        double plateau_tol = 0.01;
        double t_max = 4096.0;
        int points_per_doubling = 32;
        std::size_t min_survivors = 100; ///< doublings from t with fewer paths alive at t are unresolved
    };

    /// Converged when two consecutive resolved doublings have relative increment < plateau_tol and the
    /// geometric extrapolation inc r/(1-r), r the ratio of the last two increments, is also below it.
    ExplosionLaw phi_infinity_and_explosion(const CrossingScenario &scenario, const ExplosionOptions &options,
                                            std::uint64_t seed, unsigned workers);

    void write_explosion_csv(const ExplosionLaw &law, const std::string &file);

    struct ExplosionCheckRow
    {
        double T = 0.0;
        double h = 0.0;
        MonteCarloEstimate late_jump; ///< P(first jump above g(T) happens after h | O_T)
        double model = 0.0;           ///< 1 - F(h)
    };

    /// Q(X_h < inf) = P(explosion time > h), pre-limit: the conditioned paths whose first jump
    /// above g(T) comes after h, across growing T.
    std::vector<ExplosionCheckRow> explosion_consistency(const CrossingScenario &scenario, const ExplosionLaw &law,
                                                         const std::vector<double> &h_values,
                                                         const std::vector<double> &T_schedule, std::size_t n_accept,
                                                         std::uint64_t seed, unsigned workers);
} // namespace csl
