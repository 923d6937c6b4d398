#pragma once

#include "csl/conditioning.hpp"

#include <functional>
#include <string>
#include <vector>

namespace csl
{
    using GrowthFn = std::function<double(double)>;

    enum class EnvelopeVerdict
    {
        InEnvelope,
        NotInEnvelope,
        Indeterminate
    };

    std::string to_string(EnvelopeVerdict v);

    struct EnvelopePoint
    {
        double h = 0.0;
        double upper = 0.0; ///< f(w(h) g(h))
        double J = 0.0;     ///< int_h^upper Pibar(g(s)) ds, +inf when upper overflows
        std::string component; ///< "decreasing", "increasing", "flat", "first", "infinite"
    };

    struct EnvelopeResult
    {
        std::vector<EnvelopePoint> points;
        EnvelopeVerdict verdict = EnvelopeVerdict::Indeterminate;
        std::string reason;
        std::vector<std::string> warnings;
    };

    struct EnvelopeOptions
    {
        double tol = 0.05; ///< final J must be below this for InEnvelope
        int tail_points = 3;
    };

    /// J(h) = int_h^{f(w(h) g(h))} Pibar(g(s)) ds on h_grid. InEnvelope when the final J < tol and J is
    /// strictly decreasing over the last tail_points; NotInEnvelope when it is nondecreasing there or
    /// infinite. Throws std::domain_error unless w is strictly increasing on the grid with w(h_max) >= 2 w(h_min).
    EnvelopeResult envelope_criterion(const CrossingScenario &scenario, const GrowthFn &w,
                                      const std::vector<double> &h_grid, const EnvelopeOptions &options = {});

    /// J(h) for a single h.
    double envelope_integral(const SubordinatorModel &model, const BoundaryPair &boundary, double h, double w_h);

    /// (J for 2w minus J for w, int_{f(wg)}^{f(2wg)} Pibar(g(s)) ds) at one h; both should agree.
    std::pair<double, double> envelope_additivity(const SubordinatorModel &model, const BoundaryPair &boundary,
                                                  double h, double w_h);

    void write_envelope_csv(const EnvelopeResult &result, const std::string &file);

    struct EnvelopeEmpirical
    {
        std::vector<double> h;
        std::vector<MonteCarloEstimate> q; ///< P(X_h >= w(h) g(h) | O_T)
        std::size_t accepted = 0;
        std::size_t attempts = 0;
        bool partial = false;
    };

    /// Fractions of one conditioned-at-T sample, one checkpoint per h (all h < T).
    EnvelopeEmpirical envelope_empirical(const CrossingScenario &scenario, const GrowthFn &w,
                                         const std::vector<double> &h_values, double T, std::size_t n_accept,
                                         std::size_t max_attempts, std::uint64_t seed, unsigned workers);

    /// Same, for several w evaluated on one shared conditioned sample.
    std::vector<EnvelopeEmpirical> envelope_empirical(const CrossingScenario &scenario, const std::vector<GrowthFn> &ws,
                                                      const std::vector<double> &h_values, double T,
                                                      std::size_t n_accept, std::size_t max_attempts,
                                                      std::uint64_t seed, unsigned workers);

    void write_envelope_empirical_csv(const EnvelopeEmpirical &result, const std::string &file);

    struct EnvelopeTrend
    {
        bool consistent = false;
        std::string description;
    };

    /// InEnvelope: every step q(h_i) -> q(h_{i+1}) is nondecreasing within z combined SE.
    /// NotInEnvelope: the final q is below 1 by more than z SE and not above the first q by more than z SE.
    /// Indeterminate is never consistent.
    EnvelopeTrend envelope_trend(const EnvelopeEmpirical &result, EnvelopeVerdict verdict, double z = 3.0);
} // namespace csl
