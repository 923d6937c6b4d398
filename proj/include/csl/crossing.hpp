#pragma once

#include "csl/boundary.hpp"
#include "csl/model.hpp"
#include "csl/path.hpp"
#include "csl/rng.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace csl
{
    inline constexpr double kNoViolation = std::numeric_limits<double>::infinity();

    /// Selects the shifted boundary g_y^h(t) = g(t + h) - y.
    struct Shift
    {
        double y = 0.0;
        double h = 0.0;
    };

    /// Violation rule of the event {X_s >= g(s + h) - y for all s <= u}, in deadline form:
    /// X_s violates at s iff s > D(X_s) with D(x) = f(x + y) - h (and D = -inf when x + y < 0).
    class Barrier
    {
    public:
        explicit Barrier(const BoundaryPair &boundary, std::optional<Shift> shift = std::nullopt);

        double deadline(double x) const;

        /// The boundary curve g(s + h) - y itself.
        double level(double s) const { return boundary_->g(s + h_) - y_; }

        bool violated(double s, double x) const { return x < level(s); }

    private:
        const BoundaryPair *boundary_;
        double y_ = 0.0;
        double h_ = 0.0;
    };

    struct SimulationParams
    {
        std::optional<double> cutoff;           ///< default solves Pibar(eps) = jumps_per_unit_time
        double jumps_per_unit_time = 1e3;
        std::optional<double> truncation;       ///< simulate X^(0,a)
        double horizon = 100.0;
    };

    struct CrossingScenario
    {
        SubordinatorModel model;
        BoundaryPair boundary;
        std::optional<Shift> shift;
        SimulationParams sim;

        double cutoff() const;
        JumpLaw jump_law() const;
        Barrier barrier() const { return Barrier(boundary, shift); }
        CrossingScenario with_shift(std::optional<Shift> s) const;
        CrossingScenario with_horizon(double horizon) const;
    };

    struct MonteCarloEstimate
    {
        double value = 0.0;
        double std_error = 0.0;
        std::size_t n = 0;
        std::uint64_t seed_fingerprint = 0;
    };

    /// Mean and sample-sd/sqrt(n) standard error of n Bernoulli outcomes with k successes.
    MonteCarloEstimate proportion_estimate(std::size_t k, std::size_t n, std::uint64_t fingerprint = 0);

    /// First violation time in [0, horizon] of a step-plus-linear path, kNoViolation if none.
    double violation_time(const SamplePath &path, const Barrier &barrier, double horizon);

    /// Extra observations made while simulating one path.
    struct PathProbe
    {
        std::vector<double> checkpoints;          ///< increasing times <= horizon at which X is recorded
        double big_jump_threshold = kNoViolation; ///< record the first jump above this size
    };

    struct PathOutcome
    {
        double sigma = kNoViolation;
        std::vector<double> checkpoint_values; ///< NaN for checkpoints after sigma
        std::optional<Jump> big_jump;          ///< first jump above the threshold before sigma and horizon
        std::size_t jumps = 0;
    };

    /// Simulates jumps until the first violation or `horizon`, whichever comes first. Stops
    /// early once D(X) >= horizon certifies survival and the probe has nothing left to record.
    PathOutcome simulate_violation(const JumpLaw &law, const Barrier &barrier, double horizon, Rng &rng,
                                   const PathProbe *probe = nullptr);

    /// Sorted violation times of n independent paths; kNoViolation for survivors.
    class SigmaSample
    {
    public:
        SigmaSample(std::vector<double> sigma, double horizon, std::uint64_t fingerprint);

        std::size_t n() const noexcept { return sigma_.size(); }
        double horizon() const noexcept { return horizon_; }
        const std::vector<double> &sorted() const noexcept { return sigma_; }

        /// P(O_u) = P(sigma > u).
        MonteCarloEstimate survival(double u) const;

        /// Phi(t) = E[min(sigma, t)].
        MonteCarloEstimate phi(double t) const;

    private:
        std::vector<double> sigma_;
        std::vector<double> prefix_;
        std::vector<double> prefix_sq_;
        double horizon_;
        std::uint64_t fingerprint_;
    };

    SigmaSample sample_sigmas(const CrossingScenario &scenario, std::size_t n, std::uint64_t seed,
                              unsigned workers);

    struct CrossingPoint
    {
        double u = 0.0;
        MonteCarloEstimate p_o;
        MonteCarloEstimate phi;
    };

    std::vector<CrossingPoint> estimate_crossing(const CrossingScenario &scenario, const std::vector<double> &u_grid,
                                                 std::size_t n, std::uint64_t seed, unsigned workers);

    struct DiagnosticRow
    {
        double t = 0.0;
        MonteCarloEstimate p_o;
        MonteCarloEstimate phi;
        double tail_g = 0.0;   ///< Pibar(g(t)), or of g_y^h(t) when shifted
        double rho = 0.0;
        double ratio = 0.0;    ///< P(O_t) / (Pibar(g(t)) Phi(t))
        double ratio_se = 0.0;
        double phi_recon = 0.0;
        bool small_count = false;
    };

    struct DiagnosticsOptions
    {
        double t_ref = 1.0;            ///< reconstruction anchor; t0(y) for shifted scenarios
        int points_per_decade = 200;   ///< dense log grid for the reconstruction integral
        std::size_t small_count = 10;  ///< fewer survivors than this set the flag
    };

    struct Diagnostics
    {
        std::vector<DiagnosticRow> rows;
        std::vector<std::string> warnings;
    };

    /// rho, the ratio of Lemma-1 type and the ODE reconstruction Phi(t_ref) exp(int P/Phi), all
    /// from one sigma sample. t_grid must lie above f(0) and within the horizon.
    Diagnostics asymptotic_diagnostics(const CrossingScenario &scenario, const SigmaSample &sample,
                                       const std::vector<double> &t_grid, const DiagnosticsOptions &options = {});

    void write_crossing_csv(const Diagnostics &diag, const std::string &file);
} // namespace csl
