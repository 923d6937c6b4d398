#pragma once

#include "csl/model.hpp"
#include "csl/rng.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace csl
{
    struct Jump
    {
        double time = 0.0;
        double size = 0.0;
    };

    /// Jumps larger than `cutoff` (and at most `truncation`) of a subordinator;
    /// smaller jumps are replaced by their mean drift.
    class JumpLaw
    {
    public:
        JumpLaw(SubordinatorModel model, double cutoff, std::optional<double> truncation = std::nullopt);

        const SubordinatorModel &model() const noexcept { return model_; }
        double cutoff() const noexcept { return cutoff_; }
        const std::optional<double> &truncation() const noexcept { return truncation_; }

        /// Pibar(eps) - Pibar(a): Poisson rate of simulated jumps.
        double rate() const noexcept { return rate_; }

        /// d + int_0^eps x Pi(dx).
        double drift_slope() const noexcept { return drift_slope_; }

        /// Jump size from the law of Pi restricted to (eps, a], by inversion of the tail at
        /// level Pibar(a) + w (Pibar(eps) - Pibar(a)), w in (0, 1).
        double size_at(double w) const;

        double sample_size(Rng &rng) const { return size_at(rng.uniform()); }

    private:
        SubordinatorModel model_;
        double cutoff_;
        std::optional<double> truncation_;
        double tail_a_ = 0.0;
        double rate_ = 0.0;
        double drift_slope_ = 0.0;
        double stable_k_ = 0.0;
        double stable_alpha_ = 0.0;
    };

    /// Jumps generated one at a time, in increasing time order.
    class JumpStream
    {
    public:
        JumpStream(const JumpLaw &law, Rng &rng) : law_(law), rng_(rng) {}

        Jump next()
        {
            time_ += rng_.exponential() / law_.rate();
            return {time_, law_.sample_size(rng_)};
        }

    private:
        const JumpLaw &law_;
        Rng &rng_;
        double time_ = 0.0;
    };

    struct SamplePath
    {
        double horizon = 0.0;
        std::vector<Jump> jumps; ///< strictly increasing times in (0, horizon]
        double drift_slope = 0.0;
        double cutoff = 0.0;
        std::optional<double> truncation;
    };

    /// Cutoff eps with Pibar(eps) = jumps_per_unit_time.
    double default_cutoff(const SubordinatorModel &model, double jumps_per_unit_time = 1e3);

    SamplePath sample_path(const JumpLaw &law, double horizon, Rng &rng);
    SamplePath sample_path(const SubordinatorModel &model, double horizon, double cutoff,
                           std::optional<double> truncation, const RngStream &stream);

    /// X_t = drift_slope * t + sum of jumps at times <= t. Throws std::domain_error outside [0, horizon].
    double path_value(const SamplePath &path, double t);

    /// Earliest jump larger than x. Throws std::domain_error when x <= cutoff.
    std::optional<Jump> first_big_jump(const SamplePath &path, double x);

    /// CSV with header t,jump_size,cum_value; one row per jump, cum_value = X at the jump time.
    void write_path_csv(const SamplePath &path, std::ostream &out);
    void write_path_csv(const SamplePath &path, const std::string &file);

    /// %.17g formatting used by every CSV writer.
    std::string format_double(double v);
} // namespace csl
