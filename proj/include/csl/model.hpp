#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace csl
{
    using RealFn = std::function<double(double)>;

    /// Stable subordinator parameters. The tail is normalised so that the
    /// Laplace exponent is exactly scale * lambda^alpha.
    struct StableParams
    {
        double alpha = 0.5;
        double scale = 1.0;
    };

    /// Law of a subordinator: linear drift plus a Levy measure given through
    /// its tail Pibar(x) = Pi((x, inf)) and, optionally, a density u.
    class SubordinatorModel
    {
    public:
        static SubordinatorModel stable(double alpha, double scale, double drift = 0.0);
        static SubordinatorModel custom(double drift, RealFn tail, std::optional<RealFn> density = std::nullopt);

        /// Tail given on a table of (x, Pibar(x)) points, interpolated piecewise
        /// power-law (linear in log-log) and extrapolated with the end slopes.
        static SubordinatorModel tabulated(double drift, std::vector<double> x, std::vector<double> tail);

        double drift() const noexcept { return drift_; }
        const std::optional<StableParams> &stable_params() const noexcept { return stable_; }
        bool has_density() const noexcept { return stable_.has_value() || density_.has_value(); }
        const std::string &description() const noexcept { return description_; }

        /// Pibar(x) for x > 0, without argument checks.
        double tail(double x) const;

        /// Jump density u(x). Throws std::logic_error when the model has none.
        double density(double x) const;

        /// int_0^eps x Pi(dx): the mean rate of mass carried by jumps of size <= eps.
        double small_jump_mean(double eps) const;

        /// m(a) = int_0^a Pibar(x) dx.
        double tail_integral(double a) const;

        /// Smallest x with Pibar(x) <= level (level > 0).
        double tail_inverse(double level) const;

    private:
        SubordinatorModel() = default;

        double drift_ = 0.0;
        std::optional<StableParams> stable_;
        RealFn tail_;
        std::optional<RealFn> density_;
        std::string description_;
    };

    /// Pibar(x); closed form for stable models. Throws std::domain_error for x <= 0.
    double tail_eval(const SubordinatorModel &model, double x);

    /// Laplace exponent d*lambda + int (1 - e^{-lambda x}) Pi(dx). Stable models use
    /// the closed form scale * lambda^alpha.
    double laplace_exponent(const SubordinatorModel &model, double lambda);

    /// Laplace exponent by adaptive quadrature of the jump density, split at x = 1.
    /// Throws NumericError on non-convergence and std::invalid_argument without a density.
    double laplace_exponent_quadrature(const SubordinatorModel &model, double lambda);

    struct ModelCheck
    {
        bool tail_nonincreasing = true;
        bool small_jumps_integrable = true;
        bool stable_normalisation_ok = true;
        std::vector<std::string> notes;

        bool ok() const noexcept { return tail_nonincreasing && small_jumps_integrable && stable_normalisation_ok; }
    };

    /// Spot-checks the model invariants on logarithmic grids.
    ModelCheck check_model(const SubordinatorModel &model);
} // namespace csl
