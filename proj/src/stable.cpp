#include "csl/stable.hpp"

#include "csl/quadrature.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <stdexcept>

namespace csl
{
    namespace
    {
        constexpr double kPi = boost::math::constants::pi<double>();

        void check_alpha(double alpha)
        {
            if (!(alpha > 0.0 && alpha < 1.0))
                throw std::domain_error("stable: alpha must lie in (0, 1)");
        }
    } // namespace

    double kanter_a(double alpha, double u)
    {
        return std::pow(std::sin(alpha * u), alpha / (1.0 - alpha)) * std::sin((1.0 - alpha) * u) /
               std::pow(std::sin(u), 1.0 / (1.0 - alpha));
    }

    double sample_stable_value(double alpha, double c, double t, Rng &rng)
    {
        check_alpha(alpha);
        if (!(t > 0.0) || !(c > 0.0))
            throw std::domain_error("sample_stable_value: t and c must be positive");
        const double u = kPi * rng.uniform();
        const double e = rng.exponential();
        const double s = std::pow(kanter_a(alpha, u) / e, (1.0 - alpha) / alpha);
        return std::pow(c * t, 1.0 / alpha) * s;
    }

    double stable_transition_cdf(const StableParams &params, double t, double x)
    {
        check_alpha(params.alpha);
        if (!(t > 0.0))
            throw std::domain_error("stable_transition_cdf: t must be positive");
        if (!(x > 0.0))
            return 0.0;
        const double a = params.alpha;
        const double z = x / std::pow(params.scale * t, 1.0 / a);
        const double zk = std::pow(z, -a / (1.0 - a));
        auto integrand = [&](double u) {
            const double e = kanter_a(a, u) * zk;
            return std::isfinite(e) && e < 745.0 ? std::exp(-e) : 0.0;
        };
        return integrate(integrand, 0.0, kPi, 1e-12).value / kPi;
    }

    double stable_transition_density(const StableParams &params, double t, double x)
    {
        check_alpha(params.alpha);
        if (!(t > 0.0))
            throw std::domain_error("stable_transition_density: t must be positive");
        if (!(x > 0.0))
            return 0.0;
        const double a = params.alpha;
        const double scale = std::pow(params.scale * t, 1.0 / a);
        const double z = x / scale;
        const double kappa = a / (1.0 - a);
        const double zk = std::pow(z, -kappa);
        auto integrand = [&](double u) {
            const double A = kanter_a(a, u);
            const double e = A * zk;
            return std::isfinite(e) && e < 745.0 ? A * std::exp(-e) : 0.0;
        };
        const double integral = integrate(integrand, 0.0, kPi, 1e-10).value;
        return kappa * zk / z * integral / kPi / scale;
    }
} // namespace csl
