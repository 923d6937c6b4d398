#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace csl
{
    /// Raised when a numerical routine cannot produce a trustworthy value.
    class NumericError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    struct QuadratureResult
    {
        double value = 0.0;
        double error = 0.0;
    };

    /// Adaptive double-exponential quadrature on [a, b]. Integrable endpoint
    /// singularities are fine; b may be +infinity.
    QuadratureResult integrate(const std::function<double(double)> &f, double a, double b,
                               double rel_tol = 1e-10);

    /// Same as integrate() but throws NumericError unless error <= rel_tol * |value| + abs_tol.
    double integrate_checked(const std::function<double(double)> &f, double a, double b,
                             double rel_tol, double abs_tol, const std::string &what);

    /// Integral over [a, b] with 0 < a < b computed in the variable v = log(s).
    /// Suited to integrands spread over many decades.
    double integrate_log(const std::function<double(double)> &f, double a, double b,
                         double rel_tol = 1e-9);
} // namespace csl
