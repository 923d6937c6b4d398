#pragma once

#include "csl/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace csl
{
    /// Increasing local-time constraint f with f(0) in (0, 1) and its inverse g,
    /// extended by g(x) = 0 on [0, f(0)).
    ///
    /// The closed-form families start from a base curve b(t) with b(0) < 1 and set
    /// f(t) = max(f0, b(t)); g is then b^{-1} on [f0, inf) and 0 below f0.
    class BoundaryPair
    {
    public:
        /// f(t) = max(f0, t^gamma).
        static BoundaryPair monomial(double gamma, double f0 = 0.5);

        /// f(t) = max(f0, t^gamma / log(e + t)^log_power). g is found numerically.
        static BoundaryPair monolog(double gamma, double log_power, double f0 = 0.5);

        /// Arbitrary increasing f with inverse g and optional derivative. f(0) must lie in (0, 1).
        static BoundaryPair from_functions(RealFn f, RealFn g, std::optional<RealFn> fprime = std::nullopt,
                                           std::string description = "custom");

        /// f given on a table of (t, f(t)) points with t[0] = 0, strictly increasing values,
        /// piecewise linear inside and power-law extrapolated past the last point.
        static BoundaryPair tabulated(std::vector<double> t, std::vector<double> f);

        double f(double t) const { return f_(t); }

        /// g(x), zero on [0, f(0)).
        double g(double x) const { return x < f0_ ? 0.0 : g_(x); }

        std::optional<double> fprime(double t) const;
        bool has_fprime() const noexcept { return fprime_.has_value(); }

        double f0() const noexcept { return f0_; }
        const std::string &description() const noexcept { return description_; }

        /// True when f keeps growing over the decades 1e3..1e12 (evidence that f -> inf).
        bool grows_without_bound() const;

    private:
        BoundaryPair() = default;

        RealFn f_;
        RealFn g_;
        std::optional<RealFn> fprime_;
        double f0_ = 0.5;
        std::string description_;
    };

    /// g_y^h(t) = g(t + h) - y.
    double shifted_boundary(const BoundaryPair &boundary, double y, double h, double t);

    /// t0(y) = f(A y) v f(1 + 2/A); requires A > 3 and A > B - 1.
    double t0(const BoundaryPair &boundary, double y, double A, double B = 1.0);
} // namespace csl
