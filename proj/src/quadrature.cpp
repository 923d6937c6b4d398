#include "csl/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace csl
{
    QuadratureResult integrate(const std::function<double(double)> &f, double a, double b, double rel_tol)
    {
        if (!(a <= b))
            throw std::domain_error("integrate: require a <= b");
        if (a == b)
            return {};
        QuadratureResult out;
        try
        {
            if (std::isinf(b))
            {
                boost::math::quadrature::exp_sinh<double> integrator;
                double l1 = 0.0;
                out.value = integrator.integrate(f, a, b, rel_tol, &out.error, &l1);
            }
            else
            {
                boost::math::quadrature::tanh_sinh<double> integrator;
                double l1 = 0.0;
                out.value = integrator.integrate(f, a, b, rel_tol, &out.error, &l1);
            }
        }
        catch (const std::exception &e)
        {
            throw NumericError(std::string("quadrature failed: ") + e.what());
        }
        if (!std::isfinite(out.value))
            throw NumericError("quadrature produced a non-finite value");
        return out;
    }

    double integrate_checked(const std::function<double(double)> &f, double a, double b, double rel_tol,
                             double abs_tol, const std::string &what)
    {
        const auto r = integrate(f, a, b, rel_tol);
        if (!(r.error <= rel_tol * std::abs(r.value) + abs_tol))
        {
            throw NumericError(what + ": quadrature did not converge (value=" + std::to_string(r.value) +
                               ", error estimate=" + std::to_string(r.error) + ")");
        }
        return r.value;
    }

    double integrate_log(const std::function<double(double)> &f, double a, double b, double rel_tol)
    {
        if (!(a > 0.0) || !(a <= b))
            throw std::domain_error("integrate_log: require 0 < a <= b");
        if (std::isinf(b))
            throw std::domain_error("integrate_log: upper limit must be finite");
        const double lo = std::log(a);
        const double hi = std::log(b);
        if (hi <= lo)
            return 0.0;
        auto g = [&f](double v) {
            const double s = std::exp(v);
            return s * f(s);
        };
        // One decade per panel keeps every panel smooth for power-law-like integrands.
        const double panel = std::log(10.0);
        const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / panel)));
        const double width = (hi - lo) / panels;
        double total = 0.0;
        for (int k = 0; k < panels; ++k)
        {
            const double x0 = lo + k * width;
            const double x1 = (k + 1 == panels) ? hi : x0 + width;
            double err = 0.0;
            const double v =
                boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, x0, x1, 12, rel_tol, &err);
            if (!std::isfinite(v))
                throw NumericError("integrate_log: non-finite panel value");
            total += v;
        }
        return total;
    }
} // namespace csl
