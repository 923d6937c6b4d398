#include "csl/transience.hpp"

#include "csl/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace csl
{
    std::string to_string(Transience v)
    {
        switch (v)
        {
        case Transience::Transient:
            return "Transient";
        case Transience::Recurrent:
            return "Recurrent";
        case Transience::Indeterminate:
            return "Indeterminate";
        }
        return "Indeterminate";
    }

    namespace
    {
        double segment_integral(const std::function<double(double)> &F, double a, double b,
                                const std::vector<double> &kinks)
        {
            std::vector<double> pts{a};
            for (double k : kinks)
            {
                if (k > a && k < b)
                    pts.push_back(k);
            }
            pts.push_back(b);
            double total = 0.0;
            for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            {
                double err = 0.0;
                total += boost::math::quadrature::gauss_kronrod<double, 21>::integrate(F, pts[i], pts[i + 1], 15,
                                                                                      1e-12, &err);
            }
            if (!std::isfinite(total))
                throw NumericError("classify_transience: non-finite segment integral");
            return total;
        }
    } // namespace

    TransienceResult classify_transience(const SubordinatorModel &model, const BoundaryPair &boundary,
                                         const TransienceOptions &options)
    {
        if (!boundary.grows_without_bound())
            throw std::domain_error("classify_transience: f must increase to infinity");

        auto F = [&](double y) { return model.tail(std::max(1.0, boundary.g(y))); };
        const std::vector<double> kinks{boundary.f0(), boundary.f(1.0)};
        // Slope tests only make sense once g(y) > 1 and log(y) is not tiny.
        const double y_start = std::max(16.0, 4.0 * boundary.f(1.0));
        const auto window = static_cast<std::size_t>(std::ceil(options.decades * std::log2(10.0)));

        TransienceResult out;
        double partial = segment_integral(F, 0.0, 1.0, kinks);
        double y_lo = 1.0;
        double f_lo = F(1.0);
        out.segments.push_back({0.0, 1.0, f_lo, partial, 0.0});

        std::size_t convergent_run = 0;
        std::size_t divergent_run = 0;
        while (true)
        {
            const double y_hi = 2.0 * y_lo;
            const double f_hi = F(y_hi);
            if (!(f_hi >= 0.0))
            {
                out.verdict = Transience::Indeterminate;
                out.reason = "integrand is negative or NaN at y=" + std::to_string(y_hi);
                out.value = partial;
                return out;
            }
            if (f_hi > f_lo * (1.0 + 1e-9))
            {
                out.verdict = Transience::Indeterminate;
                out.reason = "integrand increases near y=" + std::to_string(y_hi) + " (tail not monotone)";
                out.value = partial;
                return out;
            }
            partial += segment_integral(F, y_lo, y_hi, kinks);
            const double slope = (f_lo > 0.0 && f_hi > 0.0) ? std::log(f_hi / f_lo) / std::log(2.0)
                                                            : -std::numeric_limits<double>::infinity();
            out.segments.push_back({y_lo, y_hi, f_hi, partial, slope});

            if (f_hi == 0.0)
            {
                out.verdict = Transience::Transient;
                out.value = partial;
                out.reason = "integrand vanishes beyond y=" + std::to_string(y_hi);
                return out;
            }

            if (y_lo >= y_start)
            {
                const double threshold = -1.0 - options.log_allowance / std::log(std::sqrt(y_lo * y_hi));
                if (slope >= threshold)
                {
                    ++divergent_run;
                    convergent_run = 0;
                }
                else
                {
                    ++convergent_run;
                    divergent_run = 0;
                }
                if (divergent_run >= window && y_hi >= options.recurrent_y_min)
                {
                    out.verdict = Transience::Recurrent;
                    out.value = partial;
                    out.reason = "integrand log-log slope >= -1 (up to log corrections) sustained over " +
                                 std::to_string(options.decades) + " decades ending at y=" + std::to_string(y_hi);
                    return out;
                }
                if (convergent_run >= window)
                {
                    const double remainder = y_hi * f_hi / (-1.0 - slope);
                    if (remainder <= options.remainder_rtol * partial)
                    {
                        out.verdict = Transience::Transient;
                        out.tail_estimate = remainder;
                        out.value = partial + remainder;
                        out.reason = "converged; extrapolated tail " + std::to_string(remainder);
                        return out;
                    }
                }
            }

            if (y_hi >= options.y_max)
            {
                out.value = partial;
                if (convergent_run >= window)
                {
                    const double remainder = y_hi * f_hi / (-1.0 - slope);
                    if (remainder <= 1e-3 * partial)
                    {
                        out.verdict = Transience::Transient;
                        out.tail_estimate = remainder;
                        out.value = partial + remainder;
                        out.reason = "slowly converging; extrapolated tail " + std::to_string(remainder);
                        return out;
                    }
                }
                out.verdict = Transience::Indeterminate;
                out.reason = "no sustained slope regime before y_max";
                return out;
            }
            y_lo = y_hi;
            f_lo = f_hi;
        }
    }

    double transience_integral_direct(const SubordinatorModel &model, const BoundaryPair &boundary)
    {
        if (!model.has_density())
            throw std::invalid_argument("transience_integral_direct: model needs a jump density");
        auto integrand = [&](double x) { return boundary.f(x) * model.density(x); };
        try
        {
            const auto r = integrate(integrand, 1.0, std::numeric_limits<double>::infinity(), 1e-10);
            if (!std::isfinite(r.value) || r.error > 1e-6 * std::abs(r.value))
                return std::numeric_limits<double>::infinity();
            return r.value;
        }
        catch (const NumericError &)
        {
            return std::numeric_limits<double>::infinity();
        }
    }
} // namespace csl
