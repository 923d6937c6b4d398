#include "csl/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace csl
{
    namespace
    {
        constexpr double kInf = std::numeric_limits<double>::infinity();

        /// Inverse of an increasing function by bisection in log t on [1e-300, 1e300].
        double invert_increasing(const RealFn &base, double x)
        {
            double lo = -690.0;
            double hi = 690.0;
            if (base(std::exp(hi)) < x)
                return kInf;
            if (base(std::exp(lo)) >= x)
                return std::exp(lo);
            for (int it = 0; it < 200; ++it)
            {
                const double mid = 0.5 * (lo + hi);
                if (base(std::exp(mid)) < x)
                    lo = mid;
                else
                    hi = mid;
                if (hi - lo <= 4e-16 * std::max(1.0, std::abs(hi)))
                    break;
            }
            return std::exp(0.5 * (lo + hi));
        }
    } // namespace

    BoundaryPair BoundaryPair::monomial(double gamma, double f0)
    {
        if (!(gamma > 0.0))
            throw std::domain_error("monomial boundary: gamma must be positive");
        if (!(f0 > 0.0 && f0 < 1.0))
            throw std::domain_error("boundary: f(0) must lie in (0, 1)");
        BoundaryPair b;
        b.f0_ = f0;
        b.f_ = [gamma, f0](double t) { return std::max(f0, std::pow(t, gamma)); };
        b.g_ = [gamma](double x) { return std::pow(x, 1.0 / gamma); };
        b.fprime_ = [gamma, f0](double t) {
            return std::pow(t, gamma) > f0 ? gamma * std::pow(t, gamma - 1.0) : 0.0;
        };
        std::ostringstream os;
        os << "t^" << gamma;
        b.description_ = os.str();
        return b;
    }

    BoundaryPair BoundaryPair::monolog(double gamma, double log_power, double f0)
    {
        if (!(gamma > 0.0))
            throw std::domain_error("monolog boundary: gamma must be positive");
        if (!(log_power >= 0.0))
            throw std::domain_error("monolog boundary: log power must be nonnegative");
        if (!(f0 > 0.0 && f0 < 1.0))
            throw std::domain_error("boundary: f(0) must lie in (0, 1)");
        const double e = std::exp(1.0);
        auto base = [gamma, log_power, e](double t) { return std::pow(t, gamma) / std::pow(std::log(e + t), log_power); };
        auto base_prime = [gamma, log_power, e, base](double t) {
            if (t <= 0.0)
                return 0.0;
            const double l = std::log(e + t);
            return base(t) * (gamma / t - log_power / ((e + t) * l));
        };
        // The base curve must be increasing for the inverse to exist.
        for (int k = -12; k <= 60; ++k)
        {
            const double t = std::pow(10.0, 0.5 * k);
            if (!(base_prime(t) > 0.0))
                throw std::domain_error("monolog boundary: base curve is not increasing");
        }
        BoundaryPair b;
        b.f0_ = f0;
        b.f_ = [base, f0](double t) { return std::max(f0, base(t)); };
        b.g_ = [base](double x) { return invert_increasing(base, x); };
        b.fprime_ = [base, base_prime, f0](double t) { return base(t) > f0 ? base_prime(t) : 0.0; };
        std::ostringstream os;
        os << "t^" << gamma << "/log(e+t)^" << log_power;
        b.description_ = os.str();
        return b;
    }

    BoundaryPair BoundaryPair::from_functions(RealFn f, RealFn g, std::optional<RealFn> fprime,
                                              std::string description)
    {
        if (!f || !g)
            throw std::invalid_argument("boundary: f and g are required");
        const double f0 = f(0.0);
        if (!(f0 > 0.0 && f0 < 1.0))
            throw std::domain_error("boundary: f(0) must lie in (0, 1)");
        double prev = f0;
        for (int k = -6; k <= 12; ++k)
        {
            const double t = std::pow(10.0, 0.5 * k);
            const double v = f(t);
            if (v < prev)
                throw std::domain_error("boundary: f must be nondecreasing");
            prev = v;
        }
        BoundaryPair b;
        b.f0_ = f0;
        b.f_ = std::move(f);
        b.g_ = std::move(g);
        if (fprime && *fprime)
            b.fprime_ = std::move(fprime);
        b.description_ = std::move(description);
        return b;
    }

    BoundaryPair BoundaryPair::tabulated(std::vector<double> t, std::vector<double> f)
    {
        if (t.size() != f.size() || t.size() < 3)
            throw std::invalid_argument("tabulated boundary: need at least three (t, f) points");
        if (t.front() != 0.0)
            throw std::invalid_argument("tabulated boundary: first t must be 0");
        for (std::size_t i = 1; i < t.size(); ++i)
        {
            if (!(t[i] > t[i - 1]) || !(f[i] > f[i - 1]))
                throw std::invalid_argument("tabulated boundary: t and f must be strictly increasing");
        }
        const double tail_slope =
            std::log(f.back() / f[f.size() - 2]) / std::log(t.back() / t[t.size() - 2]);
        if (!(tail_slope > 0.0))
            throw std::invalid_argument("tabulated boundary: last segment must grow");
        auto ts = std::make_shared<std::vector<double>>(std::move(t));
        auto fs = std::make_shared<std::vector<double>>(std::move(f));
        auto fn = [ts, fs, tail_slope](double x) {
            const auto &T = *ts;
            const auto &F = *fs;
            if (x <= 0.0)
                return F.front();
            if (x >= T.back())
                return F.back() * std::pow(x / T.back(), tail_slope);
            const auto i = static_cast<std::size_t>(std::upper_bound(T.begin(), T.end(), x) - T.begin());
            const double w = (x - T[i - 1]) / (T[i] - T[i - 1]);
            return F[i - 1] + w * (F[i] - F[i - 1]);
        };
        auto inv = [ts, fs, tail_slope](double y) {
            const auto &T = *ts;
            const auto &F = *fs;
            if (y >= F.back())
                return T.back() * std::pow(y / F.back(), 1.0 / tail_slope);
            const auto i = static_cast<std::size_t>(std::upper_bound(F.begin(), F.end(), y) - F.begin());
            const double w = (y - F[i - 1]) / (F[i] - F[i - 1]);
            return T[i - 1] + w * (T[i] - T[i - 1]);
        };
        auto deriv = [ts, fs, tail_slope](double x) {
            const auto &T = *ts;
            const auto &F = *fs;
            if (x >= T.back())
                return tail_slope * F.back() * std::pow(x / T.back(), tail_slope) / x;
            auto i = static_cast<std::size_t>(std::upper_bound(T.begin(), T.end(), x) - T.begin());
            i = std::max<std::size_t>(i, 1);
            return (F[i] - F[i - 1]) / (T[i] - T[i - 1]);
        };
        return from_functions(fn, inv, RealFn(deriv), "tabulated");
    }

    std::optional<double> BoundaryPair::fprime(double t) const
    {
        if (!fprime_)
            return std::nullopt;
        return (*fprime_)(t);
    }

    bool BoundaryPair::grows_without_bound() const
    {
        double prev = f(1e3);
        for (int k = 4; k <= 12; ++k)
        {
            const double v = f(std::pow(10.0, k));
            if (!(v > prev * (1.0 + 1e-9)))
                return false;
            prev = v;
        }
        return true;
    }

    double shifted_boundary(const BoundaryPair &boundary, double y, double h, double t)
    {
        if (!(t >= 0.0))
            throw std::domain_error("shifted_boundary: t must be nonnegative");
        return boundary.g(t + h) - y;
    }

    double t0(const BoundaryPair &boundary, double y, double A, double B)
    {
        if (!(A > 3.0))
            throw std::domain_error("t0: A must exceed 3");
        if (!(A > B - 1.0))
            throw std::domain_error("t0: A must exceed B - 1");
        return std::max(boundary.f(A * y), boundary.f(1.0 + 2.0 / A));
    }
} // namespace csl
