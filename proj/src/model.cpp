#include "csl/model.hpp"

#include "csl/quadrature.hpp"

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

        double stable_tail_constant(const StableParams &p)
        {
            return p.scale / std::tgamma(1.0 - p.alpha);
        }

        struct TailTable
        {
            std::vector<double> log_x;
            std::vector<double> log_tail;
            std::vector<double> slope; // d log Pibar / d log x on each segment, plus end extrapolations

            double log_eval(double lx, double *local_slope) const
            {
                const auto n = log_x.size();
                std::size_t seg = 0;
                if (lx <= log_x.front())
                {
                    *local_slope = slope.front();
                    return log_tail.front() + slope.front() * (lx - log_x.front());
                }
                if (lx >= log_x.back())
                {
                    *local_slope = slope.back();
                    return log_tail.back() + slope.back() * (lx - log_x.back());
                }
                seg = static_cast<std::size_t>(std::upper_bound(log_x.begin(), log_x.end(), lx) - log_x.begin()) - 1;
                seg = std::min(seg, n - 2);
                *local_slope = slope[seg];
                return log_tail[seg] + slope[seg] * (lx - log_x[seg]);
            }
        };
    } // namespace

    SubordinatorModel SubordinatorModel::stable(double alpha, double scale, double drift)
    {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::domain_error("stable model: alpha must lie in (0, 1)");
        if (!(scale > 0.0))
            throw std::domain_error("stable model: scale must be positive");
        if (!(drift >= 0.0))
            throw std::domain_error("stable model: drift must be nonnegative");
        SubordinatorModel m;
        m.drift_ = drift;
        m.stable_ = StableParams{alpha, scale};
        const double k = stable_tail_constant(*m.stable_);
        m.tail_ = [k, alpha](double x) { return k * std::pow(x, -alpha); };
        m.density_ = [k, alpha](double x) { return k * alpha * std::pow(x, -1.0 - alpha); };
        std::ostringstream os;
        os << "stable(alpha=" << alpha << ", scale=" << scale << ", drift=" << drift << ")";
        m.description_ = os.str();
        return m;
    }

    SubordinatorModel SubordinatorModel::custom(double drift, RealFn tail, std::optional<RealFn> density)
    {
        if (!(drift >= 0.0))
            throw std::domain_error("custom model: drift must be nonnegative");
        if (!tail)
            throw std::invalid_argument("custom model: tail function is required");
        SubordinatorModel m;
        m.drift_ = drift;
        m.tail_ = std::move(tail);
        if (density && *density)
            m.density_ = std::move(density);
        m.description_ = "custom";
        return m;
    }

    SubordinatorModel SubordinatorModel::tabulated(double drift, std::vector<double> x, std::vector<double> tail)
    {
        if (x.size() != tail.size() || x.size() < 2)
            throw std::invalid_argument("tabulated tail: need at least two (x, tail) points");
        auto table = std::make_shared<TailTable>();
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            if (!(x[i] > 0.0) || !(tail[i] > 0.0))
                throw std::invalid_argument("tabulated tail: x and tail values must be positive");
            if (i > 0 && !(x[i] > x[i - 1]))
                throw std::invalid_argument("tabulated tail: x must be strictly increasing");
            if (i > 0 && tail[i] > tail[i - 1])
                throw std::invalid_argument("tabulated tail: tail must be nonincreasing");
            table->log_x.push_back(std::log(x[i]));
            table->log_tail.push_back(std::log(tail[i]));
        }
        for (std::size_t i = 0; i + 1 < x.size(); ++i)
        {
            table->slope.push_back((table->log_tail[i + 1] - table->log_tail[i]) /
                                   (table->log_x[i + 1] - table->log_x[i]));
        }
        // Below the table the tail must blow up slower than x^-1 for integrability of x Pi(dx);
        // above it must decay.
        if (!(table->slope.front() > -1.0))
            throw std::invalid_argument("tabulated tail: first segment slope must exceed -1");
        if (!(table->slope.back() < 0.0))
            throw std::invalid_argument("tabulated tail: last segment slope must be negative");

        SubordinatorModel m = custom(
            drift,
            [table](double xx) {
                double s = 0.0;
                return std::exp(table->log_eval(std::log(xx), &s));
            },
            RealFn([table](double xx) {
                double s = 0.0;
                const double t = std::exp(table->log_eval(std::log(xx), &s));
                return -s * t / xx;
            }));
        m.description_ = "tabulated";
        return m;
    }

    double SubordinatorModel::tail(double x) const
    {
        return tail_(x);
    }

    double SubordinatorModel::density(double x) const
    {
        if (!density_)
            throw std::logic_error("model has no jump density");
        return (*density_)(x);
    }

    double SubordinatorModel::small_jump_mean(double eps) const
    {
        if (!(eps > 0.0))
            throw std::domain_error("small_jump_mean: eps must be positive");
        if (stable_)
        {
            const double a = stable_->alpha;
            return stable_tail_constant(*stable_) * a / (1.0 - a) * std::pow(eps, 1.0 - a);
        }
        // int_0^eps x Pi(dx) = int_0^eps (Pibar(x) - Pibar(eps)) dx
        const double tail_eps = tail_(eps);
        if (!std::isfinite(tail_eps))
            throw NumericError("small_jump_mean: Pibar(eps) is not finite");
        auto integrand = [&](double x) { return tail_(x) - tail_eps; };
        return integrate_checked(integrand, 0.0, eps, 1e-8, 1e-300, "small_jump_mean");
    }

    double SubordinatorModel::tail_integral(double a) const
    {
        if (!(a > 0.0))
            throw std::domain_error("tail_integral: a must be positive");
        if (stable_)
        {
            const double al = stable_->alpha;
            return stable_tail_constant(*stable_) * std::pow(a, 1.0 - al) / (1.0 - al);
        }
        auto integrand = [&](double x) { return tail_(x); };
        return integrate_checked(integrand, 0.0, a, 1e-8, 1e-300, "tail_integral");
    }

    double SubordinatorModel::tail_inverse(double level) const
    {
        if (!(level > 0.0))
            throw std::domain_error("tail_inverse: level must be positive");
        if (stable_)
            return std::pow(stable_tail_constant(*stable_) / level, 1.0 / stable_->alpha);
        // Bisection in log x: find the smallest x with tail(x) <= level.
        double lo = -700.0;
        double hi = 700.0;
        if (tail_(std::exp(hi)) > level)
            throw NumericError("tail_inverse: tail never drops to the requested level");
        if (tail_(std::exp(lo)) <= level)
            return std::exp(lo);
        for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it)
        {
            const double mid = 0.5 * (lo + hi);
            if (tail_(std::exp(mid)) > level)
                lo = mid;
            else
                hi = mid;
        }
        return std::exp(hi);
    }

    double tail_eval(const SubordinatorModel &model, double x)
    {
        if (!(x > 0.0))
            throw std::domain_error("tail_eval: x must be positive");
        return model.tail(x);
    }

    double laplace_exponent(const SubordinatorModel &model, double lambda)
    {
        if (!(lambda >= 0.0))
            throw std::domain_error("laplace_exponent: lambda must be nonnegative");
        if (lambda == 0.0)
            return 0.0;
        if (const auto &sp = model.stable_params())
            return model.drift() * lambda + sp->scale * std::pow(lambda, sp->alpha);
        return laplace_exponent_quadrature(model, lambda);
    }

    double laplace_exponent_quadrature(const SubordinatorModel &model, double lambda)
    {
        if (!(lambda >= 0.0))
            throw std::domain_error("laplace_exponent: lambda must be nonnegative");
        if (!model.has_density())
            throw std::invalid_argument("laplace_exponent: quadrature needs a jump density");
        if (lambda == 0.0)
            return 0.0;
        // (0, a]: 1 - e^{-lambda x} = lambda x (1 + O(lambda a)); [b, inf): 1 - e^{-lambda x} = 1 - O(e^{-lambda b})
        const double a = 1e-12 / std::max(1.0, lambda);
        const double b = 1e12 / std::min(1.0, lambda);
        auto integrand = [&](double x) { return -std::expm1(-lambda * x) * model.density(x); };
        const double middle = integrate_log(integrand, a, b, 1e-12);
        return model.drift() * lambda + lambda * model.small_jump_mean(a) + middle + model.tail(b);
    }

    ModelCheck check_model(const SubordinatorModel &model)
    {
        ModelCheck out;
        double prev = kInf;
        for (int k = -40; k <= 40; ++k)
        {
            const double x = std::pow(10.0, 0.25 * k);
            const double t = model.tail(x);
            if (!(t >= 0.0))
            {
                out.tail_nonincreasing = false;
                out.notes.push_back("tail negative or NaN at x=" + std::to_string(x));
                break;
            }
            if (t > prev * (1.0 + 1e-12))
            {
                out.tail_nonincreasing = false;
                out.notes.push_back("tail increases near x=" + std::to_string(x));
                break;
            }
            prev = t;
        }
        try
        {
            const double m = model.small_jump_mean(1.0);
            if (!std::isfinite(m))
                out.small_jumps_integrable = false;
        }
        catch (const std::exception &e)
        {
            out.small_jumps_integrable = false;
            out.notes.push_back(std::string("int_0^1 x Pi(dx) not finite: ") + e.what());
        }
        if (const auto &sp = model.stable_params())
        {
            for (double x : {0.01, 1.0, 100.0})
            {
                const double expect = sp->scale * std::pow(x, -sp->alpha) / std::tgamma(1.0 - sp->alpha);
                if (std::abs(model.tail(x) - expect) > 1e-12 * expect)
                    out.stable_normalisation_ok = false;
            }
        }
        return out;
    }
} // namespace csl
