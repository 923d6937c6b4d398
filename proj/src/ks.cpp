#include "csl/ks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csl
{
    double kolmogorov_q(double lambda)
    {
        if (lambda < 0.2)
            return 1.0;
        double sum = 0.0;
        double sign = 1.0;
        for (int k = 1; k <= 100; ++k)
        {
            const double term = std::exp(-2.0 * k * k * lambda * lambda);
            sum += sign * term;
            if (term < 1e-17 * sum)
                break;
            sign = -sign;
        }
        return std::clamp(2.0 * sum, 0.0, 1.0);
    }

    double ks_p_value(double d, double n_effective)
    {
        const double rn = std::sqrt(n_effective);
        return kolmogorov_q((rn + 0.12 + 0.11 / rn) * d);
    }

    KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)> &cdf)
    {
        if (sample.empty())
            throw std::domain_error("ks_one_sample: empty sample");
        std::sort(sample.begin(), sample.end());
        const double n = static_cast<double>(sample.size());
        double d = 0.0;
        for (std::size_t i = 0; i < sample.size(); ++i)
        {
            const double F = cdf(sample[i]);
            d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
        }
        return {d, ks_p_value(d, n), n};
    }

    KsResult ks_two_sample(std::vector<double> a, std::vector<double> b)
    {
        if (a.empty() || b.empty())
            throw std::domain_error("ks_two_sample: empty sample");
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        const double na = static_cast<double>(a.size());
        const double nb = static_cast<double>(b.size());
        std::size_t i = 0;
        std::size_t j = 0;
        double d = 0.0;
        while (i < a.size() && j < b.size())
        {
            const double x = std::min(a[i], b[j]);
            while (i < a.size() && a[i] <= x)
                ++i;
            while (j < b.size() && b[j] <= x)
                ++j;
            d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
        }
        const double ne = na * nb / (na + nb);
        return {d, ks_p_value(d, ne), ne};
    }
} // namespace csl
