#pragma once

#include <functional>
#include <vector>

namespace csl
{
    struct KsResult
    {
        double statistic = 0.0; ///< sup |F_n - F|
        double p_value = 0.0;
        double n_effective = 0.0;
    };

    /// Kolmogorov survival function Q(l) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 l^2).
    double kolmogorov_q(double lambda);

    /// Asymptotic p-value with Stephens' small-sample correction l = (sqrt(n) + 0.12 + 0.11/sqrt(n)) D.
    double ks_p_value(double d, double n_effective);

    /// One-sample test against a continuous CDF. `sample` is sorted in place.
    KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)> &cdf);

    /// Two-sample test, n_effective = n1 n2 / (n1 + n2). Inputs are sorted in place.
    KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
} // namespace csl
