#pragma once

#include "csl/model.hpp"
#include "csl/rng.hpp"

namespace csl
{
    /// Kanter's function A(u) on (0, pi): a positive stable S with E e^{-l S} = e^{-l^alpha}
    /// is (A(U)/E)^{(1-alpha)/alpha} for U ~ Unif(0, pi), E ~ Exp(1).
    double kanter_a(double alpha, double u);

    /// Exact draw of X_t for the stable subordinator with Laplace exponent c * lambda^alpha.
    double sample_stable_value(double alpha, double c, double t, Rng &rng);

    /// P(X_t <= x), by quadrature of Kanter's representation.
    double stable_transition_cdf(const StableParams &params, double t, double x);

    /// Density of X_t at x, same representation.
    double stable_transition_density(const StableParams &params, double t, double x);
} // namespace csl
