#pragma once

#include "csl/boundary.hpp"
#include "csl/model.hpp"

#include <string>
#include <vector>

namespace csl
{
    enum class Transience
    {
        Transient,
        Recurrent,
        Indeterminate
    };

    std::string to_string(Transience v);

    /// One doubling segment [y_lo, y_hi] of the integral I(f) = int_0^inf Pibar(1 v g(y)) dy.
    struct TransienceSegment
    {
        double y_lo = 0.0;
        double y_hi = 0.0;
        double integrand_hi = 0.0; ///< Pibar(1 v g(y_hi))
        double partial = 0.0;      ///< integral over [0, y_hi]
        double slope = 0.0;        ///< log-log slope of the integrand over this segment
    };

    struct TransienceResult
    {
        Transience verdict = Transience::Indeterminate;
        double value = 0.0;            ///< I(f) when Transient; last partial integral otherwise
        double tail_estimate = 0.0;    ///< extrapolated remainder added to the partial integral
        std::string reason;
        std::vector<TransienceSegment> segments;
    };

    struct TransienceOptions
    {
        double y_max = 1e250;          ///< last upper limit tried
        double remainder_rtol = 1e-6;  ///< Transient once the extrapolated tail is this small
        double decades = 2.0;          ///< window over which a slope regime must persist
        /// Slopes >= -1 - log_allowance/log(y) count as divergent. 1 separates
        /// dy/(y log y) (divergent) from dy/(y log^2 y) (convergent); 1.5 sits between.
        double log_allowance = 1.5;
        /// Recurrent needs the divergent regime to still hold here; at 1e40 the threshold is -1.016.
        double recurrent_y_min = 1e40;
    };

    /// Transient/recurrent criterion via I(f) = int_0^inf Pibar(1 v g(y)) dy, integrated over
    /// geometrically doubling segments. Throws std::domain_error when f is bounded.
    TransienceResult classify_transience(const SubordinatorModel &model, const BoundaryPair &boundary,
                                         const TransienceOptions &options = {});

    /// Direct form int_1^inf f(x) u(x) dx of the same integral (needs a jump density).
    /// Returns +inf when the integral visibly diverges on [1, 1e300].
    double transience_integral_direct(const SubordinatorModel &model, const BoundaryPair &boundary);
} // namespace csl
