#pragma once

#include "csl/boundary.hpp"
#include "csl/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace csl
{
    enum class RegularityCase
    {
        CaseI,
        CaseIA,
        CaseII
    };

    enum class Verdict
    {
        Pass,
        Fail,
        Indeterminate
    };

    std::string to_string(RegularityCase c);
    std::string to_string(Verdict v);

    /// Density of X_t at x.
    using TransitionDensity = std::function<double(double t, double x)>;

    struct ConditionCheck
    {
        std::string name;
        Verdict verdict = Verdict::Indeterminate;
        double statistic = 0.0; ///< trend statistic (log-log slope over the judged window unless noted)
        std::string detail;
        std::vector<std::pair<double, double>> evidence; ///< (grid point, value)
    };

    struct RegularityReport
    {
        RegularityCase case_id = RegularityCase::CaseI;
        double alpha_estimate = 0.0;
        std::vector<ConditionCheck> checks;

        /// Fail if any check fails, Pass if all pass, else Indeterminate.
        Verdict overall() const;
        const ConditionCheck *find(const std::string &name) const;
    };

    struct RegularityOptions
    {
        double beta = 2.0;           ///< exponent in t Pibar(g(t)/log(t)^beta) -> 0
        double shift = 1.0;          ///< g(t + shift)/g(t) -> 1
        double case2_epsilon = 0.1;  ///< t^(1+eps) Pibar(g(t)) -> 0
        double B = 1.0;              ///< x^N L(x) nondecreasing on (B, inf)
        double N = 1.0;
        double domination_constant = 10.0; ///< A in f_t(x) <= A t u(x)
        double x0 = 1.0;                   ///< offset in x >= g(t) + x0
        double t_start = 1e2;
        double t_end = 1e40;
        std::optional<TransitionDensity> transition_density; ///< required for CaseIA unless the model is stable
    };

    /// Grid evidence for the regularity conditions of the requested case. Missing
    /// ingredients (derivative, density) make the affected check Indeterminate.
    RegularityReport validate_regularity(const SubordinatorModel &model, const BoundaryPair &boundary,
                                         RegularityCase case_id, const RegularityOptions &options = {});

    /// Midpoint of ((1+2a)/(2a+a^2), 1/a) for the tail index a read off at x = 1e6; the window
    /// in which t Pibar(g(t)/log(t)^beta) -> 0 is expected for boundaries near t^a.
    double admissible_beta(const SubordinatorModel &model);
} // namespace csl
