#include "csl/path.hpp"

#include "csl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace csl
{
    JumpLaw::JumpLaw(SubordinatorModel model, double cutoff, std::optional<double> truncation)
        : model_(std::move(model)), cutoff_(cutoff), truncation_(truncation)
    {
        if (!(cutoff > 0.0))
            throw std::domain_error("JumpLaw: cutoff must be positive");
        if (truncation && !(*truncation > cutoff))
            throw std::domain_error("JumpLaw: truncation must exceed the cutoff");
        const double tail_eps = model_.tail(cutoff);
        if (!std::isfinite(tail_eps))
            throw NumericError("JumpLaw: Pibar(eps) is not finite");
        tail_a_ = truncation ? model_.tail(*truncation) : 0.0;
        rate_ = tail_eps - tail_a_;
        if (!(rate_ > 0.0))
            throw NumericError("JumpLaw: no jump mass in (eps, a]");
        drift_slope_ = model_.drift() + model_.small_jump_mean(cutoff);
        if (!std::isfinite(drift_slope_))
            throw NumericError("JumpLaw: small-jump mean is not finite");
        if (const auto &sp = model_.stable_params())
        {
            stable_alpha_ = sp->alpha;
            stable_k_ = sp->scale / std::tgamma(1.0 - sp->alpha);
        }
    }

    double JumpLaw::size_at(double w) const
    {
        const double level = tail_a_ + w * rate_;
        double x = stable_k_ > 0.0 ? std::pow(stable_k_ / level, 1.0 / stable_alpha_) : model_.tail_inverse(level);
        // Rounding in the inversion must not leave (eps, a].
        x = std::max(x, std::nextafter(cutoff_, std::numeric_limits<double>::infinity()));
        if (truncation_)
            x = std::min(x, *truncation_);
        return x;
    }

    double default_cutoff(const SubordinatorModel &model, double jumps_per_unit_time)
    {
        if (!(jumps_per_unit_time > 0.0))
            throw std::domain_error("default_cutoff: rate must be positive");
        return model.tail_inverse(jumps_per_unit_time);
    }

    SamplePath sample_path(const JumpLaw &law, double horizon, Rng &rng)
    {
        if (!(horizon > 0.0))
            throw std::domain_error("sample_path: horizon must be positive");
        SamplePath path;
        path.horizon = horizon;
        path.drift_slope = law.drift_slope();
        path.cutoff = law.cutoff();
        path.truncation = law.truncation();
        JumpStream stream(law, rng);
        while (true)
        {
            const Jump j = stream.next();
            if (j.time > horizon)
                break;
            path.jumps.push_back(j);
        }
        return path;
    }

    SamplePath sample_path(const SubordinatorModel &model, double horizon, double cutoff,
                           std::optional<double> truncation, const RngStream &stream)
    {
        const JumpLaw law(model, cutoff, truncation);
        Rng rng = stream.make();
        return sample_path(law, horizon, rng);
    }

    double path_value(const SamplePath &path, double t)
    {
        if (!(t >= 0.0 && t <= path.horizon))
            throw std::domain_error("path_value: t outside [0, horizon]");
        double x = path.drift_slope * t;
        for (const auto &j : path.jumps)
        {
            if (j.time > t)
                break;
            x += j.size;
        }
        return x;
    }

    std::optional<Jump> first_big_jump(const SamplePath &path, double x)
    {
        if (!(x > path.cutoff))
            throw std::domain_error("first_big_jump: threshold must exceed the cutoff");
        for (const auto &j : path.jumps)
        {
            if (j.size > x)
                return j;
        }
        return std::nullopt;
    }

    std::string format_double(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    void write_path_csv(const SamplePath &path, std::ostream &out)
    {
        out << "t,jump_size,cum_value\n";
        double sum = 0.0;
        for (const auto &j : path.jumps)
        {
            sum += j.size;
            out << format_double(j.time) << ',' << format_double(j.size) << ','
                << format_double(sum + path.drift_slope * j.time) << '\n';
        }
    }

    void write_path_csv(const SamplePath &path, const std::string &file)
    {
        std::ofstream out(file, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot open " + file);
        write_path_csv(path, out);
    }
} // namespace csl
