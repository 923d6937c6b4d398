#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace csl::app
{
    namespace
    {
        constexpr double kWidth = 640.0;
        constexpr double kHeight = 420.0;
        constexpr double kLeft = 70.0;
        constexpr double kRight = 20.0;
        constexpr double kTop = 40.0;
        constexpr double kBottom = 55.0;
        const char *const kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

        std::string escape(const std::string &s)
        {
            std::string out;
            for (char c : s)
            {
                switch (c)
                {
                case '&': out += "&amp;"; break;
                case '<': out += "&lt;"; break;
                case '>': out += "&gt;"; break;
                case '"': out += "&quot;"; break;
                default: out += c;
                }
            }
            return out;
        }

        std::string num(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f", v);
            return buf;
        }

        std::string tick_label(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3g", v);
            return buf;
        }

        struct Axis
        {
            bool log = false;
            double lo = 0.0;
            double hi = 1.0;

            double map(double v) const { return log ? std::log10(v) : v; }
            double unmap(double u) const { return log ? std::pow(10.0, u) : u; }
            bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
        };
    } // namespace

    std::string render_svg(const PlotSpec &spec, const std::vector<Series> &series)
    {
        Axis ax{spec.log_x, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        Axis ay{spec.log_y, ax.lo, ax.hi};
        for (const auto &s : series)
        {
            for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
            {
                if (!ax.usable(s.x[i]) || !ay.usable(s.y[i]))
                    continue;
                ax.lo = std::min(ax.lo, ax.map(s.x[i]));
                ax.hi = std::max(ax.hi, ax.map(s.x[i]));
                ay.lo = std::min(ay.lo, ay.map(s.y[i]));
                ay.hi = std::max(ay.hi, ay.map(s.y[i]));
            }
        }
        if (!(ax.hi >= ax.lo))
            ax.lo = 0.0, ax.hi = 1.0;
        if (!(ay.hi >= ay.lo))
            ay.lo = 0.0, ay.hi = 1.0;
        if (ax.hi == ax.lo)
            ax.lo -= 0.5, ax.hi += 0.5;
        if (ay.hi == ay.lo)
            ay.lo -= 0.5, ay.hi += 0.5;
        const double pad = 0.05 * (ay.hi - ay.lo);
        ay.lo -= pad;
        ay.hi += pad;

        const double pw = kWidth - kLeft - kRight;
        const double ph = kHeight - kTop - kBottom;
        auto px = [&](double u) { return kLeft + (u - ax.lo) / (ax.hi - ax.lo) * pw; };
        auto py = [&](double u) { return kTop + ph - (u - ay.lo) / (ay.hi - ay.lo) * ph; };

        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
            << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
        out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
            << escape(spec.title) << "</text>\n";
        out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
            << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int k = 0; k <= 4; ++k)
        {
            const double ux = ax.lo + (ax.hi - ax.lo) * k / 4.0;
            const double uy = ay.lo + (ay.hi - ay.lo) * k / 4.0;
            out << "<line x1=\"" << num(px(ux)) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(px(ux))
                << "\" y2=\"" << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << num(px(ux)) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">"
                << tick_label(ax.unmap(ux)) << "</text>\n";
            out << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py(uy)) << "\" x2=\"" << num(kLeft)
                << "\" y2=\"" << num(py(uy)) << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(uy) + 4) << "\" text-anchor=\"end\">"
                << tick_label(ay.unmap(uy)) << "</text>\n";
        }
        out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\">"
            << escape(spec.x_label) << (spec.log_x ? " (log)" : "") << "</text>\n";
        out << "<text transform=\"translate(16," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
            << escape(spec.y_label) << (spec.log_y ? " (log)" : "") << "</text>\n";

        for (std::size_t k = 0; k < series.size(); ++k)
        {
            const auto &s = series[k];
            const char *colour = kColours[k % std::size(kColours)];
            out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
            bool first = true;
            for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
            {
                if (!ax.usable(s.x[i]) || !ay.usable(s.y[i]))
                    continue;
                out << (first ? "" : " ") << num(px(ax.map(s.x[i]))) << ',' << num(py(ay.map(s.y[i])));
                first = false;
            }
            out << "\"/>\n";
            const double ly = kTop + 14.0 + 14.0 * static_cast<double>(k);
            out << "<line x1=\"" << num(kLeft + pw - 150) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
                << num(kLeft + pw - 130) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << colour
                << "\" stroke-width=\"2\"/>\n";
            out << "<text x=\"" << num(kLeft + pw - 125) << "\" y=\"" << num(ly) << "\">" << escape(s.label)
                << "</text>\n";
        }
        out << "</svg>\n";
        return out.str();
    }

    void write_svg(const std::string &file, const PlotSpec &spec, const std::vector<Series> &series)
    {
        std::ofstream out(file, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot open " + file);
        out << render_svg(spec, series);
    }
} // namespace csl::app
