#pragma once

#include <string>
#include <vector>

namespace csl::app
{
    struct Series
    {
        std::string label;
        std::vector<double> x;
        std::vector<double> y;
    };

    struct PlotSpec
    {
        std::string title;
        std::string x_label;
        std::string y_label;
        bool log_x = false;
        bool log_y = false;
    };

    /// Static line plot: axes, five ticks per axis, one polyline per series and a legend.
    /// Points that are non-finite, or nonpositive on a log axis, are dropped.
    std::string render_svg(const PlotSpec &spec, const std::vector<Series> &series);

    void write_svg(const std::string &file, const PlotSpec &spec, const std::vector<Series> &series);
} // namespace csl::app
