#pragma once

#include <string>
#include <vector>

namespace polymax {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;  // nonpositive values are dropped
    int width = 640;
    int height = 400;
};

// Self-contained SVG line plot with axes, five ticks per axis and a legend.
std::string line_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace polymax
