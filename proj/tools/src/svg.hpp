// Minimal deterministic SVG scatter/line plots with error bars.
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace phi4::cli {

struct Series {
    std::string label;
    std::string color = "#1f6fb2";
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> yerr;  // empty or same length as y
    bool draw_line = true;     // trend line suppressed for single points
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    std::vector<Series> series;
};

/// Renders the plot; throws ConfigError when there is nothing to draw.
std::string render_svg(const PlotSpec& spec);

}  // namespace phi4::cli
