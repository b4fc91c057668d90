#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "phi4/spectral.hpp"  // ConfigError

namespace phi4::cli {

namespace {

constexpr double W = 640.0, H = 420.0;
constexpr double ML = 70.0, MR = 20.0, MT = 40.0, MB = 50.0;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
    std::size_t total = 0;
    for (const Series& s : spec.series) total += s.x.size();
    if (total == 0) throw ConfigError("plot: empty record list, nothing to draw");

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const Series& s : spec.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double x = spec.log_x ? std::log10(s.x[i]) : s.x[i];
            const double e = s.yerr.empty() ? 0.0 : s.yerr[i];
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, s.y[i] - e);
            ymax = std::max(ymax, s.y[i] + e);
        }
    }
    if (xmax - xmin < 1e-300) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax - ymin < 1e-300) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double xpad = 0.05 * (xmax - xmin), ypad = 0.08 * (ymax - ymin);
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;

    const auto px = [&](double x) {
        const double v = spec.log_x ? std::log10(x) : x;
        return ML + (v - xmin) / (xmax - xmin) * (W - ML - MR);
    };
    const auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << spec.title << "</text>\n";
    // axes
    out << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\""
        << H - MB << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << H - MB
        << "\" stroke=\"black\"/>\n";
    // ticks
    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        const double gx = ML + (W - ML - MR) * i / 4.0;
        out << "<line x1=\"" << gx << "\" y1=\"" << H - MB << "\" x2=\"" << gx << "\" y2=\""
            << H - MB + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << gx << "\" y=\"" << H - MB + 20
            << "\" text-anchor=\"middle\" font-size=\"11\">"
            << num(spec.log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
        const double fy = ymin + (ymax - ymin) * i / 4.0;
        const double gy = H - MB - (H - MT - MB) * i / 4.0;
        out << "<line x1=\"" << ML - 5 << "\" y1=\"" << gy << "\" x2=\"" << ML << "\" y2=\"" << gy
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ML - 8 << "\" y=\"" << gy + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << num(fy) << "</text>\n";
    }
    out << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << spec.x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << (MT + H - MB) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << (MT + H - MB) / 2 << ")\">" << spec.y_label << "</text>\n";

    double legend_y = MT + 6.0;
    for (const Series& s : spec.series) {
        if (s.x.size() >= 2 && s.draw_line) {
            out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                out << num(px(s.x[i])) << "," << num(py(s.y[i])) << " ";
            out << "\"/>\n";
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double cx = px(s.x[i]), cy = py(s.y[i]);
            if (!s.yerr.empty() && s.yerr[i] > 0.0) {
                const double y1 = py(s.y[i] - s.yerr[i]), y2 = py(s.y[i] + s.yerr[i]);
                out << "<line x1=\"" << num(cx) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(cx)
                    << "\" y2=\"" << num(y2) << "\" stroke=\"" << s.color << "\"/>\n";
                out << "<line x1=\"" << num(cx - 4) << "\" y1=\"" << num(y1) << "\" x2=\""
                    << num(cx + 4) << "\" y2=\"" << num(y1) << "\" stroke=\"" << s.color << "\"/>\n";
                out << "<line x1=\"" << num(cx - 4) << "\" y1=\"" << num(y2) << "\" x2=\""
                    << num(cx + 4) << "\" y2=\"" << num(y2) << "\" stroke=\"" << s.color << "\"/>\n";
            }
            out << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"3.5\" fill=\""
                << s.color << "\"/>\n";
        }
        out << "<circle cx=\"" << W - MR - 140 << "\" cy=\"" << legend_y << "\" r=\"3.5\" fill=\""
            << s.color << "\"/>\n";
        out << "<text x=\"" << W - MR - 130 << "\" y=\"" << legend_y + 4
            << "\" font-size=\"12\">" << s.label << "</text>\n";
        legend_y += 16.0;
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace phi4::cli
