#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace objstab {

struct PlotSeries {
    std::string label;
    std::string color;
    std::vector<std::pair<double, double>> points; // already sorted by x
};

struct PlotMarkers {
    std::string color;
    std::vector<double> xs; // vertical markers (rank-deficient / divergent k)
};

/// Self-contained static SVG line plot: linear axes with ticks, one polyline
/// per series, optional vertical markers. No external assets, no timestamps.
inline std::string emit_svg(const std::vector<PlotSeries>& series, const PlotMarkers& markers,
                            const std::string& xlabel, const std::string& ylabel,
                            const std::string& title) {
    bool any = false;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (!any) { xmin = xmax = x; ymin = ymax = y; any = true; }
            xmin = std::min(xmin, x); xmax = std::max(xmax, x);
            ymin = std::min(ymin, y); ymax = std::max(ymax, y);
        }
    if (!any) throw std::runtime_error("emit_svg: no finite points to plot");
    if (xmax - xmin < 1e-300) { xmax += 1; xmin -= 1; }
    if (ymax - ymin < 1e-300) { ymax += 1; ymin -= 1; }
    double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad; ymax += ypad;

    const double W = 800, H = 500, ml = 70, mr = 20, mt = 40, mb = 50;
    auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto Y = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };
    auto fmt = [](double v) {
        std::ostringstream os;
        os.precision(6);
        os << v;
        return os.str();
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
           "font-family=\"sans-serif\">" << title << "</text>\n";

    // axes
    svg << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
        << "\" stroke=\"black\"/>\n";
    const int nticks = 6;
    for (int i = 0; i <= nticks; ++i) {
        double xv = xmin + (xmax - xmin) * i / nticks;
        double yv = ymin + (ymax - ymin) * i / nticks;
        svg << "<line x1=\"" << X(xv) << "\" y1=\"" << H - mb << "\" x2=\"" << X(xv) << "\" y2=\""
            << H - mb + 5 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << X(xv) << "\" y=\"" << H - mb + 18
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(xv)
            << "</text>\n";
        svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << Y(yv) << "\" x2=\"" << ml << "\" y2=\"" << Y(yv)
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << Y(yv) + 4
            << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(yv)
            << "</text>\n";
    }
    // zero line when visible
    if (ymin < 0 && ymax > 0)
        svg << "<line x1=\"" << ml << "\" y1=\"" << Y(0) << "\" x2=\"" << W - mr << "\" y2=\"" << Y(0)
            << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4,3\"/>\n";
    svg << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << xlabel
        << "</text>\n";
    svg << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" transform=\"rotate(-90 16 "
        << (mt + H - mb) / 2 << ")\">" << ylabel << "</text>\n";

    for (double mx : markers.xs) {
        if (mx < xmin || mx > xmax) continue;
        svg << "<line x1=\"" << X(mx) << "\" y1=\"" << mt << "\" x2=\"" << X(mx) << "\" y2=\"" << H - mb
            << "\" stroke=\"" << (markers.color.empty() ? "#d62728" : markers.color)
            << "\" stroke-dasharray=\"2,4\"/>\n";
    }

    double legend_y = mt + 8;
    for (const auto& s : series) {
        // split at non-finite points so divergences break the polyline
        std::vector<std::vector<std::pair<double, double>>> runs(1);
        for (const auto& p : s.points) {
            if (std::isfinite(p.second)) runs.back().push_back(p);
            else if (!runs.back().empty()) runs.emplace_back();
        }
        for (const auto& run : runs) {
            if (run.size() < 2) continue;
            svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
            for (const auto& [x, y] : run) svg << X(x) << "," << Y(y) << " ";
            svg << "\"/>\n";
        }
        svg << "<line x1=\"" << W - mr - 150 << "\" y1=\"" << legend_y << "\" x2=\"" << W - mr - 120
            << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << W - mr - 114 << "\" y=\"" << legend_y + 4
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << s.label << "</text>\n";
        legend_y += 18;
    }
    svg << "</svg>\n";
    return svg.str();
}

inline void save_svg(const std::string& path, const std::string& doc) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("svg: cannot write " + path);
    f << doc;
}

} // namespace objstab
