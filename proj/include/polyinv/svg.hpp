#pragma once

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "polyinv/polygon.hpp"
#include "polyinv/rational.hpp"

namespace polyinv {

// Static SVG overlay of piecewise linear polygons with a legend.
inline std::string render_svg(const std::vector<std::pair<std::string, BreakpointFunction>>& fns) {
    const double W = 640, H = 480, ml = 56, mr = 160, mt = 24, mb = 44;
    double xmax = 1, ymax = 1;
    for (const auto& [name, f] : fns) {
        xmax = std::max(xmax, to_double(f.width()));
        for (const auto& [x, y] : f.vertices()) ymax = std::max(ymax, to_double(y));
    }
    auto px = [&](double x) { return ml + (W - ml - mr) * x / xmax; };
    auto py = [&](double y) { return H - mb - (H - mt - mb) * y / ymax; };
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // axes with integer ticks
    os << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(xmax) << "\" y2=\""
       << py(0) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(0) << "\" y2=\""
       << py(ymax) << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= static_cast<int>(xmax); ++i) {
        os << "<line x1=\"" << px(i) << "\" y1=\"" << py(0) << "\" x2=\"" << px(i) << "\" y2=\""
           << py(0) + 4 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << px(i) << "\" y=\"" << py(0) + 18
           << "\" font-size=\"11\" text-anchor=\"middle\">" << i << "</text>\n";
    }
    for (int i = 0; i <= static_cast<int>(ymax); ++i) {
        os << "<line x1=\"" << px(0) - 4 << "\" y1=\"" << py(i) << "\" x2=\"" << px(0)
           << "\" y2=\"" << py(i) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << px(0) - 8 << "\" y=\"" << py(i) + 4
           << "\" font-size=\"11\" text-anchor=\"end\">" << i << "</text>\n";
    }
    int ci = 0;
    for (const auto& [name, f] : fns) {
        const char* color = palette[ci % 7];
        os << "<polyline fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"1.8\" points=\"";
        for (const auto& [x, y] : f.vertices())
            os << px(to_double(x)) << "," << py(to_double(y)) << " ";
        os << "\"/>\n";
        double ly = mt + 16 + 18 * ci;
        os << "<line x1=\"" << W - mr + 8 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - mr + 32
           << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"1.8\"/>\n";
        os << "<text x=\"" << W - mr + 38 << "\" y=\"" << ly
           << "\" font-size=\"12\">" << name << "</text>\n";
        ++ci;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace polyinv
