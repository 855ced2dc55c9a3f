#pragma once

// Self-contained SVG heatmaps. Colors come from fixed linear ramps:
//   explosion fraction: white (255,255,255) at 0 to red (178,24,43) at 1
//   density:            white (255,255,255) at 0 to blue (33,102,172) at the maximum bin mass
// Each channel is interpolated linearly and rounded to the nearest integer.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "driftcert/core/format.hpp"
#include "driftcert/sim/histogram.hpp"
#include "driftcert/sim/phase.hpp"

namespace driftcert {

using Rgb = std::array<int, 3>;

inline constexpr Rgb kRampLow{255, 255, 255};
inline constexpr Rgb kFractionHigh{178, 24, 43};
inline constexpr Rgb kDensityHigh{33, 102, 172};

inline std::string ramp_color(double t, const Rgb& hi) {
    t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
    char buf[8];
    int c[3];
    for (int k = 0; k < 3; ++k) c[k] = static_cast<int>(std::lround(kRampLow[k] + t * (hi[k] - kRampLow[k])));
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
    return buf;
}

namespace svg_detail {

inline constexpr double kMargin = 60.0;
inline constexpr double kPlot = 400.0;

inline void header(std::ostringstream& o, const std::string& title) {
    const double size = kPlot + 2.0 * kMargin;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt9(size) << "\" height=\"" << fmt9(size)
      << "\" viewBox=\"0 0 " << fmt9(size) << ' ' << fmt9(size) << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    o << "<text x=\"" << fmt9(size / 2) << "\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"16\">" << title << "</text>\n";
}

inline void axes(std::ostringstream& o, const std::string& xlabel, const std::string& ylabel, double x0, double x1,
                 double y0, double y1) {
    const double m = kMargin, p = kPlot;
    o << "<rect x=\"" << fmt9(m) << "\" y=\"" << fmt9(m) << "\" width=\"" << fmt9(p) << "\" height=\"" << fmt9(p)
      << "\" fill=\"none\" stroke=\"#000000\"/>\n";
    auto label = [&o](double x, double y, const std::string& s, const char* anchor) {
        o << "<text x=\"" << fmt9(x) << "\" y=\"" << fmt9(y) << "\" text-anchor=\"" << anchor
          << "\" font-family=\"sans-serif\" font-size=\"12\">" << s << "</text>\n";
    };
    label(m, m + p + 18, fmt9(x0), "start");
    label(m + p, m + p + 18, fmt9(x1), "end");
    label(m + p / 2, m + p + 40, xlabel, "middle");
    label(m - 6, m + p, fmt9(y0), "end");
    label(m - 6, m + 12, fmt9(y1), "end");
    o << "<text x=\"20\" y=\"" << fmt9(m + p / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\" transform=\"rotate(-90 20 " << fmt9(m + p / 2) << ")\">" << ylabel << "</text>\n";
}

inline void cell(std::ostringstream& o, double x, double y, double w, double h, const std::string& color) {
    o << "<rect x=\"" << fmt9(x) << "\" y=\"" << fmt9(y) << "\" width=\"" << fmt9(w) << "\" height=\"" << fmt9(h)
      << "\" fill=\"" << color << "\"/>\n";
}

}  // namespace svg_detail

// Cells of a rectangular phase grid; alpha1 on the horizontal axis.
inline std::string phase_svg(const std::vector<PhaseCell>& cells, const PhaseGrid& grid) {
    using namespace svg_detail;
    std::ostringstream o;
    header(o, "explosion fraction");
    const std::size_t n1 = grid.alpha1.size(), n2 = grid.alpha2.size();
    const double w = kPlot / static_cast<double>(n1), h = kPlot / static_cast<double>(n2);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const std::size_t i = c / n2, j = c % n2;
        cell(o, kMargin + static_cast<double>(i) * w, kMargin + kPlot - static_cast<double>(j + 1) * h, w, h,
             ramp_color(cells[c].stats.explosion_fraction, kFractionHigh));
    }
    axes(o, "alpha1", "alpha2", grid.alpha1.front(), grid.alpha1.back(), grid.alpha2.front(), grid.alpha2.back());
    o << "</svg>\n";
    return o.str();
}

inline std::string density_svg(const Histogram2D& hist, const std::string& title) {
    using namespace svg_detail;
    std::ostringstream o;
    header(o, title);
    const double top = hist.mass.empty() ? 0.0 : *std::max_element(hist.mass.begin(), hist.mass.end());
    const double w = kPlot / static_cast<double>(hist.nx()), h = kPlot / static_cast<double>(hist.ny());
    for (std::size_t j = 0; j < hist.ny(); ++j)
        for (std::size_t i = 0; i < hist.nx(); ++i) {
            const double m = hist.at(i, j);
            if (m == 0.0) continue;
            cell(o, kMargin + static_cast<double>(i) * w, kMargin + kPlot - static_cast<double>(j + 1) * h, w, h,
                 ramp_color(top > 0.0 ? m / top : 0.0, kDensityHigh));
        }
    axes(o, "x", "y", hist.x_edges.front(), hist.x_edges.back(), hist.y_edges.front(), hist.y_edges.back());
    o << "</svg>\n";
    return o.str();
}

}  // namespace driftcert
