#pragma once

// Minimal deterministic SVG output: line charts for accuracy curves and
// scatter plots for cross-run comparisons. No dependencies, fixed float
// formatting, stable byte output for identical inputs.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace omegalab {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

namespace plot_detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Range {
  double lo = 0.0, hi = 1.0;
};

inline Range nice_range(double lo, double hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = (hi - lo) * 0.05;
  return {lo - pad, hi + pad};
}

inline const char* series_color(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  return colors[i % 8];
}

}  // namespace plot_detail

// Shared frame: axes, four ticks per axis, labels, then per-series content.
inline void write_svg_chart(std::ostream& out, const std::string& title,
                            const std::string& xlabel, const std::string& ylabel,
                            const std::vector<PlotSeries>& series, bool lines) {
  using plot_detail::fmt;
  const double width = 640, height = 420;
  const double ml = 64, mr = 16, mt = 32, mb = 48;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (xmin > xmax) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
  const auto xr = plot_detail::nice_range(xmin, xmax);
  const auto yr = plot_detail::nice_range(ymin, ymax);
  auto sx = [&](double x) {
    return ml + (x - xr.lo) / (xr.hi - xr.lo) * (width - ml - mr);
  };
  auto sy = [&](double y) {
    return height - mb - (y - yr.lo) / (yr.hi - yr.lo) * (height - mt - mb);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << height - mb << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    out << "<text x=\"" << fmt(sx(fx)) << "\" y=\"" << height - mb + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << fmt(fx) << "</text>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << fmt(sy(fy) + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << fmt(fy) << "</text>\n";
  }
  out << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << xlabel << "</text>\n";
  out << "<text x=\"16\" y=\"" << height / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << height / 2 << ")\">" << ylabel << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = plot_detail::series_color(si);
    if (lines && s.x.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (i) out << " ";
        out << fmt(sx(s.x[i])) << "," << fmt(sy(s.y[i]));
      }
      out << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < s.x.size(); ++i)
        out << "<circle cx=\"" << fmt(sx(s.x[i])) << "\" cy=\"" << fmt(sy(s.y[i]))
            << "\" r=\"3\" fill=\"" << color << "\" fill-opacity=\"0.7\"/>\n";
    }
    if (!s.name.empty())
      out << "<text x=\"" << width - mr - 4 << "\" y=\"" << mt + 14 * (si + 1)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
          << color << "\">" << s.name << "</text>\n";
  }
  out << "</svg>\n";
}

inline void write_svg_line_chart(const std::string& path, const std::string& title,
                                 const std::string& xlabel, const std::string& ylabel,
                                 const std::vector<PlotSeries>& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_svg_chart(out, title, xlabel, ylabel, series, /*lines=*/true);
}

inline void write_svg_scatter(const std::string& path, const std::string& title,
                              const std::string& xlabel, const std::string& ylabel,
                              const std::vector<PlotSeries>& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_svg_chart(out, title, xlabel, ylabel, series, /*lines=*/false);
}

}  // namespace omegalab
