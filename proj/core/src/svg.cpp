// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "cdnsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace cdnsim {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double place(double v, double pixel_lo, double pixel_hi) const {
    const double a = log ? std::log10(v) : v;
    const double l = log ? std::log10(lo) : lo;
    const double h = log ? std::log10(hi) : hi;
    const double frac = h > l ? (a - l) / (h - l) : 0.5;
    return pixel_lo + frac * (pixel_hi - pixel_lo);
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int first = static_cast<int>(std::floor(std::log10(lo)));
      const int last = static_cast<int>(std::ceil(std::log10(hi)));
      for (int e = first; e <= last; ++e) {
        const double v = std::pow(10.0, e);
        if (v >= lo / 1.0001 && v <= hi * 1.0001) out.push_back(v);
      }
      if (out.size() < 2) {
        out = {lo, hi};
      }
      return out;
    }
    const double span = hi - lo;
    if (span <= 0.0) return {lo};
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double mult : {1.0, 2.0, 5.0, 10.0}) {
      if (raw <= mult * mag) {
        step = mult * mag;
        break;
      }
    }
    const double start = std::ceil(lo / step) * step;
    for (double v = start; v <= hi + step * 1e-9; v += step) out.push_back(v);
    return out;
  }
};

}  // namespace

std::string render_line_plot(const std::vector<PlotSeries>& series,
                             const PlotOptions& opts) {
  const double left = 64, right = 24, top = 40, bottom = 52;
  const double x0 = left, x1 = opts.width - right;
  const double y0 = opts.height - bottom, y1 = top;  // SVG y grows downward

  Axis xaxis{std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity(), opts.logx};
  Axis yaxis{std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity(), opts.logy};
  bool any = false;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if ((opts.logx && x <= 0.0) || (opts.logy && y <= 0.0)) continue;
      xaxis.lo = std::min(xaxis.lo, x);
      xaxis.hi = std::max(xaxis.hi, x);
      yaxis.lo = std::min(yaxis.lo, y);
      yaxis.hi = std::max(yaxis.hi, y);
      any = true;
    }
  }
  if (!any) {
    xaxis.lo = yaxis.lo = opts.logx || opts.logy ? 0.1 : 0.0;
    xaxis.hi = yaxis.hi = 1.0;
  }
  if (xaxis.lo == xaxis.hi) {
    xaxis.lo -= 0.5;
    xaxis.hi += 0.5;
  }
  if (yaxis.lo == yaxis.hi) {
    yaxis.lo = opts.logy ? yaxis.lo / 2 : yaxis.lo - 0.5;
    yaxis.hi = opts.logy ? yaxis.hi * 2 : yaxis.hi + 0.5;
  }
  if (!opts.logy) {
    const double pad = 0.05 * (yaxis.hi - yaxis.lo);
    yaxis.lo -= pad;
    yaxis.hi += pad;
  }

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width
      << "\" height=\"" << opts.height << "\" viewBox=\"0 0 " << opts.width
      << " " << opts.height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<g font-family=\"sans-serif\" font-size=\"12\">\n";

  if (!opts.title.empty())
    out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-size=\"14\">" << opts.title << "</text>\n";

  // Frame and grid.
  out << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0
      << "\" height=\"" << y0 - y1 << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (double t : xaxis.ticks()) {
    const double px = xaxis.place(t, x0, x1);
    out << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px
        << "\" y2=\"" << y1 << "\" stroke=\"#ddd\"/>\n"
        << "<text x=\"" << px << "\" y=\"" << y0 + 16
        << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
  }
  for (double t : yaxis.ticks()) {
    const double py = yaxis.place(t, y0, y1);
    out << "<line x1=\"" << x0 << "\" y1=\"" << py << "\" x2=\"" << x1
        << "\" y2=\"" << py << "\" stroke=\"#ddd\"/>\n"
        << "<text x=\"" << x0 - 6 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\">" << fmt(t) << "</text>\n";
  }
  if (!opts.xlabel.empty())
    out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << opts.height - 12
        << "\" text-anchor=\"middle\">" << opts.xlabel << "</text>\n";
  if (!opts.ylabel.empty())
    out << "<text x=\"16\" y=\"" << (y0 + y1) / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << (y0 + y1) / 2 << ")\">" << opts.ylabel << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    std::ostringstream path;
    bool first = true;
    for (const auto& [x, y] : series[i].points) {
      if ((opts.logx && x <= 0.0) || (opts.logy && y <= 0.0)) continue;
      path << (first ? "M" : "L") << xaxis.place(x, x0, x1) << " "
           << yaxis.place(y, y0, y1) << " ";
      first = false;
    }
    out << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.6\"/>\n";
    if (series[i].markers) {
      for (const auto& [x, y] : series[i].points) {
        if ((opts.logx && x <= 0.0) || (opts.logy && y <= 0.0)) continue;
        out << "<circle cx=\"" << xaxis.place(x, x0, x1) << "\" cy=\""
            << yaxis.place(y, y0, y1) << "\" r=\"2.5\" fill=\"" << color
            << "\"/>\n";
      }
    }
    // Legend entry.
    const double ly = y1 + 16 + 16 * static_cast<double>(i);
    out << "<line x1=\"" << x1 - 130 << "\" y1=\"" << ly << "\" x2=\""
        << x1 - 110 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << x1 - 104 << "\" y=\"" << ly + 4 << "\">"
        << series[i].label << "</text>\n";
  }

  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace cdnsim
