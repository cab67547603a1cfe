// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

namespace cdnsim {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool markers = true;
};

struct PlotOptions {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  int width = 760;
  int height = 520;
};

/// Renders line series to a self-contained SVG document. Nonpositive
/// values are dropped on log axes.
std::string render_line_plot(const std::vector<PlotSeries>& series,
                             const PlotOptions& opts);

}  // namespace cdnsim
