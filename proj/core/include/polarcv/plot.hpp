/**********
 *   Copyright 2026 The polarcv authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
\**********/
#ifndef POLARCV_PLOT_HPP
#define POLARCV_PLOT_HPP

#include <string>
#include <vector>

#include "polarcv/hslmap.hpp"
#include "polarcv/image.hpp"

namespace polarcv {

// In-house rasterization keeps plot output hermetic; no external plotting
// stack is involved.

struct PlotSeries {
  std::vector<double> x, y;
  std::uint8_t r = 30, g = 90, b = 200;
};

struct PlotOptions {
  int width = 640;
  int height = 440;
  bool log_y = false;
  std::string title;  // rendered with a 5x7 digit/letter subset
};

RgbImage line_plot(const std::vector<PlotSeries>& series, const PlotOptions& opts = {});

// Blue-to-red diverging colormap over [min, max] of the field.
RgbImage heatmap(const ScalarField& field);

}  // namespace polarcv

#endif  // POLARCV_PLOT_HPP
