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
#include "polarcv/plot.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

namespace polarcv {

namespace {

struct Canvas {
  RgbImage img;

  Canvas(int w, int h) : img{Image<std::uint8_t>(w, h, 255), Image<std::uint8_t>(w, h, 255), Image<std::uint8_t>(w, h, 255)} {}

  void put(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) return;
    img.r(x, y) = r;
    img.g(x, y) = g;
    img.b(x, y) = b;
  }

  void line(int x0, int y0, int x1, int y1, std::uint8_t r, std::uint8_t g,
            std::uint8_t b) {
    // Bresenham.
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    int x = x0, y = y0;
    while (true) {
      put(x, y, r, g, b);
      if (x == x1 && y == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
    }
  }
};

// 5x7 glyphs for digits and the handful of symbols tick labels need.
struct Glyph {
  char ch;
  std::uint8_t rows[7];  // 5 low bits per row, MSB left
};

constexpr Glyph kGlyphs[] = {
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
    {'e', {0x00, 0x00, 0x0E, 0x11, 0x1F, 0x10, 0x0E}},
    {'g', {0x00, 0x00, 0x0F, 0x11, 0x0F, 0x01, 0x0E}},
    {'a', {0x00, 0x00, 0x0E, 0x01, 0x0F, 0x11, 0x0F}},
    {'m', {0x00, 0x00, 0x1A, 0x15, 0x15, 0x15, 0x15}},
    {'r', {0x00, 0x00, 0x16, 0x19, 0x10, 0x10, 0x10}},
    {'s', {0x00, 0x00, 0x0F, 0x10, 0x0E, 0x01, 0x1E}},
    {'i', {0x04, 0x00, 0x0C, 0x04, 0x04, 0x04, 0x0E}},
    {'t', {0x08, 0x08, 0x1E, 0x08, 0x08, 0x09, 0x06}},
    {'l', {0x0C, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'o', {0x00, 0x00, 0x0E, 0x11, 0x11, 0x11, 0x0E}},
    {'n', {0x00, 0x00, 0x16, 0x19, 0x11, 0x11, 0x11}},
    {'d', {0x01, 0x01, 0x0D, 0x13, 0x11, 0x11, 0x0F}},
    {'p', {0x00, 0x00, 0x1E, 0x11, 0x1E, 0x10, 0x10}},
    {'h', {0x10, 0x10, 0x16, 0x19, 0x11, 0x11, 0x11}},
    {'v', {0x00, 0x00, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
};

void draw_text(Canvas& c, int x, int y, const std::string& text) {
  for (char ch : text) {
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    for (const Glyph& g : kGlyphs) {
      if (g.ch != lower) continue;
      for (int row = 0; row < 7; ++row)
        for (int col = 0; col < 5; ++col)
          if (g.rows[row] & (1 << (4 - col))) c.put(x + col, y + row, 40, 40, 40);
      break;
    }
    x += 6;
  }
}

std::string tick_label(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

RgbImage line_plot(const std::vector<PlotSeries>& series, const PlotOptions& opts) {
  Canvas canvas(opts.width, opts.height);
  const int ml = 64, mr = 16, mt = 28, mb = 36;  // margins
  const int x0 = ml, x1 = opts.width - mr;
  const int y0 = mt, y1 = opts.height - mb;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const PlotSeries& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      double yv = s.y[i];
      if (opts.log_y) {
        if (!(yv > 0.0)) continue;
        yv = std::log10(yv);
      }
      if (!std::isfinite(s.x[i]) || !std::isfinite(yv)) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, yv);
      ymax = std::max(ymax, yv);
    }
  }
  if (!(xmax >= xmin)) {
    xmin = 0;
    xmax = 1;
  }
  if (!(ymax >= ymin)) {
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + (std::abs(ymin) > 0 ? std::abs(ymin) * 0.1 : 1.0);

  auto px = [&](double x) {
    return x0 + static_cast<int>(std::lround((x - xmin) / (xmax - xmin) * (x1 - x0)));
  };
  auto py = [&](double yv) {
    if (opts.log_y) yv = std::log10(std::max(yv, 1e-300));
    return y1 - static_cast<int>(std::lround((yv - ymin) / (ymax - ymin) * (y1 - y0)));
  };

  // frame and ticks
  canvas.line(x0, y0, x0, y1, 0, 0, 0);
  canvas.line(x0, y1, x1, y1, 0, 0, 0);
  const int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = xmin + (xmax - xmin) * i / kTicks;
    const int tx = px(fx);
    canvas.line(tx, y1, tx, y1 + 4, 0, 0, 0);
    draw_text(canvas, tx - 12, y1 + 8, tick_label(fx));
    const double fyv = ymin + (ymax - ymin) * i / kTicks;
    const int ty = y1 - (y1 - y0) * i / kTicks;
    canvas.line(x0 - 4, ty, x0, ty, 0, 0, 0);
    draw_text(canvas, 4, ty - 3, tick_label(opts.log_y ? std::pow(10.0, fyv) : fyv));
  }
  if (!opts.title.empty()) draw_text(canvas, x0, 8, opts.title);

  for (const PlotSeries& s : series) {
    bool has_prev = false;
    int prev_x = 0, prev_y = 0;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (opts.log_y && !(s.y[i] > 0.0)) {
        has_prev = false;
        continue;
      }
      const int cx = px(s.x[i]);
      const int cy = py(s.y[i]);
      if (has_prev) canvas.line(prev_x, prev_y, cx, cy, s.r, s.g, s.b);
      prev_x = cx;
      prev_y = cy;
      has_prev = true;
    }
  }
  return canvas.img;
}

RgbImage heatmap(const ScalarField& field) {
  if (field.empty()) throw InvalidInputError("heatmap of empty field");
  const double lo = field_min(field), hi = field_max(field);
  const double span = hi > lo ? hi - lo : 1.0;
  RgbImage out{Image<std::uint8_t>(field.width(), field.height()),
               Image<std::uint8_t>(field.width(), field.height()),
               Image<std::uint8_t>(field.width(), field.height())};
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) {
      const double t = (field(x, y) - lo) / span;
      // blue -> white -> red
      const double r = t < 0.5 ? 2.0 * t : 1.0;
      const double b = t < 0.5 ? 1.0 : 2.0 * (1.0 - t);
      const double g = t < 0.5 ? 2.0 * t : 2.0 * (1.0 - t);
      out.r(x, y) = static_cast<std::uint8_t>(std::lround(255.0 * r));
      out.g(x, y) = static_cast<std::uint8_t>(std::lround(255.0 * g));
      out.b(x, y) = static_cast<std::uint8_t>(std::lround(255.0 * b));
    }
  }
  return out;
}

}  // namespace polarcv
