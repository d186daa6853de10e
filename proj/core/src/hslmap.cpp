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
#include "polarcv/hslmap.hpp"

#include <algorithm>
#include <cmath>

namespace polarcv {

void HslImage::validate() const {
  if (!h.same_size(s) || !h.same_size(l))
    throw InvalidInputError("HSL channels differ in size");
  for (double v : h)
    if (!(v >= 0.0 && v < 360.0)) throw InvalidInputError("H outside [0, 360)");
  for (double v : s)
    if (!(v >= 0.0 && v <= 100.0)) throw InvalidInputError("S outside [0, 100]");
  for (double v : l)
    if (!(v >= 0.0 && v <= 100.0)) throw InvalidInputError("L outside [0, 100]");
}

HslImage to_hsl(const PolarParams& params, const HslMapOptions& opts) {
  params.validate();
  if (!(opts.iota_full_scale > 0.0))
    throw InvalidInputError("iota_full_scale must be positive");
  const int w = params.width(), h = params.height();
  HslImage out{ScalarField(w, h), ScalarField(w, h), ScalarField(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double hue = 2.0 * params.alpha(x, y) * (180.0 / kPi);
      hue = std::fmod(hue, 360.0);
      if (hue < 0.0) hue += 360.0;
      out.h(x, y) = hue;
      out.s(x, y) = 100.0 * params.rho(x, y);
      out.l(x, y) = 100.0 * std::min(params.iota(x, y) / opts.iota_full_scale, 1.0);
    }
  }
  return out;
}

void hsl_pixel_to_rgb(double h, double s, double l, std::uint8_t* r, std::uint8_t* g,
                      std::uint8_t* b) {
  const double sl = s / 100.0;
  const double ll = l / 100.0;
  const double c = (1.0 - std::abs(2.0 * ll - 1.0)) * sl;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r1 = 0.0, g1 = 0.0, b1 = 0.0;
  if (hp < 1.0) {
    r1 = c; g1 = x;
  } else if (hp < 2.0) {
    r1 = x; g1 = c;
  } else if (hp < 3.0) {
    g1 = c; b1 = x;
  } else if (hp < 4.0) {
    g1 = x; b1 = c;
  } else if (hp < 5.0) {
    r1 = x; b1 = c;
  } else {
    r1 = c; b1 = x;
  }
  const double m = ll - 0.5 * c;
  auto quantize = [](double v) {
    const long q = std::lround(v * 255.0);
    return static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
  };
  *r = quantize(r1 + m);
  *g = quantize(g1 + m);
  *b = quantize(b1 + m);
}

RgbImage hsl_to_rgb(const HslImage& img) {
  img.validate();
  const int w = img.width(), h = img.height();
  RgbImage out{Image<std::uint8_t>(w, h), Image<std::uint8_t>(w, h),
               Image<std::uint8_t>(w, h)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      hsl_pixel_to_rgb(img.h(x, y), img.s(x, y), img.l(x, y), &out.r(x, y),
                       &out.g(x, y), &out.b(x, y));
  return out;
}

}  // namespace polarcv
