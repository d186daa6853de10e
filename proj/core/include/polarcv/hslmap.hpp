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
#ifndef POLARCV_HSLMAP_HPP
#define POLARCV_HSLMAP_HPP

#include <cstdint>

#include "polarcv/image.hpp"
#include "polarcv/polarimage.hpp"

namespace polarcv {

// H in [0, 360) degrees (periodic), S and L in [0, 100].
struct HslImage {
  ScalarField h, s, l;

  int width() const { return h.width(); }
  int height() const { return h.height(); }
  void validate() const;
};

struct RgbImage {
  Image<std::uint8_t> r, g, b;

  int width() const { return r.width(); }
  int height() const { return r.height(); }
};

struct HslMapOptions {
  // Fixed full-scale luminance: L = 100 * min(iota / iota_full_scale, 1).
  // S0 of unit-normalized channels tops out at 2. A fixed scale (rather
  // than the per-image max) keeps frames comparable and outputs
  // deterministic.
  double iota_full_scale = 2.0;
};

// H = 2*alpha in degrees (the doubling spreads the pi-periodic angle over
// the full hue circle), S = 100*rho, L = scaled iota. Unpolarized pixels
// come out achromatic.
HslImage to_hsl(const PolarParams& params, const HslMapOptions& opts = {});

// Standard hexcone HSL -> RGB conversion, rounded to 8 bits.
RgbImage hsl_to_rgb(const HslImage& img);

// Single-pixel helper used by the image conversion and tests.
void hsl_pixel_to_rgb(double h, double s, double l, std::uint8_t* r, std::uint8_t* g,
                      std::uint8_t* b);

}  // namespace polarcv

#endif  // POLARCV_HSLMAP_HPP
