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
#include "polarcv/polaraug.hpp"

#include <cmath>

namespace polarcv {

void AugmentSpec::validate() const {
  if (kind == AugmentKind::kRotation) {
    if (!(theta > -kPi && theta <= kPi))
      throw InvalidInputError("rotation angle outside (-pi, pi]");
  }
}

namespace {

// Inverse spatial map: source coordinates of the output pixel (x, y).
void source_coords(const AugmentSpec& spec, int w, int h, int x, int y, double* sx,
                   double* sy) {
  if (spec.kind == AugmentKind::kHorizontalFlip) {
    *sx = (w - 1) - x;
    *sy = y;
    return;
  }
  const double cx = 0.5 * (w - 1), cy = 0.5 * (h - 1);
  const double dx = x - cx, dy = y - cy;
  const double c = std::cos(spec.theta), s = std::sin(spec.theta);
  *sx = cx + c * dx + s * dy;
  *sy = cy - s * dx + c * dy;
}

bool sample_scalar(const ScalarField& f, Interpolation interp, double sx, double sy,
                   double* out) {
  if (interp == Interpolation::kNearest) {
    const int ix = static_cast<int>(std::lround(sx));
    const int iy = static_cast<int>(std::lround(sy));
    if (!f.in_bounds(ix, iy)) return false;
    *out = f(ix, iy);
    return true;
  }
  return bilinear_sample(f, sx, sy, out);
}

// pi-periodic angles interpolate through their doubled-angle unit vector
// (cos 2a, sin 2a); plain averaging across the 0/pi seam would blend
// near-identical orientations into something perpendicular.
bool sample_angle(const ScalarField& cos2a, const ScalarField& sin2a,
                  Interpolation interp, double sx, double sy, double* out) {
  double c = 0.0, s = 0.0;
  if (!sample_scalar(cos2a, interp, sx, sy, &c)) return false;
  if (!sample_scalar(sin2a, interp, sx, sy, &s)) return false;
  *out = fold_angle_to_pi(0.5 * std::atan2(s, c));
  return true;
}

double corrected_alpha(const AugmentSpec& spec, double alpha) {
  if (spec.kind == AugmentKind::kRotation) return fold_angle_to_pi(alpha + spec.theta);
  return fold_angle_to_pi(kPi - alpha);
}

}  // namespace

AugmentedParams augment_regularized(const PolarParams& params, const AugmentSpec& spec) {
  params.validate();
  spec.validate();
  const int w = params.width(), h = params.height();

  ScalarField cos2a(w, h), sin2a(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      cos2a(x, y) = std::cos(2.0 * params.alpha(x, y));
      sin2a(x, y) = std::sin(2.0 * params.alpha(x, y));
    }
  }

  AugmentedParams out{{ScalarField(w, h), ScalarField(w, h), ScalarField(w, h)},
                      MaskImage(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sx = 0.0, sy = 0.0;
      source_coords(spec, w, h, x, y, &sx, &sy);
      double iota = 0.0, rho = 0.0, alpha = 0.0;
      const bool ok = sample_scalar(params.iota, spec.interpolation, sx, sy, &iota) &&
                      sample_scalar(params.rho, spec.interpolation, sx, sy, &rho) &&
                      sample_angle(cos2a, sin2a, spec.interpolation, sx, sy, &alpha);
      if (ok) {
        out.params.iota(x, y) = iota;
        out.params.rho(x, y) = std::clamp(rho, 0.0, 1.0);
        out.params.alpha(x, y) = corrected_alpha(spec, alpha);
        out.valid(x, y) = 1;
      }
    }
  }
  return out;
}

AugmentedParams augment_naive(const PolarParams& params, const AugmentSpec& spec) {
  params.validate();
  spec.validate();
  const int w = params.width(), h = params.height();
  AugmentedParams out{{ScalarField(w, h), ScalarField(w, h), ScalarField(w, h)},
                      MaskImage(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sx = 0.0, sy = 0.0;
      source_coords(spec, w, h, x, y, &sx, &sy);
      double iota = 0.0, rho = 0.0, alpha = 0.0;
      const bool ok = sample_scalar(params.iota, spec.interpolation, sx, sy, &iota) &&
                      sample_scalar(params.rho, spec.interpolation, sx, sy, &rho) &&
                      sample_scalar(params.alpha, spec.interpolation, sx, sy, &alpha);
      if (ok) {
        out.params.iota(x, y) = iota;
        out.params.rho(x, y) = std::clamp(rho, 0.0, 1.0);
        // Interpolation of values in [0, pi) stays in range; no correction.
        out.params.alpha(x, y) = alpha;
        out.valid(x, y) = 1;
      }
    }
  }
  return out;
}

AugmentedHsl augment_hsl(const HslImage& img, const AugmentSpec& spec, bool regularized) {
  img.validate();
  spec.validate();
  const int w = img.width(), h = img.height();

  ScalarField cosh_(w, h), sinh_(w, h);
  if (regularized) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double rad = img.h(x, y) * (kPi / 180.0);
        cosh_(x, y) = std::cos(rad);
        sinh_(x, y) = std::sin(rad);
      }
    }
  }

  AugmentedHsl out{{ScalarField(w, h), ScalarField(w, h), ScalarField(w, h)},
                   MaskImage(w, h)};
  const double hue_shift =
      spec.kind == AugmentKind::kRotation ? 2.0 * spec.theta * (180.0 / kPi) : 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sx = 0.0, sy = 0.0;
      source_coords(spec, w, h, x, y, &sx, &sy);
      double hue = 0.0, sat = 0.0, lum = 0.0;
      bool ok = sample_scalar(img.s, spec.interpolation, sx, sy, &sat) &&
                sample_scalar(img.l, spec.interpolation, sx, sy, &lum);
      if (ok) {
        if (regularized) {
          double c = 0.0, s = 0.0;
          ok = sample_scalar(cosh_, spec.interpolation, sx, sy, &c) &&
               sample_scalar(sinh_, spec.interpolation, sx, sy, &s);
          if (ok) {
            hue = std::atan2(s, c) * (180.0 / kPi);
            if (spec.kind == AugmentKind::kRotation) {
              hue += hue_shift;
            } else {
              hue = 360.0 - hue;
            }
            hue = std::fmod(hue, 360.0);
            if (hue < 0.0) hue += 360.0;
          }
        } else {
          ok = sample_scalar(img.h, spec.interpolation, sx, sy, &hue);
        }
      }
      if (ok) {
        out.image.h(x, y) = hue;
        out.image.s(x, y) = std::clamp(sat, 0.0, 100.0);
        out.image.l(x, y) = std::clamp(lum, 0.0, 100.0);
        out.valid(x, y) = 1;
      }
    }
  }
  return out;
}

}  // namespace polarcv
