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
#ifndef POLARCV_POLARAUG_HPP
#define POLARCV_POLARAUG_HPP

#include "polarcv/hslmap.hpp"
#include "polarcv/image.hpp"
#include "polarcv/polarimage.hpp"

namespace polarcv {

enum class AugmentKind { kRotation, kHorizontalFlip };
enum class Interpolation { kNearest, kBilinear };

// Rotation is about the image center ((w-1)/2, (h-1)/2), with positive theta
// turning +x toward +y (the mathematical positive sense in x-right/y-down
// image coordinates). Rotating the image by theta is equivalent to rolling
// the camera by -theta about its optical axis; the re-render oracle in the
// synthscene tests pins this convention down.
struct AugmentSpec {
  AugmentKind kind = AugmentKind::kRotation;
  double theta = 0.0;  // radians, in (-pi, pi]; rotation only
  Interpolation interpolation = Interpolation::kBilinear;

  void validate() const;
};

struct AugmentedParams {
  PolarParams params;
  // 1 where the source pixel fell inside the frame; losses and metrics
  // downstream can exclude the rest. Invalid pixels carry (0, 0, 0).
  MaskImage valid;
};

struct AugmentedHsl {
  HslImage image;
  MaskImage valid;
};

// Physics-preserving transform: iota and rho move spatially; alpha moves
// spatially (interpolated through its doubled-angle unit vector to avoid
// the 0/pi seam) and is then value-corrected, alpha' = (alpha + theta) mod pi
// for rotation and alpha' = (pi - alpha) mod pi for the horizontal flip.
AugmentedParams augment_regularized(const PolarParams& params, const AugmentSpec& spec);

// Ablation variant: all three fields are resampled as plain scalars and the
// alpha values are left untouched, which breaks the acquisition physics on
// purpose.
AugmentedParams augment_naive(const PolarParams& params, const AugmentSpec& spec);

// Same transforms acting on the HSL encoding; the regularized correction is
// carried through H = 2*alpha, i.e. H' = (H + 2*theta*180/pi) mod 360 for
// rotation and H' = (360 - H) mod 360 for the flip.
AugmentedHsl augment_hsl(const HslImage& img, const AugmentSpec& spec, bool regularized);

}  // namespace polarcv

#endif  // POLARCV_POLARAUG_HPP
