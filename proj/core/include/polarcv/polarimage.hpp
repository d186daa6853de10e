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
#ifndef POLARCV_POLARIMAGE_HPP
#define POLARCV_POLARIMAGE_HPP

#include <array>
#include <cstdint>
#include <string>

#include "polarcv/image.hpp"

namespace polarcv {

inline constexpr double kPi = 3.14159265358979323846;

// Degenerate-pixel conventions: alpha := 0 when S1^2 + S2^2 < kPolAngleEps^2,
// rho := 0 when S0 < kIntensityEps. Keeps polar_params total and tests
// deterministic.
inline constexpr double kPolAngleEps = 1e-12;
inline constexpr double kIntensityEps = 1e-9;

enum class Orientation : std::uint8_t { kDeg0 = 0, kDeg45 = 1, kDeg90 = 2, kDeg135 = 3 };

double orientation_radians(Orientation o);
// Accepts 0, 45, 90, 135; anything else throws InvalidLayoutError.
Orientation orientation_from_degrees(int degrees);
int orientation_degrees(Orientation o);

// 2x2 micro-polarizer tile. cell(x, y) is the orientation at mosaic position
// (x mod 2, y mod 2). Sensors disagree on the order, so the layout travels
// with the raw frame; the default puts 90 top-left.
struct MosaicLayout {
  std::array<Orientation, 4> cells{};  // index = (y % 2) * 2 + (x % 2)

  static MosaicLayout default_layout();       // [[90,45],[135,0]]
  static MosaicLayout parse(const std::string& text);  // "90,45,135,0" row-major

  Orientation cell(int x, int y) const { return cells[(y & 1) * 2 + (x & 1)]; }
  bool is_permutation() const;
  // Tile offset (ox, oy) of the cell carrying orientation o.
  void offset_of(Orientation o, int* ox, int* oy) const;
  std::string str() const;
};

// Raw 2x2-mosaic sensor frame; linear intensity normalized to [0,1],
// dimensions even.
struct DofpRaw {
  ScalarField values;
  MosaicLayout layout = MosaicLayout::default_layout();

  void validate() const;
};

// Dense per-orientation intensity channels.
struct OrientationStack {
  ScalarField p0, p45, p90, p135;

  int width() const { return p0.width(); }
  int height() const { return p0.height(); }
  const ScalarField& channel(Orientation o) const;
  ScalarField& channel(Orientation o);
  void validate() const;
};

// Linear Stokes components. S3 is identically zero for a linear DoFP sensor
// and is not stored.
struct StokesImage {
  ScalarField s0, s1, s2;

  int width() const { return s0.width(); }
  int height() const { return s0.height(); }
  void validate() const;
};

// Per-pixel intensity iota >= 0, angle of polarization alpha in [0, pi),
// degree of polarization rho in [0, 1].
struct PolarParams {
  ScalarField iota, alpha, rho;

  int width() const { return iota.width(); }
  int height() const { return iota.height(); }
  void validate() const;
};

// Per-image diagnostics from polar_params.
struct PolarParamsStats {
  std::int64_t rho_clamped = 0;      // pixels where sqrt(S1^2+S2^2) exceeded S0
  std::int64_t degenerate_alpha = 0; // pixels resolved by the alpha := 0 convention
};

// Densify the mosaic: each orientation channel keeps its carried samples
// bit-exactly and interpolates the quarter-resolution sample grid bilinearly
// elsewhere; border pixels replicate the nearest sample row/column.
OrientationStack demosaick(const DofpRaw& raw);

// S0 = P0 + P90, S1 = P0 - P90, S2 = P45 - P135, per pixel.
StokesImage stokes(const OrientationStack& stack);

// iota = S0; alpha = atan2(S2, S1) / 2 folded into [0, pi); rho =
// sqrt(S1^2 + S2^2) / S0 clamped to [0, 1]. atan2 rather than the plain
// arctan of the ratio: the ratio loses the S1-sign quadrant and breaks the
// synthesize round trip.
PolarParams polar_params(const StokesImage& s, PolarParamsStats* stats = nullptr);

// Inverse model, Malus form P_phi = (iota/2) (1 + rho cos 2(phi - alpha)).
// The smaller channel of each pair is produced as the exact complement of
// the larger one so that stokes() rebuilds iota bit-exactly.
OrientationStack synthesize(const PolarParams& params);

// Subsample a dense stack onto a mosaic according to the layout.
DofpRaw mosaic_from_stack(const OrientationStack& stack, const MosaicLayout& layout);

}  // namespace polarcv

#endif  // POLARCV_POLARIMAGE_HPP
